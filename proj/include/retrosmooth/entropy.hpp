// Copyright 2026 The retrosmooth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "retrosmooth/linalg.hpp"
#include "retrosmooth/retrodiction.hpp"

namespace retrosmooth {

class POVM {
 public:
  /// Effects must sum to I within tol.
  explicit POVM(std::vector<Effect> effects, double tol = 1e-9);

  /// Projective measurement onto the columns of a unitary.
  static POVM from_basis(const Matrix& unitary);

  std::size_t size() const { return effects_.size(); }
  Eigen::Index dim() const { return effects_.front().dim(); }
  const std::vector<Effect>& effects() const { return effects_; }

 private:
  std::vector<Effect> effects_;
};

/// A marginal gamma, one of its extensions and a POVM on Q.
struct ExtensionScenario {
  ExtensionScenario(DensityOperator gamma, FilteredGlobalState extension, POVM povm);

  DensityOperator gamma;
  FilteredGlobalState extension;
  POVM povm;
};

/// Outcomes with p_i at or below this get no smoothed state.
inline constexpr double kMinOutcomeProb = 1e-14;

std::vector<double> outcome_probs(const ExtensionScenario& scenario);

struct OutcomeStates {
  std::vector<double> probs;
  std::vector<std::optional<DensityOperator>> states;  // empty where skipped
  std::size_t skipped = 0;
};

OutcomeStates smoothed_outcome_states(const ExtensionScenario& scenario);

/// sum_i p_i S(rho_i), nats.
double avg_entropy(const ExtensionScenario& scenario);

/// S(Q|C) of sum_i p_i |i><i| (x) rho_i, built densely.
double cq_conditional_entropy(std::span<const double> probs, std::span<const DensityOperator> states);

struct SandwichBound {
  double lower = 0.0;
  double upper = 0.0;
  bool holds = false;
};

inline constexpr double kBoundSlack = 1e-9;

/// S(rho_F) - H(future) <= avg_s <= S(rho_F).
SandwichBound sandwich_bound(const DensityOperator& rho_f, std::span<const double> future_probs, double avg_s);

/// The map Y -> Tr_A[sqrt(Gamma) (gamma^{-1/2} Y gamma^{-1/2} (x) I) sqrt(Gamma)]
/// restricted to supp(gamma). channel acts on r x r inputs expressed in the
/// support basis (columns of support).
struct LambdaMap {
  ChannelRep channel;
  Matrix support;  // d_Q x r isometry

  /// Y must be supported on supp(gamma).
  Matrix apply(const Matrix& y) const;

  /// Evaluates the defining formula directly, without the Kraus form.
  Matrix apply_direct(const Matrix& y) const;

  /// Choi operator sum_ij |i><j| (x) Lambda(|i><j|) over the support basis.
  Matrix choi() const;

  Matrix gamma_inv_sqrt;
  Matrix extension_sqrt;
  Dims dims;
};

LambdaMap lambda_map(const FilteredGlobalState& extension, const DensityOperator& gamma);

struct Theorem1Report {
  double avg_trivial = 0.0;
  double avg_extension = 0.0;
  double entropy_gamma = 0.0;
  bool ordering_holds = false;
};

Theorem1Report theorem1_check(const DensityOperator& gamma, const FilteredGlobalState& extension, const POVM& povm);

struct NoUniversalQuantifierReport {
  double g1_z = 0.0;
  double g1_x = 0.0;
  double g2_z = 0.0;
  double g2_x = 0.0;
  bool reversal = false;  // g1 < g2 under Z and g1 > g2 under X
};

/// Two extensions of I/2 whose average-entropy ordering flips between the
/// Z and X measurements.
NoUniversalQuantifierReport no_universal_quantifier_demo();

}  // namespace retrosmooth
