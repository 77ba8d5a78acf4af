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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "retrosmooth/linalg.hpp"

namespace retrosmooth {

/// Smoothing normalizers at or below this are an impossible record.
inline constexpr double kMinNormalizer = 1e-14;

/// Evidence weight outside the support of E(gamma) tolerated by the Petz map.
inline constexpr double kMaxSupportLeakage = 1e-8;

enum class PriorKind { PF, GW, GWVariant, PFVariant, CLHS, Custom };

std::string_view to_string(PriorKind kind);

/// Accepts "pf" | "gw" | "gw-variant" | "pf-variant" | "clhs" | "custom".
PriorKind parse_prior_kind(std::string_view name);

/// Joint prior on Q (x) A. A factors as A1 (x) A2 where A2 is an optional
/// classical register: the state is sum_u B_u (x) |u><u| and only the blocks
/// B_u on Q (x) A1 are stored. Without a register there is a single block.
class FilteredGlobalState {
 public:
  struct Block {
    Matrix state;                        // on Q (x) A1
    std::vector<std::string> register_label;  // Bob record for this block
  };

  FilteredGlobalState(PriorKind kind, Matrix state, Dims dims);
  FilteredGlobalState(PriorKind kind, std::vector<Block> blocks, Eigen::Index d_q, Eigen::Index d_a1);

  PriorKind kind() const { return kind_; }
  Eigen::Index d_q() const { return d_q_; }
  Eigen::Index d_a1() const { return d_a1_; }
  Eigen::Index register_size() const { return has_register_ ? static_cast<Eigen::Index>(blocks_.size()) : 1; }
  Eigen::Index d_a() const { return d_a1_ * register_size(); }
  bool has_register() const { return has_register_; }
  const std::vector<Block>& blocks() const { return blocks_; }

  /// Tr_A of the global state.
  Matrix system_marginal() const;

  /// Dense matrix on Q (x) A1 (x) A2.
  Matrix dense() const;

  /// Throws InvalidExtension unless Tr_A matches rho within tol.
  void check_marginal(const Matrix& rho, double tol = 1e-9) const;

  /// Probability mass removed by branch pruning, if any.
  double dropped_mass = 0.0;

 private:
  PriorKind kind_;
  Eigen::Index d_q_;
  Eigen::Index d_a1_;
  bool has_register_;
  std::vector<Block> blocks_;
};

/// Kraus representation of a trace-preserving map from C^{d_in} to C^{d_out}.
class ChannelRep {
 public:
  explicit ChannelRep(std::vector<Matrix> kraus, double tp_tol = 1e-9);

  Eigen::Index input_dim() const { return kraus_.front().cols(); }
  Eigen::Index output_dim() const { return kraus_.front().rows(); }
  const std::vector<Matrix>& kraus() const { return kraus_; }

  Matrix apply(const Matrix& x) const;
  Matrix adjoint(const Matrix& y) const;

 private:
  std::vector<Matrix> kraus_;
};

/// sqrt(gamma) E^dagger(E(gamma)^{-1/2} sigma E(gamma)^{-1/2}) sqrt(gamma).
DensityOperator petz_map(const ChannelRep& channel, const DensityOperator& prior, const DensityOperator& evidence);

/// Petz recovery with the prior extended to Q (x) A, followed by Tr_A.
DensityOperator extended_petz(const ChannelRep& channel, const FilteredGlobalState& prior,
                              const DensityOperator& evidence);

/// Tr_A[sqrt(rho) (E (x) I) sqrt(rho)] / Tr[Tr_A(rho) E] without validation.
/// Exposed so positivity and trace can be measured before any clamping.
Matrix smoothed_operator(const FilteredGlobalState& filtered, const Effect& retro);

DensityOperator generalized_smooth(const FilteredGlobalState& filtered, const Effect& retro);

/// Normalized blocks of sqrt(rho) (E (x) I) sqrt(rho), one per register value.
std::vector<Matrix> smoothed_global_blocks(const FilteredGlobalState& filtered, const Effect& retro);

/// Dense smoothed global state on Q (x) A1 (x) A2.
DensityOperator smoothed_global(const FilteredGlobalState& filtered, const Effect& retro);

struct RegisterProbability {
  std::vector<std::string> bob_record;
  double probability = 0.0;
};

/// Distribution of the classical register after smoothing, in register order.
std::vector<RegisterProbability> bob_posterior(const FilteredGlobalState& filtered, const Effect& retro);

/// Born probabilities Tr[rho E_i]; the effects must sum to I within 1e-9.
std::vector<double> counterfactual_prob(const DensityOperator& smoothed, std::span<const Effect> povm);

}  // namespace retrosmooth
