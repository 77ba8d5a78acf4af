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

#include <string>
#include <vector>

#include "retrosmooth/linalg.hpp"
#include "retrosmooth/retrodiction.hpp"
#include "retrosmooth/trajectory.hpp"

namespace retrosmooth {

struct BranchOptions {
  std::size_t cap = kDefaultEnumerationCap;
  // Branches lighter than prune_relative * total are dropped. Zero disables.
  double prune_relative = 0.0;
};

/// One Bob record compatible with Alice's past record.
struct TrueStateBranch {
  std::vector<std::string> bob_record;
  Matrix kraus;  // composite rank-one operator, latest step leftmost
  Matrix state;  // kraus * rho0 * kraus^dagger, unnormalized
  double weight = 0.0;
};

struct BranchSet {
  std::vector<TrueStateBranch> branches;  // lexicographic in Bob labels
  double total_weight = 0.0;              // Tr[Phi_past(rho0)] before pruning
  double dropped_mass = 0.0;              // fraction of total_weight pruned
};

BranchSet enumerate_bob_branches(const JointInstrument& joint, const DensityOperator& rho0, const Record& past,
                                 const BranchOptions& options = {});

FilteredGlobalState build_pf(const DensityOperator& rho_f);

/// Purified initial state with a classical register over Bob's past record.
FilteredGlobalState build_gw(const JointInstrument& joint, const DensityOperator& rho0, const Record& past,
                             const BranchOptions& options = {});

/// Classical register over Bob's past record, no purification.
FilteredGlobalState build_gw_variant(const JointInstrument& joint, const DensityOperator& rho0, const Record& past,
                                     const BranchOptions& options = {});

/// (Phi_past (x) id) applied to a purification of rho0, normalized.
FilteredGlobalState build_pf_variant(const Instrument& instrument, const DensityOperator& rho0, const Record& past);

/// Canonical purification of the filtered state.
FilteredGlobalState build_clhs(const DensityOperator& rho_f);

/// Explicit extension; when marginal is non-null it must equal Tr_A within 1e-9.
FilteredGlobalState build_custom(const Matrix& state, Dims dims, const Matrix* marginal = nullptr);

/// Conjugates a template extension by target^{1/2} (Tr_A T)^{-1/2} (x) I so that
/// the result has marginal exactly target. Needs supp(target) within supp(Tr_A T).
FilteredGlobalState correct_marginal(const Matrix& extension, Dims dims, const DensityOperator& target,
                                     PriorKind kind = PriorKind::Custom);

}  // namespace retrosmooth
