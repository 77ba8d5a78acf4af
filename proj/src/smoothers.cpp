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

#include "retrosmooth/smoothers.hpp"

#include <cmath>

#include "retrosmooth/error.hpp"

namespace retrosmooth {

namespace {

constexpr double kConsistencyTol = 1e-9;

Matrix lift(const Matrix& op, Eigen::Index d_a) { return tensor(op, Matrix::Identity(d_a, d_a)); }

}  // namespace

BranchSet enumerate_bob_branches(const JointInstrument& joint, const DensityOperator& rho0, const Record& past,
                                 const BranchOptions& options) {
  if (rho0.dim() != joint.dim()) throw Error(ErrorCode::InvalidFactorization, "state dimension mismatch");
  std::size_t count = 1;
  for (const std::size_t y : past) {
    if (y >= joint.alice_labels().size()) throw Error(ErrorCode::UnknownOutcome, "outcome index out of range");
    const std::size_t width = joint.entries_for(y).size();
    if (count > options.cap / width) {
      throw Error(ErrorCode::EnumerationTooLarge, "Bob branches exceed the cap " + std::to_string(options.cap));
    }
    count *= width;
  }

  const Eigen::Index d = joint.dim();
  struct Partial {
    std::vector<std::string> labels;
    Matrix kraus;
  };
  std::vector<Partial> frontier{{{}, Matrix::Identity(d, d)}};
  for (const std::size_t y : past) {
    std::vector<Partial> next;
    next.reserve(frontier.size() * joint.entries_for(y).size());
    for (const Partial& p : frontier) {
      for (const std::size_t i : joint.entries_for(y)) {
        const auto& e = joint.entries()[i];
        Partial child{p.labels, e.kraus * p.kraus};
        child.labels.push_back(joint.bob_labels()[e.bob]);
        next.push_back(std::move(child));
      }
    }
    frontier = std::move(next);
  }

  BranchSet out;
  out.branches.reserve(frontier.size());
  for (Partial& p : frontier) {
    TrueStateBranch b;
    b.bob_record = std::move(p.labels);
    b.state = hermitian_part(p.kraus * rho0.matrix() * p.kraus.adjoint());
    b.weight = std::max(0.0, b.state.trace().real());
    b.kraus = std::move(p.kraus);
    out.total_weight += b.weight;
    out.branches.push_back(std::move(b));
  }
  if (!(out.total_weight > 0.0)) {
    throw Error(ErrorCode::ZeroProbabilityRecord, "past record has zero probability");
  }
  if (options.prune_relative > 0.0) {
    const double cutoff = options.prune_relative * out.total_weight;
    double dropped = 0.0;
    std::erase_if(out.branches, [&](const TrueStateBranch& b) {
      if (b.weight < cutoff) {
        dropped += b.weight;
        return true;
      }
      return false;
    });
    out.dropped_mass = dropped / out.total_weight;
  }
  return out;
}

FilteredGlobalState build_pf(const DensityOperator& rho_f) {
  return FilteredGlobalState(PriorKind::PF, rho_f.matrix(), Dims{rho_f.dim(), 1});
}

FilteredGlobalState build_gw(const JointInstrument& joint, const DensityOperator& rho0, const Record& past,
                             const BranchOptions& options) {
  const FilterResult filtered = filter(alice_marginal(joint), rho0, past);
  const BranchSet set = enumerate_bob_branches(joint, rho0, past, options);
  const Purification psi = purify(rho0);
  double kept = 0.0;
  for (const auto& b : set.branches) kept += b.weight;

  std::vector<FilteredGlobalState::Block> blocks;
  blocks.reserve(set.branches.size());
  for (const auto& b : set.branches) {
    const Vector v = lift(b.kraus, psi.dims.a) * psi.psi;
    blocks.push_back({v * v.adjoint() / kept, b.bob_record});
  }
  FilteredGlobalState out(PriorKind::GW, std::move(blocks), rho0.dim(), psi.dims.a);
  out.dropped_mass = set.dropped_mass;
  if (set.dropped_mass == 0.0) out.check_marginal(filtered.state.matrix(), kConsistencyTol);
  return out;
}

FilteredGlobalState build_gw_variant(const JointInstrument& joint, const DensityOperator& rho0, const Record& past,
                                     const BranchOptions& options) {
  const FilterResult filtered = filter(alice_marginal(joint), rho0, past);
  const BranchSet set = enumerate_bob_branches(joint, rho0, past, options);
  double kept = 0.0;
  for (const auto& b : set.branches) kept += b.weight;

  std::vector<FilteredGlobalState::Block> blocks;
  blocks.reserve(set.branches.size());
  for (const auto& b : set.branches) blocks.push_back({b.state / kept, b.bob_record});
  FilteredGlobalState out(PriorKind::GWVariant, std::move(blocks), rho0.dim(), 1);
  out.dropped_mass = set.dropped_mass;
  if (set.dropped_mass == 0.0) out.check_marginal(filtered.state.matrix(), kConsistencyTol);
  return out;
}

FilteredGlobalState build_pf_variant(const Instrument& instrument, const DensityOperator& rho0, const Record& past) {
  const FilterResult filtered = filter(instrument, rho0, past);
  const Purification psi = purify(rho0);
  Matrix global = psi.psi * psi.psi.adjoint();
  for (const std::size_t y : past) {
    Matrix next = Matrix::Zero(global.rows(), global.cols());
    for (const Matrix& k : instrument.op(y).kraus()) {
      const Matrix lifted = lift(k, psi.dims.a);
      next.noalias() += lifted * global * lifted.adjoint();
    }
    global = next / next.trace().real();
  }
  FilteredGlobalState out(PriorKind::PFVariant, hermitian_part(global), psi.dims);
  out.check_marginal(filtered.state.matrix(), kConsistencyTol);
  return out;
}

FilteredGlobalState build_clhs(const DensityOperator& rho_f) {
  const Purification psi = purify(rho_f);
  return FilteredGlobalState(PriorKind::CLHS, psi.psi * psi.psi.adjoint(), psi.dims);
}

FilteredGlobalState build_custom(const Matrix& state, Dims dims, const Matrix* marginal) {
  FilteredGlobalState out(PriorKind::Custom, state, dims);
  if (marginal != nullptr) out.check_marginal(*marginal, kConsistencyTol);
  return out;
}

FilteredGlobalState correct_marginal(const Matrix& extension, Dims dims, const DensityOperator& target,
                                     PriorKind kind) {
  if (target.dim() != dims.q) throw Error(ErrorCode::InvalidFactorization, "target marginal dimension mismatch");
  const Matrix current = partial_trace(extension, dims, Keep::Q);
  const Matrix leak = target.matrix() - support_projector(current) * target.matrix() * support_projector(current);
  if (leak.cwiseAbs().maxCoeff() > 1e-9) {
    throw Error(ErrorCode::InvalidExtension, "target marginal leaves the support of the template");
  }
  const Matrix c = psd_sqrt(target.matrix()) * support_inv_sqrt(current);
  const Matrix lifted = lift(c, dims.a);
  Matrix corrected = hermitian_part(lifted * extension * lifted.adjoint());
  FilteredGlobalState out(kind, corrected / corrected.trace().real(), dims);
  out.check_marginal(target.matrix(), kConsistencyTol);
  return out;
}

}  // namespace retrosmooth
