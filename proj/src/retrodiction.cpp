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

#include "retrosmooth/retrodiction.hpp"

#include <algorithm>
#include <cmath>

#include "retrosmooth/error.hpp"

namespace retrosmooth {

namespace {

void require_psd_block(const Matrix& b) {
  if (b.rows() != b.cols() || !b.allFinite()) {
    throw Error(ErrorCode::InvalidExtension, "global state block must be finite and square");
  }
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if (hermiticity_defect(b) > tol::kHermitian * scale) {
    throw Error(ErrorCode::InvalidExtension, "global state block is not Hermitian");
  }
  if (herm_eig(hermitian_part(b)).values.minCoeff() < -tol::kPsdClamp) {
    throw Error(ErrorCode::InvalidExtension, "global state block is not positive semidefinite");
  }
}

// Tr_{A1}[sqrt(B) (X (x) I) sqrt(B)] summed over blocks.
Matrix sandwich_traced(const FilteredGlobalState& g, const Matrix& x) {
  const Dims dims{g.d_q(), g.d_a1()};
  const Matrix lifted = tensor(x, Matrix::Identity(g.d_a1(), g.d_a1()));
  Matrix out = Matrix::Zero(g.d_q(), g.d_q());
  for (const auto& block : g.blocks()) {
    const Matrix root = psd_sqrt(block.state);
    out += partial_trace(root * lifted * root, dims, Keep::Q);
  }
  return hermitian_part(out);
}

Matrix petz_core(const ChannelRep& channel, const Matrix& prior, const DensityOperator& evidence) {
  if (channel.input_dim() != prior.rows() || channel.output_dim() != evidence.dim()) {
    throw Error(ErrorCode::InvalidFactorization, "channel dimensions do not match prior and evidence");
  }
  const Matrix image = hermitian_part(channel.apply(prior));
  const Matrix inv_root = support_inv_sqrt(image);
  const Matrix projector = hermitian_part(inv_root * image * inv_root);
  const double leakage =
      (evidence.matrix() * (Matrix::Identity(image.rows(), image.cols()) - projector)).trace().real();
  if (leakage > kMaxSupportLeakage) {
    throw Error(ErrorCode::EvidenceOutsideSupport, "evidence weight " + std::to_string(leakage) +
                                                       " lies outside the support of the channel output");
  }
  return hermitian_part(channel.adjoint(inv_root * evidence.matrix() * inv_root));
}

}  // namespace

std::string_view to_string(PriorKind kind) {
  switch (kind) {
    case PriorKind::PF: return "pf";
    case PriorKind::GW: return "gw";
    case PriorKind::GWVariant: return "gw-variant";
    case PriorKind::PFVariant: return "pf-variant";
    case PriorKind::CLHS: return "clhs";
    case PriorKind::Custom: return "custom";
  }
  return "unknown";
}

PriorKind parse_prior_kind(std::string_view name) {
  for (const PriorKind k : {PriorKind::PF, PriorKind::GW, PriorKind::GWVariant, PriorKind::PFVariant,
                            PriorKind::CLHS, PriorKind::Custom}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::ConfigError, "unknown prior kind '" + std::string(name) + "'");
}

FilteredGlobalState::FilteredGlobalState(PriorKind kind, Matrix state, Dims dims)
    : kind_(kind), d_q_(dims.q), d_a1_(dims.a), has_register_(false) {
  if (dims.q <= 0 || dims.a <= 0 || state.rows() != dims.total()) {
    throw Error(ErrorCode::InvalidFactorization, "global state does not factor as declared");
  }
  require_psd_block(state);
  const double trace = state.trace().real();
  if (std::abs(trace - 1.0) > 1e-9) throw Error(ErrorCode::InvalidExtension, "global state trace differs from 1");
  blocks_.push_back({hermitian_part(state), {}});
}

FilteredGlobalState::FilteredGlobalState(PriorKind kind, std::vector<Block> blocks, Eigen::Index d_q,
                                         Eigen::Index d_a1)
    : kind_(kind), d_q_(d_q), d_a1_(d_a1), has_register_(true), blocks_(std::move(blocks)) {
  if (d_q <= 0 || d_a1 <= 0 || blocks_.empty()) {
    throw Error(ErrorCode::InvalidFactorization, "registered global state needs blocks");
  }
  double trace = 0.0;
  for (auto& b : blocks_) {
    if (b.state.rows() != d_q * d_a1) throw Error(ErrorCode::InvalidFactorization, "block has the wrong size");
    require_psd_block(b.state);
    b.state = hermitian_part(b.state);
    trace += b.state.trace().real();
  }
  if (std::abs(trace - 1.0) > 1e-9) throw Error(ErrorCode::InvalidExtension, "global state trace differs from 1");
}

Matrix FilteredGlobalState::system_marginal() const {
  Matrix out = Matrix::Zero(d_q_, d_q_);
  for (const auto& b : blocks_) out += partial_trace(b.state, Dims{d_q_, d_a1_}, Keep::Q);
  return hermitian_part(out);
}

Matrix FilteredGlobalState::dense() const {
  if (!has_register_) return blocks_.front().state;
  const Eigen::Index n = register_size();
  Matrix out = Matrix::Zero(d_q_ * d_a1_ * n, d_q_ * d_a1_ * n);
  for (Eigen::Index u = 0; u < n; ++u) {
    Matrix reg = Matrix::Zero(n, n);
    reg(u, u) = 1.0;
    out += tensor(blocks_[static_cast<std::size_t>(u)].state, reg);
  }
  return out;
}

void FilteredGlobalState::check_marginal(const Matrix& rho, double tol) const {
  if (rho.rows() != d_q_) throw Error(ErrorCode::InvalidFactorization, "marginal dimension mismatch");
  const double gap = (system_marginal() - rho).cwiseAbs().maxCoeff();
  if (gap > tol) {
    throw Error(ErrorCode::InvalidExtension, "Tr_A of the global state misses the marginal by " + std::to_string(gap));
  }
}

ChannelRep::ChannelRep(std::vector<Matrix> kraus, double tp_tol) : kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw Error(ErrorCode::InvalidInstrument, "channel needs a Kraus operator");
  const Eigen::Index rows = kraus_.front().rows();
  const Eigen::Index cols = kraus_.front().cols();
  Matrix sum = Matrix::Zero(cols, cols);
  for (const Matrix& k : kraus_) {
    if (k.rows() != rows || k.cols() != cols || !k.allFinite() || rows == 0 || cols == 0) {
      throw Error(ErrorCode::InvalidInstrument, "Kraus operators must be finite with matching shapes");
    }
    sum += k.adjoint() * k;
  }
  if ((sum - Matrix::Identity(cols, cols)).cwiseAbs().maxCoeff() > tp_tol) {
    throw Error(ErrorCode::InvalidInstrument, "channel is not trace preserving");
  }
}

Matrix ChannelRep::apply(const Matrix& x) const {
  Matrix out = Matrix::Zero(output_dim(), output_dim());
  for (const Matrix& k : kraus_) out.noalias() += k * x * k.adjoint();
  return out;
}

Matrix ChannelRep::adjoint(const Matrix& y) const {
  Matrix out = Matrix::Zero(input_dim(), input_dim());
  for (const Matrix& k : kraus_) out.noalias() += k.adjoint() * y * k;
  return out;
}

DensityOperator petz_map(const ChannelRep& channel, const DensityOperator& prior, const DensityOperator& evidence) {
  const Matrix pulled = petz_core(channel, prior.matrix(), evidence);
  const Matrix root = psd_sqrt(prior.matrix());
  // Trace is 1 - leakage; renormalize the sub-1e-8 remainder away.
  return DensityOperator::normalized(hermitian_part(root * pulled * root));
}

DensityOperator extended_petz(const ChannelRep& channel, const FilteredGlobalState& prior,
                              const DensityOperator& evidence) {
  const Matrix pulled = petz_core(channel, prior.system_marginal(), evidence);
  return DensityOperator::normalized(sandwich_traced(prior, pulled));
}

Matrix smoothed_operator(const FilteredGlobalState& filtered, const Effect& retro) {
  if (retro.dim() != filtered.d_q()) throw Error(ErrorCode::InvalidFactorization, "effect dimension mismatch");
  const double norm = (filtered.system_marginal() * retro.matrix()).trace().real();
  if (!(norm > kMinNormalizer)) {
    throw Error(ErrorCode::ZeroProbabilityRecord, "future record has vanishing probability given the past");
  }
  return sandwich_traced(filtered, retro.matrix()) / norm;
}

DensityOperator generalized_smooth(const FilteredGlobalState& filtered, const Effect& retro) {
  return DensityOperator(smoothed_operator(filtered, retro));
}

std::vector<Matrix> smoothed_global_blocks(const FilteredGlobalState& filtered, const Effect& retro) {
  if (retro.dim() != filtered.d_q()) throw Error(ErrorCode::InvalidFactorization, "effect dimension mismatch");
  const double norm = (filtered.system_marginal() * retro.matrix()).trace().real();
  if (!(norm > kMinNormalizer)) {
    throw Error(ErrorCode::ZeroProbabilityRecord, "future record has vanishing probability given the past");
  }
  const Matrix lifted = tensor(retro.matrix(), Matrix::Identity(filtered.d_a1(), filtered.d_a1()));
  std::vector<Matrix> out;
  out.reserve(filtered.blocks().size());
  for (const auto& block : filtered.blocks()) {
    const Matrix root = psd_sqrt(block.state);
    out.push_back(hermitian_part(root * lifted * root) / norm);
  }
  return out;
}

DensityOperator smoothed_global(const FilteredGlobalState& filtered, const Effect& retro) {
  const std::vector<Matrix> blocks = smoothed_global_blocks(filtered, retro);
  if (!filtered.has_register()) return DensityOperator(blocks.front());
  const Eigen::Index n = filtered.register_size();
  const Eigen::Index b = blocks.front().rows();
  Matrix out = Matrix::Zero(b * n, b * n);
  for (Eigen::Index u = 0; u < n; ++u) {
    Matrix reg = Matrix::Zero(n, n);
    reg(u, u) = 1.0;
    out += tensor(blocks[static_cast<std::size_t>(u)], reg);
  }
  return DensityOperator(out);
}

std::vector<RegisterProbability> bob_posterior(const FilteredGlobalState& filtered, const Effect& retro) {
  if (!filtered.has_register() ||
      (filtered.kind() != PriorKind::GW && filtered.kind() != PriorKind::GWVariant)) {
    throw Error(ErrorCode::MissingClassicalRegister, "prior kind '" + std::string(to_string(filtered.kind())) +
                                                         "' carries no classical register");
  }
  const std::vector<Matrix> blocks = smoothed_global_blocks(filtered, retro);
  std::vector<RegisterProbability> out;
  out.reserve(blocks.size());
  for (std::size_t u = 0; u < blocks.size(); ++u) {
    out.push_back({filtered.blocks()[u].register_label, std::max(0.0, blocks[u].trace().real())});
  }
  return out;
}

std::vector<double> counterfactual_prob(const DensityOperator& smoothed, std::span<const Effect> povm) {
  if (povm.empty()) throw Error(ErrorCode::InvalidPOVM, "empty POVM");
  Matrix sum = Matrix::Zero(smoothed.dim(), smoothed.dim());
  for (const Effect& e : povm) {
    if (e.dim() != smoothed.dim()) throw Error(ErrorCode::InvalidPOVM, "effect dimension mismatch");
    sum += e.matrix();
  }
  if ((sum - Matrix::Identity(smoothed.dim(), smoothed.dim())).cwiseAbs().maxCoeff() > 1e-9) {
    throw Error(ErrorCode::InvalidPOVM, "effects do not sum to the identity");
  }
  std::vector<double> out;
  out.reserve(povm.size());
  for (const Effect& e : povm) out.push_back(std::max(0.0, (smoothed.matrix() * e.matrix()).trace().real()));
  return out;
}

}  // namespace retrosmooth
