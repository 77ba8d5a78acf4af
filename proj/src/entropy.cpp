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

#include "retrosmooth/entropy.hpp"

#include <cmath>

#include "retrosmooth/error.hpp"
#include "retrosmooth/smoothers.hpp"

namespace retrosmooth {

POVM::POVM(std::vector<Effect> effects, double tol) : effects_(std::move(effects)) {
  if (effects_.empty()) throw Error(ErrorCode::InvalidPOVM, "POVM needs at least one effect");
  const Eigen::Index d = effects_.front().dim();
  Matrix sum = Matrix::Zero(d, d);
  for (const Effect& e : effects_) {
    if (e.dim() != d) throw Error(ErrorCode::InvalidPOVM, "effects have different dimensions");
    sum += e.matrix();
  }
  if ((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > tol) {
    throw Error(ErrorCode::InvalidPOVM, "effects do not sum to the identity");
  }
}

POVM POVM::from_basis(const Matrix& unitary) {
  std::vector<Effect> effects;
  for (Eigen::Index k = 0; k < unitary.cols(); ++k) {
    effects.emplace_back(hermitian_part(unitary.col(k) * unitary.col(k).adjoint()));
  }
  return POVM(std::move(effects));
}

ExtensionScenario::ExtensionScenario(DensityOperator g, FilteredGlobalState ext, POVM p)
    : gamma(std::move(g)), extension(std::move(ext)), povm(std::move(p)) {
  if (povm.dim() != gamma.dim()) throw Error(ErrorCode::InvalidFactorization, "POVM dimension mismatch");
  extension.check_marginal(gamma.matrix(), 1e-9);
}

std::vector<double> outcome_probs(const ExtensionScenario& scenario) {
  std::vector<double> out;
  out.reserve(scenario.povm.size());
  for (const Effect& e : scenario.povm.effects()) {
    out.push_back(std::max(0.0, (e.matrix() * scenario.gamma.matrix()).trace().real()));
  }
  return out;
}

OutcomeStates smoothed_outcome_states(const ExtensionScenario& scenario) {
  OutcomeStates out;
  out.probs = outcome_probs(scenario);
  for (std::size_t i = 0; i < scenario.povm.size(); ++i) {
    if (out.probs[i] <= kMinOutcomeProb) {
      out.states.emplace_back(std::nullopt);
      ++out.skipped;
      continue;
    }
    out.states.emplace_back(generalized_smooth(scenario.extension, scenario.povm.effects()[i]));
  }
  return out;
}

double avg_entropy(const ExtensionScenario& scenario) {
  const OutcomeStates states = smoothed_outcome_states(scenario);
  double s = 0.0;
  for (std::size_t i = 0; i < states.probs.size(); ++i) {
    if (states.states[i]) s += states.probs[i] * entropy_vn(*states.states[i]);
  }
  return s;
}

double cq_conditional_entropy(std::span<const double> probs, std::span<const DensityOperator> states) {
  if (probs.size() != states.size() || probs.empty()) {
    throw Error(ErrorCode::InvalidDistribution, "need one state per probability");
  }
  const auto n = static_cast<Eigen::Index>(probs.size());
  const Eigen::Index d = states.front().dim();
  Matrix omega = Matrix::Zero(n * d, n * d);
  for (Eigen::Index i = 0; i < n; ++i) {
    omega.block(i * d, i * d, d, d) = probs[static_cast<std::size_t>(i)] * states[static_cast<std::size_t>(i)].matrix();
  }
  return entropy_vn(omega) - entropy_shannon(probs);
}

SandwichBound sandwich_bound(const DensityOperator& rho_f, std::span<const double> future_probs, double avg_s) {
  SandwichBound out;
  out.upper = entropy_vn(rho_f);
  out.lower = out.upper - entropy_shannon(future_probs);
  out.holds = avg_s >= out.lower - kBoundSlack && avg_s <= out.upper + kBoundSlack;
  return out;
}

Matrix LambdaMap::apply(const Matrix& y) const {
  return hermitian_part(channel.apply(support.adjoint() * y * support));
}

Matrix LambdaMap::apply_direct(const Matrix& y) const {
  const Matrix lifted = tensor(gamma_inv_sqrt * y * gamma_inv_sqrt, Matrix::Identity(dims.a, dims.a));
  return partial_trace(extension_sqrt * lifted * extension_sqrt, dims, Keep::Q);
}

Matrix LambdaMap::choi() const {
  const Eigen::Index r = support.cols();
  const Eigen::Index d = channel.output_dim();
  Matrix out = Matrix::Zero(r * d, r * d);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) {
      Matrix unit = Matrix::Zero(r, r);
      unit(i, j) = 1.0;
      out.block(i * d, j * d, d, d) = channel.apply(unit);
    }
  }
  return out;
}

LambdaMap lambda_map(const FilteredGlobalState& extension, const DensityOperator& gamma) {
  if (extension.d_q() != gamma.dim()) throw Error(ErrorCode::InvalidExtension, "extension dimension mismatch");
  extension.check_marginal(gamma.matrix(), 1e-9);
  const Dims dims{extension.d_q(), extension.d_a()};
  const Matrix root = psd_sqrt(extension.dense());
  const Matrix inv_root = support_inv_sqrt(gamma.matrix());

  const EigenDecomposition eig = herm_eig(gamma.matrix());
  const double cutoff = tol::kRank * eig.values(0);
  const Eigen::Index rank = (eig.values.array() > cutoff).count();
  const Matrix support = eig.vectors.leftCols(rank);

  // Tr_A[B (Z (x) I) B] = sum_{a,b} K_ab Z K_ab^dagger with K_ab = (I (x) <a|) B (I (x) |b>).
  std::vector<Matrix> kraus;
  kraus.reserve(static_cast<std::size_t>(dims.a * dims.a));
  for (Eigen::Index a = 0; a < dims.a; ++a) {
    for (Eigen::Index b = 0; b < dims.a; ++b) {
      Matrix k(dims.q, dims.q);
      for (Eigen::Index i = 0; i < dims.q; ++i) {
        for (Eigen::Index j = 0; j < dims.q; ++j) k(i, j) = root(i * dims.a + a, j * dims.a + b);
      }
      kraus.push_back(k * inv_root * support);
    }
  }
  return LambdaMap{ChannelRep(std::move(kraus)), support, inv_root, root, dims};
}

Theorem1Report theorem1_check(const DensityOperator& gamma, const FilteredGlobalState& extension, const POVM& povm) {
  Theorem1Report out;
  out.avg_trivial = avg_entropy(ExtensionScenario(gamma, build_pf(gamma), povm));
  out.avg_extension = avg_entropy(ExtensionScenario(gamma, extension, povm));
  out.entropy_gamma = entropy_vn(gamma);
  out.ordering_holds = out.avg_trivial - kBoundSlack <= out.avg_extension &&
                       out.avg_extension <= out.entropy_gamma + kBoundSlack;
  return out;
}

NoUniversalQuantifierReport no_universal_quantifier_demo() {
  const double h = 1.0 / std::sqrt(2.0);
  Vector k0(2), k1(2), plus(2), minus(2);
  k0 << 1.0, 0.0;
  k1 << 0.0, 1.0;
  plus << h, h;
  minus << h, -h;

  auto mix = [](const Vector& a0, const Vector& a1) {
    Vector x(2), y(2);
    x << 1.0, 0.0;
    y << 0.0, 1.0;
    const Matrix p0 = a0 * a0.adjoint();
    const Matrix p1 = a1 * a1.adjoint();
    return Matrix(0.5 * (tensor(p0, x * x.adjoint()) + tensor(p1, y * y.adjoint())));
  };
  const DensityOperator gamma = DensityOperator::maximally_mixed(2);
  const FilteredGlobalState g1(PriorKind::Custom, mix(k0, k1), Dims{2, 2});
  const FilteredGlobalState g2(PriorKind::Custom, mix(plus, minus), Dims{2, 2});

  Matrix zb(2, 2), xb(2, 2);
  zb << 1.0, 0.0, 0.0, 1.0;
  xb << h, h, h, -h;
  const POVM z = POVM::from_basis(zb);
  const POVM x = POVM::from_basis(xb);

  NoUniversalQuantifierReport out;
  out.g1_z = avg_entropy(ExtensionScenario(gamma, g1, z));
  out.g1_x = avg_entropy(ExtensionScenario(gamma, g1, x));
  out.g2_z = avg_entropy(ExtensionScenario(gamma, g2, z));
  out.g2_x = avg_entropy(ExtensionScenario(gamma, g2, x));
  out.reversal = out.g1_z < out.g2_z && out.g1_x > out.g2_x;
  return out;
}

}  // namespace retrosmooth
