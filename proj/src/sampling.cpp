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

#include "retrosmooth/sampling.hpp"

#include <cmath>

#include "retrosmooth/smoothers.hpp"

namespace retrosmooth::sampling {

Matrix ginibre(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      out(i, j) = Complex(re, im);
    }
  }
  return out;
}

Matrix random_isometry(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  const Matrix g = ginibre(rows, cols, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  const Matrix r = qr.matrixQR();
  // Fix column phases against the R diagonal for a Haar-distributed result.
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

Matrix random_unitary(Eigen::Index d, std::mt19937_64& rng) { return random_isometry(d, d, rng); }

Matrix random_hermitian(Eigen::Index d, std::mt19937_64& rng) { return hermitian_part(ginibre(d, d, rng)); }

DensityOperator random_density(Eigen::Index d, std::mt19937_64& rng, Eigen::Index rank) {
  const Eigen::Index r = rank <= 0 ? d : rank;
  const Matrix g = ginibre(d, r, rng);
  const Matrix m = g * g.adjoint();
  return DensityOperator::normalized(hermitian_part(m));
}

Vector random_pure(Eigen::Index d, std::mt19937_64& rng) {
  Vector v = ginibre(d, 1, rng).col(0);
  return v / v.norm();
}

std::vector<Effect> random_povm(Eigen::Index d, std::size_t n, std::mt19937_64& rng) {
  std::vector<Matrix> raw;
  Matrix sum = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < n; ++i) {
    const Matrix g = ginibre(d, d, rng);
    raw.push_back(hermitian_part(g * g.adjoint()));
    sum += raw.back();
  }
  const Matrix norm = support_inv_sqrt(hermitian_part(sum));
  std::vector<Effect> out;
  out.reserve(n);
  for (const Matrix& m : raw) out.emplace_back(hermitian_part(norm * m * norm));
  return out;
}

ChannelRep random_channel(Eigen::Index d_in, Eigen::Index d_out, std::size_t n_kraus, std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(n_kraus);
  const Matrix v = random_isometry(d_out * n, d_in, rng);
  std::vector<Matrix> kraus;
  for (Eigen::Index k = 0; k < n; ++k) kraus.push_back(v.block(k * d_out, 0, d_out, d_in));
  return ChannelRep(std::move(kraus));
}

Instrument random_instrument(Eigen::Index d, std::size_t n_outcomes, std::size_t kraus_per_outcome,
                             std::mt19937_64& rng) {
  const auto total = static_cast<Eigen::Index>(n_outcomes * kraus_per_outcome);
  const Matrix v = random_isometry(d * total, d, rng);
  std::vector<std::string> labels;
  std::vector<ConditionalOp> ops;
  Eigen::Index k = 0;
  for (std::size_t y = 0; y < n_outcomes; ++y) {
    std::vector<Matrix> kraus;
    for (std::size_t j = 0; j < kraus_per_outcome; ++j, ++k) kraus.push_back(v.block(k * d, 0, d, d));
    labels.push_back(std::to_string(y));
    ops.emplace_back(std::move(kraus));
  }
  return Instrument(std::move(labels), std::move(ops));
}

JointInstrument random_joint_instrument(Eigen::Index d, std::size_t n_alice, std::size_t n_bob,
                                        std::mt19937_64& rng) {
  const auto total = static_cast<Eigen::Index>(n_alice * n_bob);
  const Matrix v = random_isometry(d * total, d, rng);
  std::vector<std::string> alice;
  std::vector<std::string> bob;
  for (std::size_t y = 0; y < n_alice; ++y) alice.push_back(std::to_string(y));
  for (std::size_t u = 0; u < n_bob; ++u) bob.push_back(std::to_string(u));
  std::vector<JointInstrument::Entry> entries;
  Eigen::Index k = 0;
  for (std::size_t y = 0; y < n_alice; ++y) {
    for (std::size_t u = 0; u < n_bob; ++u, ++k) entries.push_back({y, u, v.block(k * d, 0, d, d)});
  }
  return JointInstrument(std::move(alice), std::move(bob), std::move(entries));
}

FilteredGlobalState random_extension(const DensityOperator& gamma, Eigen::Index d_a, std::mt19937_64& rng,
                                     Eigen::Index d_env) {
  const Eigen::Index d_q = gamma.dim();
  const Eigen::Index env = d_env <= 0 ? d_q * d_a : d_env;
  const Vector psi = random_pure(d_q * d_a * env, rng);
  const Matrix full = psi * psi.adjoint();
  // Trace out A', the fastest index.
  const Matrix reduced = partial_trace(full, Dims{d_q * d_a, env}, Keep::Q);
  return correct_marginal(hermitian_part(reduced), Dims{d_q, d_a}, gamma);
}

}  // namespace retrosmooth::sampling
