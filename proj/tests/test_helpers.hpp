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

#include <cmath>
#include <random>

#include "retrosmooth/linalg.hpp"
#include "retrosmooth/trajectory.hpp"

namespace retrosmooth::testing {

inline Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

// |0><1|: lowers the excited state |1> to the ground state |0>.
inline Matrix sigma_minus() {
  Matrix m(2, 2);
  m << 0.0, 1.0, 0.0, 0.0;
  return m;
}

inline Matrix diag(std::initializer_list<double> values) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const double v : values) m(i, i) = v, ++i;
  return m;
}

inline Vector ket(std::initializer_list<Complex> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const Complex c : values) v(i++) = c;
  return v;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

/// Driven, damped qubit: H = omega X / 2, one decay channel sqrt(kappa) sigma_-.
inline LindbladSpec driven_decay(double omega, double kappa, double efficiency, double dt) {
  LindbladSpec spec;
  spec.hamiltonian = 0.5 * omega * pauli_x();
  spec.channels.push_back({"decay", std::sqrt(kappa) * sigma_minus(), efficiency, Detection::JumpLike});
  spec.dt = dt;
  return spec;
}

}  // namespace retrosmooth::testing
