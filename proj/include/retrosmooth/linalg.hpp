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

#include <complex>
#include <span>

#include <Eigen/Dense>

namespace retrosmooth {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
// Negative eigenvalues down to -kPsdClamp are treated as round-off and clamped.
inline constexpr double kPsdClamp = 1e-10;
// Anything more negative than -kNotPsd is a genuine sign error.
inline constexpr double kNotPsd = 1e-6;
inline constexpr double kTrace = 1e-10;
// Eigenvalues at or below kRank * lambda_max are outside the support.
inline constexpr double kRank = 1e-10;
// Relative anti-Hermitian part tolerated (and removed) on construction.
inline constexpr double kHermitian = 1e-9;
}  // namespace tol

/// Generic Hermitian operator. Construction checks finiteness, rejects
/// matrices whose anti-Hermitian part exceeds tol::kHermitian relative to the
/// norm, and symmetrizes the rest away.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(Matrix m);

  static HermitianMatrix identity(Eigen::Index dim);

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

/// Hermitian, positive semidefinite, unit trace. Eigenvalues in
/// [-tol::kPsdClamp, 0) are clamped to zero on construction.
class DensityOperator {
 public:
  DensityOperator() = default;
  explicit DensityOperator(Matrix m);

  /// Divides by the trace first; the trace must be positive.
  static DensityOperator normalized(const Matrix& m);
  static DensityOperator maximally_mixed(Eigen::Index dim);
  static DensityOperator pure(const Vector& psi);

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

/// Hermitian positive semidefinite operator with no trace constraint.
class Effect {
 public:
  Effect() = default;
  explicit Effect(Matrix m);

  static Effect identity(Eigen::Index dim);

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

struct EigenDecomposition {
  RealVector values;  // descending
  Matrix vectors;     // columns; first nonzero component of each is real positive
};

/// Cyclic Jacobi diagonalization. Sweeps run in fixed (p, q) order until the
/// off-diagonal Frobenius norm drops below 1e-13 * ||m||_F.
EigenDecomposition herm_eig(const Matrix& m);

Matrix psd_sqrt(const Matrix& m);

/// Pseudo-inverse square root restricted to the support of m.
Matrix support_inv_sqrt(const Matrix& m);

/// Orthogonal projector onto the span of eigenvectors above the rank cutoff.
Matrix support_projector(const Matrix& m);

Eigen::Index numerical_rank(const Matrix& m);

struct Dims {
  Eigen::Index q = 1;
  Eigen::Index a = 1;
  Eigen::Index total() const { return q * a; }
};

enum class Keep { Q, A };

/// Partial trace on Q (x) A with Q the slow index.
Matrix partial_trace(const Matrix& m, Dims dims, Keep keep);

/// Kronecker product, first factor slowest.
Matrix tensor(const Matrix& a, const Matrix& b);

struct Purification {
  Vector psi;  // on Q (x) A
  Dims dims;
};

/// sum_k sqrt(lambda_k) |v_k>_Q |k>_A over the support, eigenvalues descending.
Purification purify(const DensityOperator& rho);

/// Von Neumann entropy in nats.
double entropy_vn(const Matrix& rho);
double entropy_vn(const DensityOperator& rho);

/// Shannon entropy in nats.
double entropy_shannon(std::span<const double> p);

/// Sum of absolute eigenvalues of a Hermitian matrix.
double trace_norm(const Matrix& hermitian);

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const DensityOperator& rho, const DensityOperator& sigma);

double purity(const DensityOperator& rho);

/// Largest absolute deviation from Hermiticity.
double hermiticity_defect(const Matrix& m);

Matrix hermitian_part(const Matrix& m);

}  // namespace retrosmooth
