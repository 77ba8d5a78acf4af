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

#include "retrosmooth/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "retrosmooth/error.hpp"

namespace retrosmooth {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kJacobiTol = 1e-13;

void require_square_finite(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::InvalidMatrix, std::string(what) + " must be a nonempty square matrix");
  }
  if (!m.allFinite()) {
    throw Error(ErrorCode::InvalidMatrix, std::string(what) + " has non-finite entries");
  }
}

Matrix checked_hermitian(const Matrix& m, const char* what) {
  require_square_finite(m, what);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (hermiticity_defect(m) > tol::kHermitian * scale) {
    throw Error(ErrorCode::InvalidMatrix, std::string(what) + " is not Hermitian");
  }
  return hermitian_part(m);
}

Matrix from_spectrum(const EigenDecomposition& eig, const RealVector& values) {
  Matrix out = eig.vectors * values.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  return hermitian_part(out);
}

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != j) sum += std::norm(a(i, j));
    }
  }
  return std::sqrt(sum);
}

// Applies the 2x2 unitary u acting on columns (p, q) from the right.
void rotate_columns(Matrix& a, Eigen::Index p, Eigen::Index q, const Complex u[2][2]) {
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = akp * u[0][0] + akq * u[1][0];
    a(k, q) = akp * u[0][1] + akq * u[1][1];
  }
}

void rotate_rows_adjoint(Matrix& a, Eigen::Index p, Eigen::Index q, const Complex u[2][2]) {
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = std::conj(u[0][0]) * apk + std::conj(u[1][0]) * aqk;
    a(q, k) = std::conj(u[0][1]) * apk + std::conj(u[1][1]) * aqk;
  }
}

}  // namespace

double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

HermitianMatrix::HermitianMatrix(Matrix m) : m_(checked_hermitian(m, "HermitianMatrix")) {}

HermitianMatrix HermitianMatrix::identity(Eigen::Index dim) {
  return HermitianMatrix(Matrix::Identity(dim, dim));
}

DensityOperator::DensityOperator(Matrix m) {
  Matrix h = checked_hermitian(m, "DensityOperator");
  const double trace = h.trace().real();
  if (std::abs(trace - 1.0) > tol::kTrace) {
    throw Error(ErrorCode::InvalidState, "trace " + std::to_string(trace) + " differs from 1");
  }
  EigenDecomposition eig = herm_eig(h);
  const double min_eig = eig.values.minCoeff();
  if (min_eig < -tol::kPsdClamp) {
    throw Error(ErrorCode::InvalidState, "negative eigenvalue " + std::to_string(min_eig));
  }
  if (min_eig < 0.0) {
    h = from_spectrum(eig, eig.values.cwiseMax(0.0));
  }
  m_ = std::move(h);
}

DensityOperator DensityOperator::normalized(const Matrix& m) {
  require_square_finite(m, "DensityOperator");
  const double trace = m.trace().real();
  if (!(trace > 0.0)) {
    throw Error(ErrorCode::InvalidState, "cannot normalize an operator with nonpositive trace");
  }
  return DensityOperator(m / trace);
}

DensityOperator DensityOperator::maximally_mixed(Eigen::Index dim) {
  return DensityOperator(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityOperator DensityOperator::pure(const Vector& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw Error(ErrorCode::InvalidState, "zero state vector");
  const Vector v = psi / norm;
  return DensityOperator(v * v.adjoint());
}

Effect::Effect(Matrix m) {
  Matrix h = checked_hermitian(m, "Effect");
  const RealVector values = herm_eig(h).values;
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  if (values.minCoeff() < -tol::kPsdClamp * scale) {
    throw Error(ErrorCode::NotPSD, "effect has eigenvalue " + std::to_string(values.minCoeff()));
  }
  m_ = std::move(h);
}

Effect Effect::identity(Eigen::Index dim) { return Effect(Matrix::Identity(dim, dim)); }

EigenDecomposition herm_eig(const Matrix& m) {
  Matrix a = checked_hermitian(m, "herm_eig input");
  const Eigen::Index n = a.rows();
  Matrix v = Matrix::Identity(n, n);
  const double norm = a.norm();

  if (norm > 0.0) {
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      if (off_diagonal_norm(a) < kJacobiTol * norm) break;
      for (Eigen::Index p = 0; p < n - 1; ++p) {
        for (Eigen::Index q = p + 1; q < n; ++q) {
          const Complex b = a(p, q);
          const double abs_b = std::abs(b);
          if (abs_b == 0.0) continue;
          const Complex phase = b / abs_b;
          const double app = a(p, p).real();
          const double aqq = a(q, q).real();
          const double tau = (aqq - app) / (2.0 * abs_b);
          const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
          const double c = 1.0 / std::sqrt(1.0 + t * t);
          const double s = t * c;
          // diag(1, conj(phase)) makes the pivot real; the real rotation then zeroes it.
          const Complex u[2][2] = {{c, s}, {-s * std::conj(phase), c * std::conj(phase)}};
          rotate_columns(a, p, q, u);
          rotate_rows_adjoint(a, p, q, u);
          rotate_columns(v, p, q, u);
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          a(p, p) = a(p, p).real();
          a(q, q) = a(q, q).real();
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return a(i, i).real() > a(j, j).real();
  });

  EigenDecomposition out{RealVector(n), Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.values(k) = a(src, src).real();
    Vector col = v.col(src);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mag = std::abs(col(i));
      if (mag > 1e-12) {
        col *= std::conj(col(i)) / mag;
        col(i) = mag;
        break;
      }
    }
    out.vectors.col(k) = col;
  }
  return out;
}

Matrix psd_sqrt(const Matrix& m) {
  const EigenDecomposition eig = herm_eig(m);
  if (eig.values.minCoeff() < -tol::kNotPsd) {
    throw Error(ErrorCode::NotPSD, "eigenvalue " + std::to_string(eig.values.minCoeff()));
  }
  // Eigenvalues below the rank cutoff are round-off; their square roots would not be.
  const double cutoff = tol::kRank * std::max(eig.values(0), 0.0);
  RealVector root = RealVector::Zero(eig.values.size());
  for (Eigen::Index k = 0; k < root.size(); ++k) {
    if (eig.values(k) > cutoff) root(k) = std::sqrt(eig.values(k));
  }
  return from_spectrum(eig, root);
}

Matrix support_inv_sqrt(const Matrix& m) {
  const EigenDecomposition eig = herm_eig(m);
  if (eig.values.minCoeff() < -tol::kNotPsd) {
    throw Error(ErrorCode::NotPSD, "eigenvalue " + std::to_string(eig.values.minCoeff()));
  }
  const double cutoff = tol::kRank * eig.values(0);
  RealVector inv = RealVector::Zero(eig.values.size());
  if (eig.values(0) > 0.0) {
    for (Eigen::Index k = 0; k < inv.size(); ++k) {
      if (eig.values(k) > cutoff) inv(k) = 1.0 / std::sqrt(eig.values(k));
    }
  }
  return from_spectrum(eig, inv);
}

Matrix support_projector(const Matrix& m) {
  const EigenDecomposition eig = herm_eig(m);
  const double cutoff = tol::kRank * eig.values(0);
  RealVector ind = RealVector::Zero(eig.values.size());
  if (eig.values(0) > 0.0) {
    for (Eigen::Index k = 0; k < ind.size(); ++k) {
      if (eig.values(k) > cutoff) ind(k) = 1.0;
    }
  }
  return from_spectrum(eig, ind);
}

Eigen::Index numerical_rank(const Matrix& m) {
  const RealVector values = herm_eig(m).values;
  if (!(values(0) > 0.0)) return 0;
  const double cutoff = tol::kRank * values(0);
  return (values.array() > cutoff).count();
}

Matrix partial_trace(const Matrix& m, Dims dims, Keep keep) {
  if (dims.q <= 0 || dims.a <= 0 || m.rows() != dims.total() || m.cols() != dims.total()) {
    throw Error(ErrorCode::InvalidFactorization,
                "matrix of size " + std::to_string(m.rows()) + " does not factor as " +
                    std::to_string(dims.q) + "x" + std::to_string(dims.a));
  }
  if (keep == Keep::Q) {
    Matrix out = Matrix::Zero(dims.q, dims.q);
    for (Eigen::Index i = 0; i < dims.q; ++i) {
      for (Eigen::Index j = 0; j < dims.q; ++j) {
        Complex s = 0.0;
        for (Eigen::Index k = 0; k < dims.a; ++k) s += m(i * dims.a + k, j * dims.a + k);
        out(i, j) = s;
      }
    }
    return out;
  }
  Matrix out = Matrix::Zero(dims.a, dims.a);
  for (Eigen::Index i = 0; i < dims.a; ++i) {
    for (Eigen::Index j = 0; j < dims.a; ++j) {
      Complex s = 0.0;
      for (Eigen::Index k = 0; k < dims.q; ++k) s += m(k * dims.a + i, k * dims.a + j);
      out(i, j) = s;
    }
  }
  return out;
}

Matrix tensor(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Purification purify(const DensityOperator& rho) {
  const EigenDecomposition eig = herm_eig(rho.matrix());
  const double cutoff = tol::kRank * eig.values(0);
  const Eigen::Index rank = std::max<Eigen::Index>(1, (eig.values.array() > cutoff).count());
  const Eigen::Index d = rho.dim();
  Purification out{Vector::Zero(d * rank), Dims{d, rank}};
  for (Eigen::Index k = 0; k < rank; ++k) {
    const double amp = std::sqrt(std::max(0.0, eig.values(k)));
    for (Eigen::Index q = 0; q < d; ++q) out.psi(q * rank + k) = amp * eig.vectors(q, k);
  }
  return out;
}

double entropy_vn(const Matrix& rho) {
  const RealVector values = herm_eig(rho).values;
  double s = 0.0;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (values(k) > 0.0) s -= values(k) * std::log(values(k));
  }
  return std::max(0.0, s);
}

double entropy_vn(const DensityOperator& rho) { return entropy_vn(rho.matrix()); }

double entropy_shannon(std::span<const double> p) {
  double s = 0.0;
  for (const double x : p) {
    if (!std::isfinite(x) || x < -tol::kPsdClamp) {
      throw Error(ErrorCode::InvalidDistribution, "negative or non-finite probability");
    }
    if (x > 0.0) s -= x * std::log(x);
  }
  return s;
}

double trace_norm(const Matrix& hermitian) {
  return herm_eig(hermitian).values.cwiseAbs().sum();
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  const Matrix s = psd_sqrt(rho.matrix());
  const RealVector values = herm_eig(hermitian_part(s * sigma.matrix() * s)).values;
  double root = 0.0;
  for (Eigen::Index k = 0; k < values.size(); ++k) root += std::sqrt(std::max(0.0, values(k)));
  return std::min(1.0, root * root);
}

double purity(const DensityOperator& rho) {
  return (rho.matrix() * rho.matrix()).trace().real();
}

}  // namespace retrosmooth
