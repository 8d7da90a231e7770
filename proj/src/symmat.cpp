/*
   Copyright 2026 The aniso-lab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "aniso/symmat.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "aniso/errors.hpp"

namespace aniso {

namespace {

std::string dim_label(Index n) { return std::to_string(n) + "x" + std::to_string(n); }

// Make the largest-magnitude entry of each column positive.
void fix_signs(Matrix& vecs) {
  for (Index c = 0; c < vecs.cols(); ++c) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index r = 0; r < vecs.rows(); ++r) {
      const double v = std::abs(vecs(r, c));
      if (v > best_abs) {
        best_abs = v;
        best = r;
      }
    }
    if (vecs(best, c) < 0.0) vecs.col(c) *= -1.0;
  }
}

double psd_tolerance(const SymmetricMatrix& a) { return 1e-10 * a.frobenius_norm(); }

void require_psd(const EigenDecomposition& eig, const SymmetricMatrix& a, const char* who) {
  if (eig.size() == 0) return;
  const double lo = eig.eigenvalues[eig.size() - 1];
  if (lo < -psd_tolerance(a)) {
    throw NotPsdError(std::string(who) + ": matrix is not positive semi-definite (eigenvalue " +
                          std::to_string(lo) + ")",
                      lo);
  }
}

}  // namespace

SymmetricMatrix::SymmetricMatrix(Index dim) : m_(Matrix::Zero(dim, dim)) {
  if (dim < 1) throw std::invalid_argument("SymmetricMatrix: dimension must be >= 1");
}

SymmetricMatrix::SymmetricMatrix(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("SymmetricMatrix: matrix is not square (" +
                                std::to_string(a.rows()) + " x " + std::to_string(a.cols()) + ")");
  }
  if (a.rows() < 1) throw std::invalid_argument("SymmetricMatrix: dimension must be >= 1");
  m_ = 0.5 * (a + a.transpose());
}

SymmetricMatrix SymmetricMatrix::identity(Index dim) {
  if (dim < 1) throw std::invalid_argument("SymmetricMatrix: dimension must be >= 1");
  return SymmetricMatrix(Matrix::Identity(dim, dim), Trusted{});
}

SymmetricMatrix SymmetricMatrix::diagonal(const Vector& d) {
  if (d.size() < 1) throw std::invalid_argument("SymmetricMatrix: dimension must be >= 1");
  return SymmetricMatrix(Matrix(d.asDiagonal()), Trusted{});
}

SymmetricMatrix SymmetricMatrix::outer(const Vector& v, double scale) {
  return SymmetricMatrix(Matrix(scale * v * v.transpose()));
}

SymmetricMatrix SymmetricMatrix::gram(const Matrix& rows, double scale) {
  if (rows.cols() < 1) throw std::invalid_argument("SymmetricMatrix::gram: zero columns");
  Matrix g = Matrix::Zero(rows.cols(), rows.cols());
  g.selfadjointView<Eigen::Lower>().rankUpdate(rows.transpose(), scale);
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return SymmetricMatrix(std::move(g), Trusted{});
}

SymmetricMatrix SymmetricMatrix::operator+(const SymmetricMatrix& o) const {
  return SymmetricMatrix(Matrix(m_ + o.m_), Trusted{});
}

SymmetricMatrix SymmetricMatrix::operator-(const SymmetricMatrix& o) const {
  return SymmetricMatrix(Matrix(m_ - o.m_), Trusted{});
}

SymmetricMatrix SymmetricMatrix::operator*(double s) const {
  return SymmetricMatrix(Matrix(s * m_), Trusted{});
}

double trace_product(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("trace_product: dimension mismatch");
  return a.matrix().cwiseProduct(b.matrix()).sum();
}

EigenDecomposition eig_sym(const SymmetricMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eig_sym: eigensolver did not converge for " + dim_label(a.dim()) +
                         " matrix");
  }
  EigenDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  fix_signs(out.eigenvectors);
  return out;
}

EigenDecomposition eig_from_rows(const Matrix& rows, double scale) {
  const Index n = rows.rows();
  const Index dim = rows.cols();
  if (n >= dim || n == 0) return eig_sym(SymmetricMatrix::gram(rows, scale));

  // K = scale R R^T shares the nonzero spectrum of scale R^T R; if K w = g w
  // then v = R^T w sqrt(scale / g) is the unit eigenvector in parameter space.
  const EigenDecomposition small = eig_sym(SymmetricMatrix::gram(rows.transpose(), scale));
  const double top = small.size() > 0 ? std::max(small.eigenvalues[0], 0.0) : 0.0;
  Index keep = 0;
  while (keep < small.size() && small.eigenvalues[keep] > 1e-12 * top) ++keep;

  EigenDecomposition out;
  out.eigenvalues = small.eigenvalues.head(keep);
  out.eigenvectors.resize(dim, keep);
  for (Index i = 0; i < keep; ++i) {
    out.eigenvectors.col(i) =
        rows.transpose() * small.eigenvectors.col(i) * std::sqrt(scale / small.eigenvalues[i]);
  }
  fix_signs(out.eigenvectors);
  return out;
}

SymmetricMatrix mat_exp_sym(const SymmetricMatrix& a) {
  const EigenDecomposition eig = eig_sym(a);
  const double limit = std::log(std::numeric_limits<double>::max());
  if (eig.eigenvalues[0] > limit) {
    throw OverflowError("mat_exp_sym: eigenvalue " + std::to_string(eig.eigenvalues[0]) +
                        " overflows the exponential");
  }
  const Vector e = eig.eigenvalues.array().exp().matrix();
  return SymmetricMatrix(Matrix(eig.eigenvectors * e.asDiagonal() * eig.eigenvectors.transpose()));
}

SymmetricMatrix psd_sqrt(const SymmetricMatrix& a) {
  const EigenDecomposition eig = eig_sym(a);
  require_psd(eig, a, "psd_sqrt");
  const Vector r = eig.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  return SymmetricMatrix(Matrix(eig.eigenvectors * r.asDiagonal() * eig.eigenvectors.transpose()));
}

SymmetricMatrix low_rank_truncate(const SymmetricMatrix& a, Index k) {
  if (k < 1 || k > a.dim()) {
    throw std::invalid_argument("low_rank_truncate: k must lie in [1, " + std::to_string(a.dim()) +
                                "], got " + std::to_string(k));
  }
  const EigenDecomposition eig = eig_sym(a);
  require_psd(eig, a, "low_rank_truncate");
  return leading_factor(eig, k).dense();
}

SymmetricMatrix LowRankFactor::dense() const {
  if (columns.cols() == 0) return SymmetricMatrix(columns.rows());
  return SymmetricMatrix::gram(columns.transpose());
}

LowRankFactor leading_factor(const EigenDecomposition& eig, Index k) {
  const Index r = std::min(k, eig.size());
  LowRankFactor f;
  f.columns.resize(eig.eigenvectors.rows(), r);
  for (Index i = 0; i < r; ++i) {
    f.columns.col(i) = eig.eigenvectors.col(i) * std::sqrt(std::max(eig.eigenvalues[i], 0.0));
  }
  return f;
}

Vector sample_gaussian(const SymmetricMatrix& sqrt_factor, RngStream& rng) {
  return sqrt_factor.matrix() * rng.normal_vector(sqrt_factor.dim());
}

Vector sample_gaussian(const LowRankFactor& factor, RngStream& rng) {
  if (factor.rank() == 0) return Vector::Zero(factor.dim());
  return factor.columns * rng.normal_vector(factor.rank());
}

double min_eigenvalue(const SymmetricMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("min_eigenvalue: eigensolver did not converge for " + dim_label(a.dim()) +
                         " matrix");
  }
  return solver.eigenvalues()[0];
}

double spectral_norm(const SymmetricMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("spectral_norm: eigensolver did not converge for " + dim_label(a.dim()) +
                         " matrix");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace aniso
