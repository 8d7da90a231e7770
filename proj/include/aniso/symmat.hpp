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

#pragma once

#include <Eigen/Core>

#include "aniso/rng.hpp"

namespace aniso {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dense symmetric matrix. Symmetry is exact: the constructor stores
/// (A + A^T) / 2, which evaluates bit-identically for (i, j) and (j, i).
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(Index dim);
  explicit SymmetricMatrix(const Matrix& a);

  static SymmetricMatrix identity(Index dim);
  static SymmetricMatrix diagonal(const Vector& d);
  // scale * v v^T
  static SymmetricMatrix outer(const Vector& v, double scale = 1.0);
  // scale * rows^T rows, for an (n x dim) row stack
  static SymmetricMatrix gram(const Matrix& rows, double scale = 1.0);

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

  double trace() const { return m_.trace(); }
  double frobenius_norm() const { return m_.norm(); }
  Vector diagonal_entries() const { return m_.diagonal(); }

  SymmetricMatrix operator+(const SymmetricMatrix& o) const;
  SymmetricMatrix operator-(const SymmetricMatrix& o) const;
  SymmetricMatrix operator*(double s) const;

 private:
  struct Trusted {};
  SymmetricMatrix(Matrix m, Trusted) : m_(std::move(m)) {}
  Matrix m_;
};

inline SymmetricMatrix operator*(double s, const SymmetricMatrix& a) { return a * s; }

// Tr(A B) for symmetric A, B without forming the product.
double trace_product(const SymmetricMatrix& a, const SymmetricMatrix& b);

/// Eigenpairs sorted by descending eigenvalue. Column i of `eigenvectors`
/// pairs with eigenvalues[i]; the largest-magnitude entry of every column is
/// positive (lowest index wins ties).
struct EigenDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;

  Index size() const { return eigenvalues.size(); }
};

EigenDecomposition eig_sym(const SymmetricMatrix& a);

/// Nonzero spectrum of scale * rows^T rows computed through whichever of the
/// Gram (n x n) or covariance (dim x dim) forms is smaller. Returns
/// min(n, dim) eigenpairs; with n < dim the omitted eigenvalues are zero.
EigenDecomposition eig_from_rows(const Matrix& rows, double scale);

SymmetricMatrix mat_exp_sym(const SymmetricMatrix& a);

// Symmetric PSD square root. Eigenvalues down to -1e-10 * ||A||_F are
// treated as rounding and clamped to zero.
SymmetricMatrix psd_sqrt(const SymmetricMatrix& a);

SymmetricMatrix low_rank_truncate(const SymmetricMatrix& a, Index k);

/// Factorised covariance sum_i w_i^2 v_i v_i^T, stored as the (dim x r)
/// matrix F = [w_1 v_1, ..., w_r v_r] so that Sigma = F F^T.
struct LowRankFactor {
  Matrix columns;

  Index dim() const { return columns.rows(); }
  Index rank() const { return columns.cols(); }
  double trace() const { return columns.squaredNorm(); }
  SymmetricMatrix dense() const;
};

// Leading-k factor of a PSD decomposition; negative eigenvalues clamp to zero.
LowRankFactor leading_factor(const EigenDecomposition& eig, Index k);

// Draw from N(0, S S) given the symmetric square root S.
Vector sample_gaussian(const SymmetricMatrix& sqrt_factor, RngStream& rng);
// Draw from N(0, F F^T) as sum_i F_i z_i, using rank() normals.
Vector sample_gaussian(const LowRankFactor& factor, RngStream& rng);

double min_eigenvalue(const SymmetricMatrix& a);
double spectral_norm(const SymmetricMatrix& a);

}  // namespace aniso
