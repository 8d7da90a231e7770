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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "aniso/errors.hpp"
#include "aniso/format.hpp"
#include "aniso/rng.hpp"
#include "aniso/symmat.hpp"
#include "support/oracles.hpp"

using namespace aniso;

namespace {

SymmetricMatrix random_symmetric(Index d, RngStream& rng) {
  Matrix a(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) a(i, j) = rng.normal();
  return SymmetricMatrix(a);
}

SymmetricMatrix random_psd_matrix(Index d, RngStream& rng, Index rank = -1) {
  if (rank < 0) rank = d;
  Matrix a(rank, d);
  for (Index i = 0; i < rank; ++i)
    for (Index j = 0; j < d; ++j) a(i, j) = rng.normal();
  return SymmetricMatrix::gram(a, 1.0 / static_cast<double>(d));
}

}  // namespace

TEST(Rng, SameStreamReplays) {
  RngStream a(42, 3), b(42, 3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  RngStream c(42, 3), d(42, 3);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(c.normal(), d.normal());
}

TEST(Rng, DistinctStreamsDiffer) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t id = 0; id < 1000; ++id) seeds.insert(derive_stream_seed(7, id));
  EXPECT_EQ(seeds.size(), 1000u);
  RngStream a(1, 0), b(1, 1);
  EXPECT_NE(a.next_u64(), b.next_u64());
}

TEST(Rng, StreamsAreUncorrelated) {
  RngStream a(5, 0), b(5, 1);
  const int n = 100000;
  double sab = 0.0;
  for (int i = 0; i < n; ++i) sab += a.normal() * b.normal();
  EXPECT_LT(std::abs(sab / n), 4.0 / std::sqrt(n));
}

TEST(Rng, IndexStaysInRange) {
  RngStream r(9, 9);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(r.index(7), 7u);
}

TEST(Format, RoundTripsSeventeenDigits) {
  RngStream r(3, 0);
  for (int i = 0; i < 1000; ++i) {
    const double x = r.normal() * std::pow(10.0, r.normal() * 20.0);
    EXPECT_EQ(parse_number(format_number(x)), x);
  }
  EXPECT_TRUE(std::isnan(parse_number(format_number(std::nan("")))));
  EXPECT_THROW(parse_number("1.5x"), std::invalid_argument);
}

TEST(SymmetricMatrix, SymmetryIsExact) {
  RngStream r(1, 0);
  const SymmetricMatrix a = random_symmetric(17, r);
  for (Index i = 0; i < 17; ++i)
    for (Index j = 0; j < 17; ++j) EXPECT_EQ(a(i, j), a(j, i));
}

TEST(SymmetricMatrix, RejectsBadShapes) {
  EXPECT_THROW(SymmetricMatrix(0), std::invalid_argument);
  EXPECT_THROW(SymmetricMatrix(Matrix(2, 3)), std::invalid_argument);
}

TEST(EigSym, TwoByTwo) {
  Matrix a(2, 2);
  a << 2, 1, 1, 2;
  const EigenDecomposition e = eig_sym(SymmetricMatrix(a));
  EXPECT_NEAR(e.eigenvalues[0], 3.0, 1e-14);
  EXPECT_NEAR(e.eigenvalues[1], 1.0, 1e-14);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(e.eigenvectors(0, 0)), r, 1e-14);
  EXPECT_NEAR(e.eigenvectors(0, 0) * e.eigenvectors(1, 0), 0.5, 1e-14);
  EXPECT_NEAR(e.eigenvectors(0, 1) * e.eigenvectors(1, 1), -0.5, 1e-14);
}

TEST(EigSym, Identity) {
  const EigenDecomposition e = eig_sym(SymmetricMatrix::identity(6));
  for (Index i = 0; i < 6; ++i) EXPECT_DOUBLE_EQ(e.eigenvalues[i], 1.0);
}

TEST(EigSym, RandomFiftyReconstructsAndMatchesJacobi) {
  RngStream r(2, 0);
  const SymmetricMatrix a = random_symmetric(50, r);
  const EigenDecomposition e = eig_sym(a);
  const Matrix& u = e.eigenvectors;
  const Matrix rec = u * e.eigenvalues.asDiagonal() * u.transpose();
  EXPECT_LE((rec - a.matrix()).norm(), 1e-10 * std::max(1.0, a.frobenius_norm()));
  EXPECT_LE((u.transpose() * u - Matrix::Identity(50, 50)).norm(), 1e-10 * 50);
  for (Index i = 1; i < 50; ++i) EXPECT_GE(e.eigenvalues[i - 1], e.eigenvalues[i]);

  const auto [jvals, jvecs] = oracles::jacobi_eigen(a.matrix());
  EXPECT_LE((jvals - e.eigenvalues).cwiseAbs().maxCoeff(), 1e-10 * a.frobenius_norm());
}

TEST(EigSym, SignConvention) {
  RngStream r(3, 0);
  const EigenDecomposition e = eig_sym(random_symmetric(12, r));
  for (Index c = 0; c < 12; ++c) {
    Index arg = 0;
    e.eigenvectors.col(c).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(e.eigenvectors(arg, c), 0.0);
  }
}

TEST(EigSym, PsdEigenvaluesNonNegative) {
  RngStream r(4, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const SymmetricMatrix a = random_psd_matrix(15, r, 1 + trial % 15);
    EXPECT_GE(eig_sym(a).eigenvalues.minCoeff(), -1e-10 * a.frobenius_norm());
  }
}

TEST(EigFromRows, MatchesDenseSpectrum) {
  RngStream r(5, 0);
  for (Index n : {3, 8, 20}) {
    Matrix rows(n, 8);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < 8; ++j) rows(i, j) = r.normal();
    const EigenDecomposition dense = eig_sym(SymmetricMatrix::gram(rows, 0.5));
    const EigenDecomposition fast = eig_from_rows(rows, 0.5);
    for (Index i = 0; i < fast.size(); ++i) {
      if (fast.eigenvalues[i] < 1e-9) continue;
      EXPECT_NEAR(fast.eigenvalues[i], dense.eigenvalues[i], 1e-10);
      EXPECT_NEAR(std::abs(fast.eigenvectors.col(i).dot(dense.eigenvectors.col(i))), 1.0, 1e-8);
    }
  }
}

TEST(MatExp, ClosedForms) {
  EXPECT_LE((mat_exp_sym(SymmetricMatrix(3)).matrix() - Matrix::Identity(3, 3)).norm(), 1e-15);
  Vector d(2);
  d << std::log(2.0), 0.0;
  const SymmetricMatrix e = mat_exp_sym(SymmetricMatrix::diagonal(d));
  EXPECT_NEAR(e(0, 0), 2.0, 1e-14);
  EXPECT_NEAR(e(1, 1), 1.0, 1e-14);
  EXPECT_NEAR(e(0, 1), 0.0, 1e-14);
}

TEST(MatExp, MatchesSeries) {
  Matrix a(2, 2);
  a << 0, 0.3, 0.3, 0;
  const SymmetricMatrix e = mat_exp_sym(SymmetricMatrix(a));
  const Matrix s = oracles::series_exp(a);
  EXPECT_LE((e.matrix() - s).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(e(0, 0), std::cosh(0.3), 1e-12);
  EXPECT_NEAR(e(0, 1), std::sinh(0.3), 1e-12);

  RngStream r(6, 0);
  const SymmetricMatrix b = random_symmetric(6, r);
  EXPECT_LE(oracles::rel_error(mat_exp_sym(b).matrix(), oracles::series_exp(b.matrix())), 1e-11);
}

TEST(MatExp, CommutesWithArgument) {
  RngStream r(7, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const SymmetricMatrix a = random_symmetric(8, r);
    const Matrix e = mat_exp_sym(a).matrix();
    const Matrix comm = a.matrix() * e - e * a.matrix();
    EXPECT_LE(comm.norm(), 1e-9 * a.frobenius_norm() * e.norm());
  }
}

TEST(MatExp, Overflow) {
  EXPECT_THROW(mat_exp_sym(SymmetricMatrix::identity(2) * 1000.0), OverflowError);
}

TEST(PsdSqrt, ClosedFormsAndRandom) {
  Vector d(2);
  d << 4.0, 9.0;
  const SymmetricMatrix s = psd_sqrt(SymmetricMatrix::diagonal(d));
  EXPECT_NEAR(s(0, 0), 2.0, 1e-14);
  EXPECT_NEAR(s(1, 1), 3.0, 1e-14);
  EXPECT_LE((psd_sqrt(SymmetricMatrix::identity(4)).matrix() - Matrix::Identity(4, 4)).norm(), 1e-14);

  RngStream r(8, 0);
  const SymmetricMatrix a = random_psd_matrix(20, r);
  const Matrix root = psd_sqrt(a).matrix();
  EXPECT_LE((root * root - a.matrix()).norm(), 1e-9 * a.frobenius_norm());
  EXPECT_GE(eig_sym(SymmetricMatrix(root)).eigenvalues.minCoeff(), -1e-12);
}

TEST(PsdSqrt, ClampsRoundingButRejectsIndefinite) {
  Vector d(3);
  d << 1.0, 0.5, -1e-13;
  EXPECT_NO_THROW(psd_sqrt(SymmetricMatrix::diagonal(d)));
  d[2] = -0.1;
  try {
    psd_sqrt(SymmetricMatrix::diagonal(d));
    FAIL() << "expected NotPsdError";
  } catch (const NotPsdError& e) {
    EXPECT_NEAR(e.eigenvalue(), -0.1, 1e-15);
  }
}

TEST(LowRankTruncate, Diagonal) {
  Vector d(3);
  d << 3.0, 2.0, 1.0;
  const SymmetricMatrix t = low_rank_truncate(SymmetricMatrix::diagonal(d), 1);
  Matrix expected = Matrix::Zero(3, 3);
  expected(0, 0) = 3.0;
  EXPECT_LE((t.matrix() - expected).norm(), 1e-14);
  EXPECT_THROW(low_rank_truncate(SymmetricMatrix::diagonal(d), 0), std::invalid_argument);
  EXPECT_THROW(low_rank_truncate(SymmetricMatrix::diagonal(d), 4), std::invalid_argument);
}

TEST(LowRankTruncate, TailEnergy) {
  RngStream r(9, 0);
  const SymmetricMatrix a = random_psd_matrix(12, r);
  const auto [vals, vecs] = oracles::jacobi_eigen(a.matrix());
  for (Index k = 1; k <= 12; ++k) {
    const double residual = (a.matrix() - low_rank_truncate(a, k).matrix()).squaredNorm();
    const double tail = vals.tail(12 - k).squaredNorm();
    EXPECT_NEAR(residual, tail, 1e-9 * std::max(1.0, a.frobenius_norm() * a.frobenius_norm()));
  }
  EXPECT_LE((low_rank_truncate(a, 12).matrix() - a.matrix()).norm(), 1e-10 * a.frobenius_norm());
}

TEST(LowRankTruncate, BeatsRandomRankKCandidates) {
  RngStream r(10, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const SymmetricMatrix a = random_psd_matrix(3, r);
    for (Index k = 1; k <= 2; ++k) {
      const double best = (a.matrix() - low_rank_truncate(a, k).matrix()).norm();
      for (int c = 0; c < 200; ++c) {
        Matrix cand = Matrix::Zero(3, 3);
        for (Index i = 0; i < k; ++i) {
          const Vector v = r.normal_vector(3);
          cand += r.normal() * v * v.transpose();
        }
        EXPECT_LE(best, (a.matrix() - cand).norm() + 1e-12);
      }
    }
  }
}

TEST(SampleGaussian, RankOneSupport) {
  Vector u(3);
  u << 1.0, 2.0, -2.0;
  u /= 3.0;
  LowRankFactor f{u};
  RngStream r(11, 0);
  for (int i = 0; i < 100; ++i) {
    const Vector x = sample_gaussian(f, r);
    EXPECT_LE((x - x.dot(u) * u).norm(), 1e-14 * std::max(1.0, x.norm()));
  }
  const SymmetricMatrix s = psd_sqrt(SymmetricMatrix::outer(u));
  for (int i = 0; i < 100; ++i) {
    const Vector x = sample_gaussian(s, r);
    EXPECT_LE((x - x.dot(u) * u).norm(), 1e-7 * std::max(1.0, x.norm()));
  }
}

TEST(SampleGaussian, IdentityMoments) {
  RngStream r(12, 0);
  const SymmetricMatrix s = SymmetricMatrix::identity(3);
  const int n = 100000;
  Matrix acc = Matrix::Zero(3, 3);
  for (int i = 0; i < n; ++i) {
    const Vector x = sample_gaussian(s, r);
    acc += x * x.transpose();
  }
  acc /= n;
  EXPECT_LE((acc - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 0.05);
}

TEST(SampleGaussian, CovarianceMomentBound) {
  RngStream r(13, 0);
  const SymmetricMatrix sigma = random_psd_matrix(4, r);
  const SymmetricMatrix root = psd_sqrt(sigma);
  const int n = 100000;
  Matrix acc = Matrix::Zero(4, 4);
  for (int i = 0; i < n; ++i) {
    const Vector x = sample_gaussian(root, r);
    acc += x * x.transpose();
  }
  acc /= n;
  const double max_diag = sigma.diagonal_entries().maxCoeff();
  EXPECT_LE((acc - sigma.matrix()).cwiseAbs().maxCoeff(), 5.0 * std::sqrt(max_diag * max_diag / n) * 3.0);
}

TEST(SampleGaussian, Deterministic) {
  RngStream a(14, 2), b(14, 2);
  const SymmetricMatrix s = SymmetricMatrix::identity(5);
  EXPECT_EQ(sample_gaussian(s, a), sample_gaussian(s, b));
}

TEST(LowRankFactor, LeadingFactorDense) {
  RngStream r(15, 0);
  const SymmetricMatrix a = random_psd_matrix(7, r);
  const LowRankFactor f = leading_factor(eig_sym(a), 3);
  EXPECT_EQ(f.rank(), 3);
  EXPECT_LE((f.dense().matrix() - low_rank_truncate(a, 3).matrix()).norm(), 1e-12);
  EXPECT_NEAR(f.trace(), f.dense().trace(), 1e-12);
}

TEST(TraceProduct, MatchesDenseProduct) {
  RngStream r(16, 0);
  const SymmetricMatrix a = random_symmetric(9, r), b = random_symmetric(9, r);
  EXPECT_NEAR(trace_product(a, b), (a.matrix() * b.matrix()).trace(), 1e-12);
}
