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
#include <sstream>

#include <Eigen/LU>

#include "aniso/dataset.hpp"
#include "aniso/losses.hpp"
#include "support/oracles.hpp"

using namespace aniso;

namespace {

Dataset origin_dataset() { return single_point_dataset(Vector::Zero(2)); }

Dataset random_net_data(Index n, Index p, RngStream& rng) {
  Dataset d;
  d.inputs.resize(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) d.inputs(i, j) = rng.normal();
  for (Index i = 0; i < n; ++i) d.labels.push_back(rng.uniform() < 0.5 ? 0 : 1);
  return d;
}

// Smallest |pre-activation| over the data, to stay clear of kinks.
double kink_distance(const OneHiddenNet& net, const Vector& theta) {
  const Dataset& d = *net.dataset();
  const Index h = net.hidden(), p = net.input_dim();
  double best = HUGE_VAL;
  for (Index i = 0; i < d.size(); ++i) {
    for (Index u = 0; u < h; ++u) {
      double pre = theta[h * p + u];
      for (Index j = 0; j < p; ++j) pre += theta[u * p + j] * d.inputs(i, j);
      best = std::min(best, std::abs(pre));
    }
  }
  return best;
}

}  // namespace

TEST(PhiDerivatives, SymmetryPoint) {
  const PhiDerivatives a = phi_derivatives(0.0, 0);
  EXPECT_NEAR(a.loss, std::log(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(a.first, 0.5);
  EXPECT_DOUBLE_EQ(a.second, 0.25);
  EXPECT_DOUBLE_EQ(phi_derivatives(0.0, 1).first, -0.5);
}

TEST(PhiDerivatives, RatioIdentity) {
  for (double f : {0.3, 1.0, 2.0, 5.0}) {
    const PhiDerivatives d = phi_derivatives(f, 0);
    EXPECT_NEAR(d.second / (d.first * d.first), std::exp(-f), 1e-14 * std::exp(-f) * 10);
  }
}

TEST(PhiDerivatives, MatchesNaiveFormulaAndFiniteDifferences) {
  for (double f : {-4.0, -0.7, 0.2, 3.0}) {
    for (int y : {0, 1}) {
      const PhiDerivatives d = phi_derivatives(f, y);
      EXPECT_NEAR(d.loss, oracles::naive_bce(f, y), 1e-12);
      const double h = 1e-5;
      EXPECT_NEAR(d.first, (oracles::naive_bce(f + h, y) - oracles::naive_bce(f - h, y)) / (2 * h), 1e-8);
      const double fd2 =
          (oracles::naive_bce(f + h, y) - 2 * oracles::naive_bce(f, y) + oracles::naive_bce(f - h, y)) / (h * h);
      EXPECT_NEAR(d.second, fd2, 1e-4);
    }
  }
}

TEST(PhiDerivatives, StableForLargeLogits) {
  const PhiDerivatives a = phi_derivatives(800.0, 0);
  EXPECT_NEAR(a.loss, 800.0, 1e-9);
  EXPECT_DOUBLE_EQ(a.first, 1.0);
  EXPECT_GE(a.second, 0.0);
  const PhiDerivatives b = phi_derivatives(-800.0, 0);
  EXPECT_EQ(b.loss, 0.0);
  EXPECT_TRUE(std::isfinite(phi_derivatives(-800.0, 1).loss));
  EXPECT_NEAR(phi_derivatives(40.0, 1).loss, std::exp(-40.0), 1e-25);
}

TEST(Toy2d, BothMinimaAtOrigin) {
  const Toy2dSurface s(origin_dataset());
  EXPECT_LE(s.loss(kSharpMinimum), 1e-12);
  EXPECT_LE(s.loss(kFlatMinimum), 1e-12);
  EXPECT_LE(s.gradient(kSharpMinimum).norm(), 1e-12);
}

TEST(Toy2d, HessiansAtTheMinima) {
  const Toy2dSurface s(origin_dataset());
  const EigenDecomposition sharp = eig_sym(s.hessian(kSharpMinimum));
  EXPECT_NEAR(sharp.eigenvalues[0], 200.0, 1e-12);
  EXPECT_NEAR(sharp.eigenvalues[1], 20.0, 1e-12);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(sharp.eigenvectors(0, 0)), r, 1e-12);
  EXPECT_NEAR(sharp.eigenvectors(0, 0) * sharp.eigenvectors(1, 0), 0.5, 1e-12);
  const SymmetricMatrix flat = s.hessian(kFlatMinimum);
  EXPECT_LE((flat.matrix() - 2.0 * Matrix::Identity(2, 2)).norm(), 1e-14);
  EXPECT_EQ(flat(0, 1), flat(1, 0));

  const auto fd = oracles::fd_hessian([&s](const Vector& w) { return s.gradient(w); }, kSharpMinimum);
  EXPECT_LE(oracles::rel_error(s.hessian(kSharpMinimum).matrix(), fd), 1e-6);
}

TEST(Toy2d, TiesTakeTheSharpBranch) {
  // Solve for a point where both branches agree: along w = x + c(1,1) the
  // quadric is 100*2(c-1)^2 and the paraboloid 2(c+1)^2.
  const double c = (101.0 - std::sqrt(101.0 * 101.0 - 99.0 * 99.0)) / 99.0;
  const Toy2dExample e = toy2d_example(Eigen::Vector2d(c, c), Eigen::Vector2d::Zero());
  EXPECT_NEAR(e.branch_gap, 0.0, 1e-12);
  const Toy2dHessian h = toy2d_hessian(Vector(Eigen::Vector2d(c, c)), origin_dataset());
  EXPECT_TRUE(h.near_boundary);
}

TEST(Toy2d, FiniteDifferenceGradient) {
  const Dataset data = make_toy2d_dataset({100, 7, ToyDataCovariance::identity});
  const Toy2dSurface s(data);
  const Vector w = Eigen::Vector2d(0.5, 0.3);
  const Vector fd = oracles::fd_gradient([&s](const Vector& x) { return s.loss(x); }, w);
  EXPECT_LE((fd - s.gradient(w)).norm() / s.gradient(w).norm(), 1e-5);
}

TEST(Toy2d, ExampleGradientsAverageToTheGradient) {
  const Toy2dSurface s(make_toy2d_dataset({50, 3, ToyDataCovariance::quadric_inverse}));
  const Vector w = Eigen::Vector2d(0.2, -0.4);
  const ExampleGradients eg = s.example_gradients(w);
  EXPECT_LE((eg.per_example.colwise().mean().transpose() - s.gradient(w)).norm(), 1e-12 * s.gradient(w).norm());
  EXPECT_NEAR(eg.loss, s.loss(w), 1e-12);
}

TEST(Quadratic, ValueGradientHessian) {
  Matrix a(2, 2);
  a << 3, 1, 1, 2;
  Vector c(2);
  c << 1, -1;
  const QuadraticSurface q(SymmetricMatrix(a), c);
  Vector th(2);
  th << 0.5, 0.25;
  const Vector d = th - c;
  EXPECT_NEAR(q.loss(th), 0.5 * d.dot(a * d), 1e-15);
  EXPECT_LE((q.gradient(th) - a * d).norm(), 1e-15);
  EXPECT_EQ(q.dataset(), nullptr);
  EXPECT_THROW(q.example_gradients(th), std::logic_error);
}

TEST(OneHiddenNet, ForwardJacobianSingleUnit) {
  Dataset d = single_point_dataset((Vector(2) << 2.0, 3.0).finished());
  const OneHiddenNet net(1, Vector::Ones(1), d);
  Vector th(3);
  th << 1.0, 0.0, 0.0;
  const auto fj = net.forward_jacobian(th, d.inputs.row(0).transpose());
  EXPECT_DOUBLE_EQ(fj.f, 2.0);
  EXPECT_EQ(fj.jacobian, (Vector(3) << 2.0, 3.0, 1.0).finished());
}

TEST(OneHiddenNet, DeadRegion) {
  Dataset d = single_point_dataset((Vector(2) << 1.0, 1.0).finished());
  const OneHiddenNet net(2, OneHiddenNet::alternating_output_weights(2), d);
  const Vector th = -Vector::Ones(net.dim());
  const auto fj = net.forward_jacobian(th, d.inputs.row(0).transpose());
  EXPECT_EQ(fj.f, 0.0);
  EXPECT_EQ(fj.jacobian.norm(), 0.0);
  // Exactly-zero pre-activation is inactive.
  Vector zero = Vector::Zero(net.dim());
  EXPECT_EQ(net.forward_jacobian(zero, d.inputs.row(0).transpose()).jacobian.norm(), 0.0);
}

TEST(OneHiddenNet, AlternatingOutputWeights) {
  const Vector v = OneHiddenNet::alternating_output_weights(4);
  EXPECT_DOUBLE_EQ(v[0], 0.5);
  EXPECT_DOUBLE_EQ(v[1], -0.5);
  EXPECT_DOUBLE_EQ(v[2], 0.5);
  EXPECT_DOUBLE_EQ(v[3], -0.5);
}

TEST(OneHiddenNet, FiniteDifferenceJacobianGradientHessian) {
  RngStream rng(21, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const Dataset d = random_net_data(12, 4, rng);
    const OneHiddenNet net(5, OneHiddenNet::alternating_output_weights(5), d);
    Vector th = net.initial_parameters(rng);
    if (kink_distance(net, th) < 1e-3) continue;
    const Vector x = d.inputs.row(0).transpose();
    const Vector fd_j =
        oracles::fd_gradient([&](const Vector& t) { return net.forward_jacobian(t, x).f; }, th);
    EXPECT_LE((fd_j - net.forward_jacobian(th, x).jacobian).norm(), 1e-5 * std::max(1.0, fd_j.norm()));

    const Vector g = net.gradient(th);
    const Vector fd_g = oracles::fd_gradient([&](const Vector& t) { return net.loss(t); }, th);
    EXPECT_LE((fd_g - g).norm() / g.norm(), 1e-5);

    // Away from kinks the Gauss-Newton matrix is the Hessian.
    const Matrix fd_h = oracles::fd_hessian([&](const Vector& t) { return net.gradient(t); }, th, 1e-6);
    EXPECT_LE(oracles::rel_error(net.hessian(th).matrix(), fd_h), 1e-4);
  }
}

TEST(OneHiddenNet, HessianEigenMatchesDense) {
  RngStream rng(22, 0);
  const Dataset d = random_net_data(6, 5, rng);
  const OneHiddenNet net(4, OneHiddenNet::alternating_output_weights(4), d);
  const Vector th = net.initial_parameters(rng);
  const EigenDecomposition dense = eig_sym(net.hessian(th));
  const EigenDecomposition fast = net.hessian_eigen(th);
  for (Index i = 0; i < fast.size(); ++i) EXPECT_NEAR(fast.eigenvalues[i], dense.eigenvalues[i], 1e-12);
}

TEST(GaussNewton, SingleExampleScalarFormulas) {
  Dataset d = single_point_dataset((Vector(2) << 2.0, 3.0).finished(), 0);
  const OneHiddenNet net(1, Vector::Ones(1), d);
  Vector th(3);
  th << 1.0, 0.0, 0.0;
  const GaussNewton gn = gauss_newton_matrices(net, th, d);
  const Vector j = (Vector(3) << 2.0, 3.0, 1.0).finished();
  const double s = 1.0 / (1.0 + std::exp(-2.0));
  EXPECT_NEAR(s * (1 - s), 0.104994, 1e-6);
  EXPECT_NEAR(s, 0.880797, 1e-6);
  EXPECT_LE((gn.hessian.matrix() - s * (1 - s) * j * j.transpose()).norm(), 1e-14);
  EXPECT_LE((gn.fisher.matrix() - s * s * j * j.transpose()).norm(), 1e-14);
  EXPECT_DOUBLE_EQ(gn.c_hat, 2.0);
  EXPECT_LE((gn.hessian.matrix() - std::exp(-2.0) * gn.fisher.matrix()).norm(), 1e-14);
}

TEST(GaussNewton, DeadNetIsZero) {
  RngStream rng(23, 0);
  Dataset d = random_net_data(5, 3, rng);
  d.inputs = d.inputs.cwiseAbs();
  const OneHiddenNet net(2, OneHiddenNet::alternating_output_weights(2), d);
  const Vector th = -Vector::Ones(net.dim());
  const GaussNewton gn = gauss_newton_matrices(net, th, d);
  EXPECT_EQ(gn.hessian.frobenius_norm(), 0.0);
  EXPECT_EQ(gn.fisher.frobenius_norm(), 0.0);
}

TEST(GradientBundle, SingleAndTwoExamples) {
  const Toy2dSurface one(single_point_dataset(Eigen::Vector2d(0.3, -0.2)));
  const GradientBundle b1 = gradient_bundle(one, Vector(Eigen::Vector2d(0.1, 0.1)));
  EXPECT_EQ(b1.covariance().frobenius_norm(), 0.0);

  Dataset two;
  two.inputs.resize(2, 2);
  two.inputs << 0.3, -0.2, -0.5, 0.4;
  two.labels = {0, 0};
  const Toy2dSurface s(two);
  const Vector w = Eigen::Vector2d(0.7, 0.9);
  const GradientBundle b = gradient_bundle(s, w);
  const Vector g1 = toy2d_example(w, two.inputs.row(0).transpose()).gradient;
  const Vector g2 = toy2d_example(w, two.inputs.row(1).transpose()).gradient;
  const Matrix expected = 0.25 * (g1 - g2) * (g1 - g2).transpose();
  EXPECT_LE((b.covariance().matrix() - expected).norm(), 1e-13 * expected.norm());
  EXPECT_NEAR(b.covariance_trace(), expected.trace(), 1e-13 * expected.trace());
  EXPECT_LE((b.mean_gradient - 0.5 * (g1 + g2)).norm(), 1e-14);
}

TEST(GradientBundle, FisherIdentity) {
  RngStream rng(24, 0);
  const Dataset d = random_net_data(30, 6, rng);
  const OneHiddenNet net(7, OneHiddenNet::alternating_output_weights(7), d);
  const Vector th = rng.normal_vector(net.dim());
  const GradientBundle b = gradient_bundle(net, th);
  const GaussNewton gn = gauss_newton_matrices(net, th, d);
  const Matrix rhs = b.covariance().matrix() + b.mean_gradient * b.mean_gradient.transpose();
  EXPECT_LE((gn.fisher.matrix() - rhs).norm(), 1e-10 * gn.fisher.frobenius_norm());
}

TEST(Datasets, ToyIsReproducible) {
  const Dataset a = make_toy2d_dataset({100, 7, ToyDataCovariance::identity});
  const Dataset b = make_toy2d_dataset({100, 7, ToyDataCovariance::identity});
  EXPECT_EQ(a.size(), 100);
  EXPECT_EQ(a.input_dim(), 2);
  EXPECT_EQ(a.inputs, b.inputs);
}

TEST(Datasets, QuadricInverseCovariance) {
  const Dataset a = make_toy2d_dataset({20000, 1, ToyDataCovariance::quadric_inverse});
  const Matrix cov = a.inputs.transpose() * a.inputs / 20000.0;
  const double r = 1.0 / std::sqrt(2.0);
  const Vector u = Eigen::Vector2d(r, -r), v = Eigen::Vector2d(r, r);
  const Matrix expected = (10.0 * u * u.transpose() + 100.0 * v * v.transpose()).inverse();
  EXPECT_LE((cov - expected).cwiseAbs().maxCoeff(), 0.005);
}

TEST(Datasets, ClassificationSizesAndCorruption) {
  ClassificationSpec spec;
  spec.n_clean = 1000;
  spec.n_corrupt = 200;
  spec.input_dim = 20;
  const ClassificationData c = make_classification_dataset(spec);
  EXPECT_EQ(c.train.size(), 1200);
  EXPECT_EQ(c.train.corrupt_count, 200);
  EXPECT_EQ(c.test.size(), spec.n_test);
  EXPECT_EQ(c.train.input_dim(), 20);

  spec.n_corrupt = 0;
  spec.n_clean = 200;
  spec.mu = 1e3;  // clusters so far apart that the sign of the mean projection is the label
  const ClassificationData clean = make_classification_dataset(spec);
  for (Index i = 0; i < clean.train.size(); ++i) {
    EXPECT_EQ(clean.train.labels[static_cast<std::size_t>(i)], clean.train.inputs.row(i).sum() > 0 ? 1 : 0);
  }
}

TEST(Datasets, CsvRoundTrip) {
  ClassificationSpec spec;
  spec.n_clean = 20;
  spec.n_corrupt = 5;
  spec.input_dim = 3;
  const Dataset d = make_classification_dataset(spec).train;
  std::stringstream ss;
  write_dataset_csv(ss, d);
  EXPECT_EQ(ss.str().rfind("x_0,x_1,x_2,y\n", 0), 0u);
  const Dataset back = read_dataset_csv(ss);
  EXPECT_EQ(back.inputs, d.inputs);
  EXPECT_EQ(back.labels, d.labels);
}

TEST(Datasets, InvalidSizes) {
  EXPECT_THROW(make_toy2d_dataset({0, 1, ToyDataCovariance::identity}), std::invalid_argument);
  ClassificationSpec spec;
  spec.input_dim = 0;
  EXPECT_THROW(make_classification_dataset(spec), std::invalid_argument);
}
