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

#include "aniso/errors.hpp"
#include "aniso/losses.hpp"
#include "aniso/noise.hpp"

using namespace aniso;

namespace {

Dataset small_net_data(RngStream& rng, Index n = 24, Index p = 4) {
  Dataset d;
  d.inputs.resize(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) d.inputs(i, j) = rng.normal();
  for (Index i = 0; i < n; ++i) d.labels.push_back(static_cast<int>(i % 2));
  return d;
}

NoiseModel model_of(NoiseKind kind, std::optional<double> target = 0.01) {
  NoiseModel m;
  m.kind = kind;
  m.target_norm = target;
  m.k = 3;
  m.refresh = 1000;
  return m;
}

double mean_squared_norm(const NoiseModel& m, const LossSurface& s, const Vector& th, int draws, RngStream& rng) {
  NoiseState state;
  double acc = 0.0;
  for (int i = 0; i < draws; ++i) acc += draw_noise(m, state, s, th, rng).squaredNorm();
  return acc / draws;
}

}  // namespace

TEST(NoiseNames, RoundTripAndErrors) {
  for (NoiseKind k : all_noise_kinds()) EXPECT_EQ(parse_noise_kind(noise_kind_name(k)), k);
  EXPECT_EQ(all_noise_kinds().size(), 7u);
  try {
    parse_noise_kind("gld_fancy");
    FAIL();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("gld_first_eigvec"), std::string::npos);
    EXPECT_NE(msg.find("sgd"), std::string::npos);
  }
  EXPECT_EQ(parse_normalization("fixed_sigma"), Normalization::fixed_sigma);
  EXPECT_THROW(parse_normalization("other"), std::invalid_argument);
}

TEST(NoiseModel, Validate) {
  NoiseModel m;
  EXPECT_NO_THROW(m.validate());
  m.k = 0;
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m = NoiseModel{};
  m.batch_size = 0;
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m = NoiseModel{};
  m.sigma = -1.0;
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m = NoiseModel{};
  m.target_norm = -0.1;
  EXPECT_THROW(m.validate(), std::invalid_argument);
}

TEST(NormalizeMagnitude, ClosedForms) {
  NoiseModel m = model_of(NoiseKind::gld_dynamic);
  EXPECT_DOUBLE_EQ(normalize_magnitude(m, 7.0, 0.01), std::sqrt(0.01 / 7.0));
  EXPECT_EQ(normalize_magnitude(m, 7.0, 0.0), 0.0);
  EXPECT_THROW(normalize_magnitude(m, 0.0, 0.01), DegenerateInputError);

  m.normalization = Normalization::fixed_sigma;
  m.sigma = 0.25;
  EXPECT_EQ(normalize_magnitude(m, 3.0, 0.01), 0.25);

  m.normalization = Normalization::recipe_coefficient;
  m.kind = NoiseKind::gld_hessian;
  m.batch_size = 20;
  MagnitudeContext ctx{2.0, 5.0, 3.0};
  EXPECT_DOUBLE_EQ(normalize_magnitude(m, 1.0, 0.01, ctx), std::sqrt(5.0 / (20.0 * 2.0)));
  m.kind = NoiseKind::gld_first_eigvec;
  EXPECT_DOUBLE_EQ(normalize_magnitude(m, 1.0, 0.01, ctx), std::sqrt(3.0 / (20.0 * 2.0)));
  m.kind = NoiseKind::gld_leading;
  m.eta = 0.07;
  EXPECT_DOUBLE_EQ(normalize_magnitude(m, 1.0, 0.01, ctx), 0.07 / std::sqrt(20.0));
}

TEST(NoiseCovariance, GldConstIsScaledIdentity) {
  const QuadraticSurface q(SymmetricMatrix::identity(5));
  NoiseModel m;
  m.kind = NoiseKind::gld_const;
  m.normalization = Normalization::fixed_sigma;
  m.sigma = 1e-3;
  NoiseState state;
  const ResolvedNoise r = noise_covariance(m, state, q, Vector::Zero(5));
  EXPECT_EQ(r.covariance.form, NoiseCovariance::Form::isotropic);
  EXPECT_DOUBLE_EQ(r.expected_squared_norm(), 1e-6 * 5);

  RngStream rng(1, 0);
  const double emp = mean_squared_norm(m, q, Vector::Zero(5), 10000, rng);
  EXPECT_NEAR(emp / 5e-6, 1.0, 0.02);
}

TEST(NoiseCovariance, FirstEigvecOnDiagonalHessian) {
  Vector d(2);
  d << 3.0, 1.0;
  const QuadraticSurface q(SymmetricMatrix::diagonal(d));
  NoiseModel m = model_of(NoiseKind::gld_first_eigvec, 3.0);
  NoiseState state;
  const ResolvedNoise r = noise_covariance(m, state, q, Vector::Zero(2));
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 3.0;
  EXPECT_LE((r.covariance.dense().matrix() - expected).norm(), 1e-14);
  EXPECT_NEAR(r.sigma, 1.0, 1e-15);

  RngStream rng(2, 0);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(draw_noise(m, state, q, Vector::Zero(2), rng)[1], 0.0);
}

TEST(NoiseCovariance, FirstEigvecRejectsFlatCurvature) {
  const QuadraticSurface q(SymmetricMatrix(2));
  NoiseModel m = model_of(NoiseKind::gld_first_eigvec);
  NoiseState state;
  EXPECT_THROW(noise_covariance(m, state, q, Vector::Zero(2)), DegenerateInputError);
}

TEST(NoiseCovariance, EqualGradientsGiveZeroSgdNoise) {
  // Every example at the same point: all per-example gradients agree.
  Dataset d;
  d.inputs = Matrix::Zero(5, 2);
  d.labels.assign(5, 0);
  const Toy2dSurface s(d);
  NoiseModel m = model_of(NoiseKind::sgd, std::nullopt);
  NoiseState state;
  const Vector w = Eigen::Vector2d(0.3, 0.1);
  const ResolvedNoise r = noise_covariance(m, state, s, w);
  EXPECT_EQ(r.covariance.trace(), 0.0);
  EXPECT_EQ(r.sigma, 0.0);
  RngStream rng(3, 0);
  EXPECT_EQ(draw_noise(m, state, s, w, rng).norm(), 0.0);
}

TEST(NoiseCovariance, SgdUsesEtaOverRootM) {
  RngStream rng(4, 0);
  const OneHiddenNet net(3, OneHiddenNet::alternating_output_weights(3), small_net_data(rng));
  const Vector th = net.initial_parameters(rng);
  NoiseModel m = model_of(NoiseKind::sgd, std::nullopt);
  m.eta = 0.07;
  m.batch_size = 20;
  NoiseState state;
  const ResolvedNoise r = noise_covariance(m, state, net, th);
  EXPECT_NEAR(r.sigma, 0.07 / std::sqrt(20.0), 1e-15);
  const SymmetricMatrix sigma = gradient_bundle(net, th).covariance();
  EXPECT_LE((r.covariance.dense().matrix() - sigma.matrix()).norm(), 1e-13 * sigma.frobenius_norm());
}

TEST(NoiseCovariance, StructuralFidelity) {
  RngStream rng(5, 0);
  const OneHiddenNet net(3, OneHiddenNet::alternating_output_weights(3), small_net_data(rng));
  const Vector th = net.initial_parameters(rng);
  const SymmetricMatrix sgd = gradient_bundle(net, th).covariance();
  NoiseState state;

  const ResolvedNoise diag = noise_covariance(model_of(NoiseKind::gld_diag), state, net, th);
  EXPECT_LE((diag.covariance.dense().diagonal_entries() - sgd.diagonal_entries()).norm(),
            1e-13 * sgd.frobenius_norm());
  EXPECT_EQ(diag.covariance.form, NoiseCovariance::Form::diagonal);

  const ResolvedNoise lead = noise_covariance(model_of(NoiseKind::gld_leading), state, net, th);
  EXPECT_LE((lead.covariance.dense().matrix() - low_rank_truncate(sgd, 3).matrix()).norm(),
            1e-10 * sgd.frobenius_norm());

  const ResolvedNoise dyn = noise_covariance(model_of(NoiseKind::gld_dynamic), state, net, th);
  EXPECT_EQ(dyn.covariance.dense().matrix(), Matrix::Identity(net.dim(), net.dim()));

  NoiseState hs;
  const ResolvedNoise hess = noise_covariance(model_of(NoiseKind::gld_hessian), hs, net, th);
  EXPECT_LE((hess.covariance.dense().matrix() - low_rank_truncate(net.hessian(th), 3).matrix()).norm(),
            1e-10 * net.hessian(th).frobenius_norm());
}

TEST(NoiseCovariance, ConstraintIsExactForEveryKind) {
  RngStream rng(6, 0);
  const OneHiddenNet net(3, OneHiddenNet::alternating_output_weights(3), small_net_data(rng));
  const Vector th = net.initial_parameters(rng);
  for (NoiseKind k : all_noise_kinds()) {
    NoiseState state;
    const ResolvedNoise r = noise_covariance(model_of(k, 0.01), state, net, th);
    EXPECT_NEAR(r.expected_squared_norm(), 0.01, 1e-12 * 0.01) << noise_kind_name(k);
  }
}

TEST(NoiseCovariance, HessianRefreshCadence) {
  Vector d(2);
  d << 3.0, 1.0;
  const QuadraticSurface q(SymmetricMatrix::diagonal(d));
  NoiseModel m = model_of(NoiseKind::gld_hessian);
  m.k = 1;
  m.refresh = 3;
  NoiseState state;
  for (int step = 0; step < 10; ++step) {
    noise_covariance(m, state, q, Vector::Zero(2));
    EXPECT_LE(state.age, m.refresh);
    EXPECT_EQ(state.age, step % 3 + 1);
  }
}

TEST(DrawNoise, UnbiasedAndRankOne) {
  Vector d(3);
  d << 4.0, 1.0, 0.5;
  const QuadraticSurface q(SymmetricMatrix::diagonal(d));
  NoiseModel m = model_of(NoiseKind::gld_hessian, 0.01);
  NoiseState state;
  RngStream rng(7, 0);
  const int n = 100000;
  Vector sum = Vector::Zero(3);
  for (int i = 0; i < n; ++i) sum += draw_noise(m, state, q, Vector::Zero(3), rng);
  EXPECT_LE((sum / n).norm(), 4.0 * std::sqrt(0.01 / n) * std::sqrt(3.0));

  NoiseModel first = model_of(NoiseKind::gld_first_eigvec);
  NoiseState fs;
  for (int i = 0; i < 20; ++i) {
    const Vector x = draw_noise(first, fs, q, Vector::Zero(3), rng);
    EXPECT_EQ(x[1], 0.0);
    EXPECT_EQ(x[2], 0.0);
  }
}

TEST(DrawNoise, MinibatchModeMatchesGaussianMoment) {
  RngStream rng(8, 0);
  const OneHiddenNet net(3, OneHiddenNet::alternating_output_weights(3), small_net_data(rng, 40));
  const Vector th = net.initial_parameters(rng);
  NoiseModel gauss = model_of(NoiseKind::sgd, std::nullopt);
  gauss.batch_size = 5;
  NoiseModel mb = gauss;
  mb.minibatch_resample = true;
  const double a = mean_squared_norm(gauss, net, th, 20000, rng);
  const double b = mean_squared_norm(mb, net, th, 20000, rng);
  EXPECT_NEAR(a / b, 1.0, 0.05);
}

TEST(DrawNoise, Deterministic) {
  RngStream rng(9, 0);
  const OneHiddenNet net(3, OneHiddenNet::alternating_output_weights(3), small_net_data(rng));
  const Vector th = net.initial_parameters(rng);
  for (NoiseKind k : all_noise_kinds()) {
    NoiseState s1, s2;
    RngStream a(10, 1), b(10, 1);
    EXPECT_EQ(draw_noise(model_of(k), s1, net, th, a), draw_noise(model_of(k), s2, net, th, b));
  }
}
