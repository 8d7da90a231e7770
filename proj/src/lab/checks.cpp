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

#include "aniso/lab/checks.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aniso/dynamics.hpp"
#include "aniso/format.hpp"
#include "aniso/indicators.hpp"
#include "aniso/losses.hpp"
#include "aniso/noise.hpp"

namespace aniso::lab {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

SymmetricMatrix random_psd(Index d, RngStream& rng) {
  Matrix a(d, d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) a(i, j) = rng.normal();
  }
  return SymmetricMatrix::gram(a.transpose(), 1.0 / static_cast<double>(d));
}

// --- OU --------------------------------------------------------------------

OuValidation validate_ou(const OuSection& s, std::uint64_t seed) {
  OuValidation out;
  for (long p = 0; p < s.pairs; ++p) {
    RngStream rng(seed, static_cast<std::uint64_t>(p));
    const SymmetricMatrix h = random_psd(s.dim, rng);
    const SymmetricMatrix sigma = random_psd(s.dim, rng);
    const double lambda1 = spectral_norm(h);
    const double dt = s.dt_scale / lambda1;
    std::vector<double> times;
    for (double scale : s.time_scales) times.push_back(scale / lambda1);

    const OuCurve mc = ou_monte_carlo(h, sigma, times, dt, s.paths, derive_stream_seed(seed, 1000 + p));
    double worst_z = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      const OuExpectedLoss cf = ou_expected_loss_closed(h, sigma, mc.times[k]);
      OuRow row{p, mc.times[k], cf.exact, cf.small_t, mc.mean[k], mc.std_error[k]};
      out.rows.push_back(row);
      const double gap = std::abs(mc.mean[k] - cf.exact);
      worst_z = std::max(worst_z, mc.std_error[k] > 0.0 ? gap / mc.std_error[k] : (gap > 0.0 ? HUGE_VAL : 0.0));
    }
    out.checks.push_back({"ou pair " + std::to_string(p) + " monte carlo", worst_z <= s.max_z,
                          "max |MC - closed| = " + fmt(worst_z) + " standard errors"});

    const OuRow& first = out.rows[out.rows.size() - times.size()];
    const double rel = first.closed_form > 0.0 ? std::abs(first.small_t - first.closed_form) / first.closed_form : 0.0;
    out.checks.push_back({"ou pair " + std::to_string(p) + " small-t", rel <= s.small_t_tolerance,
                          "relative gap " + fmt(rel) + " at t = " + fmt(first.t)});
  }
  return out;
}

// --- random nets -----------------------------------------------------------

std::vector<RandomNetCase> random_net_cases(const PropCheckSection& s, std::uint64_t seed) {
  std::vector<RandomNetCase> out;
  for (long i = 0; i < s.nets; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(2000 + i));
    RandomNetCase c;
    c.net = i;
    c.hidden = 1 + static_cast<Index>(rng.index(static_cast<std::size_t>(s.max_hidden)));
    c.input_dim = 1 + static_cast<Index>(rng.index(static_cast<std::size_t>(s.max_input)));
    c.examples = 1 + static_cast<Index>(rng.index(static_cast<std::size_t>(s.max_examples)));

    Dataset data;
    data.inputs.resize(c.examples, c.input_dim);
    for (Index r = 0; r < c.examples; ++r) {
      for (Index j = 0; j < c.input_dim; ++j) data.inputs(r, j) = rng.normal();
    }
    for (Index r = 0; r < c.examples; ++r) data.labels.push_back(rng.uniform() < 0.5 ? 0 : 1);

    const OneHiddenNet net(c.hidden, OneHiddenNet::alternating_output_weights(c.hidden), data);
    const Vector theta = rng.normal_vector(net.dim());

    const SandwichResult sw = sandwich_check(net, theta, data, s.tolerance);
    c.c_hat = sw.c_hat;
    c.upper_margin = sw.upper_margin;
    c.lower_margin = sw.lower_margin;
    c.fisher_norm = sw.fisher_norm;
    c.sandwich_pass = sw.pass;

    const GaussNewton gn = gauss_newton_matrices(net, theta, data);
    const GradientBundle b = gradient_bundle(net, theta);
    const Matrix rebuilt = b.covariance().matrix() + b.mean_gradient * b.mean_gradient.transpose();
    c.fisher_frobenius = gn.fisher.frobenius_norm();
    c.fisher_residual = (gn.fisher.matrix() - rebuilt).norm();
    c.fisher_pass = c.fisher_residual <= s.fisher_tolerance * c.fisher_frobenius;
    out.push_back(c);
  }
  return out;
}

// --- ill-conditioned ratio -------------------------------------------------

std::vector<RatioRow> ill_conditioned_ratios(const PropCheckSection& s) {
  std::vector<RatioRow> out;
  for (Index d : s.dims) {
    const double tail = std::pow(static_cast<double>(d), -s.tail_exponent);
    Vector spectrum = Vector::Constant(d, tail);
    spectrum[0] = 1.0;
    const SymmetricMatrix h = SymmetricMatrix::diagonal(spectrum);
    const SymmetricMatrix sigma = SymmetricMatrix::outer(Vector::Unit(d, 0));
    const IndicatorReport r = escape_indicator_report(h, sigma);
    out.push_back({d, tail, r.anisotropy_ratio, static_cast<double>(d) / (1.0 + static_cast<double>(d - 1) * tail)});
  }
  return out;
}

double loglog_slope(const std::vector<RatioRow>& rows) {
  const double n = static_cast<double>(rows.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const RatioRow& r : rows) {
    const double x = std::log(static_cast<double>(r.dim));
    const double y = std::log(r.ratio);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

PropCheckOutcome run_prop_checks(const PropCheckSection& s, std::uint64_t seed) {
  PropCheckOutcome out;

  out.nets = random_net_cases(s, seed);
  long sandwich_ok = 0;
  long fisher_ok = 0;
  double worst_margin = HUGE_VAL;
  double worst_residual = 0.0;
  for (const RandomNetCase& c : out.nets) {
    sandwich_ok += c.sandwich_pass ? 1 : 0;
    fisher_ok += c.fisher_pass ? 1 : 0;
    const double scale = c.fisher_norm > 0.0 ? c.fisher_norm : 1.0;
    worst_margin = std::min(worst_margin, std::min(c.upper_margin, c.lower_margin) / scale);
    if (c.fisher_frobenius > 0.0) worst_residual = std::max(worst_residual, c.fisher_residual / c.fisher_frobenius);
  }
  const long n = static_cast<long>(out.nets.size());
  out.checks.push_back({"fisher/hessian sandwich", sandwich_ok == n,
                        std::to_string(sandwich_ok) + "/" + std::to_string(n) +
                            " nets, worst margin / |F|_2 = " + fmt(worst_margin)});
  out.checks.push_back({"fisher identity F = Sigma + g0 g0^T", fisher_ok == n,
                        std::to_string(fisher_ok) + "/" + std::to_string(n) +
                            " nets, worst relative residual " + fmt(worst_residual)});

  out.ratios = ill_conditioned_ratios(s);
  double worst_rel = 0.0;
  for (const RatioRow& r : out.ratios) worst_rel = std::max(worst_rel, std::abs(r.ratio - r.expected) / r.expected);
  out.checks.push_back({"ill-conditioned anisotropy ratio", worst_rel <= 1e-9,
                        "worst relative error " + fmt(worst_rel) + " against D / (1 + (D-1) tail)"});
  const double slope = loglog_slope(out.ratios);
  out.checks.push_back({"anisotropy ratio growth", slope >= s.min_slope, "log-log slope " + fmt(slope)});

  // Trace-constrained maximiser against random covariances of equal trace.
  {
    RngStream rng(seed, 4000);
    const Index d = 6;
    const SymmetricMatrix h = random_psd(d, rng);
    const SymmetricMatrix best = optimal_covariance(h, 1.0);
    const double top = trace_product(h, best);
    double worst = -HUGE_VAL;
    for (long i = 0; i < s.covariance_draws; ++i) {
      const SymmetricMatrix sig = random_psd(d, rng);
      worst = std::max(worst, trace_product(h, sig * (1.0 / sig.trace())) - top);
    }
    out.checks.push_back({"optimal covariance dominance", worst <= 1e-12,
                          "max Tr(H Sigma) - Tr(H Sigma*) = " + fmt(worst) + " over " +
                              std::to_string(s.covariance_draws) + " draws"});
  }

  // Alignment bound: self-aligned noise passes, isotropic noise on a steep
  // spectrum does not.
  {
    RngStream rng(seed, 4001);
    const SymmetricMatrix f = random_psd(8, rng);
    const AlignmentResult self = alignment_check(f, f, 0.0, s.delta);
    out.checks.push_back({"alignment with Sigma = H", self.pass, "min margin " + fmt(self.min_margin)});

    const Index d = 100;
    Vector spectrum = Vector::Constant(d, 0.01);
    spectrum[0] = 1.0;
    const SymmetricMatrix h = SymmetricMatrix::diagonal(spectrum);
    const SymmetricMatrix iso = SymmetricMatrix::identity(d) * (1.0 / static_cast<double>(d));
    const AlignmentResult r = alignment_check(h, iso, 0.0, s.delta);
    const double lead = r.margins.front().margin;
    out.checks.push_back({"alignment rejects isotropic noise", lead < 0.0, "leading margin " + fmt(lead)});
  }
  return out;
}

// --- sharpness -------------------------------------------------------------

std::vector<CheckResult> sharpness_checks(std::uint64_t seed) {
  const Toy2dSurface surface(single_point_dataset(Vector::Zero(2)));
  const double delta = 0.01;
  std::vector<CheckResult> out;
  const struct {
    const char* name;
    Eigen::Vector2d at;
    double expected;
  } cases[] = {{"sharp", kSharpMinimum, 0.5 * delta * delta * 220.0}, {"flat", kFlatMinimum, 0.5 * delta * delta * 4.0}};
  std::uint64_t id = 3000;
  for (const auto& c : cases) {
    RngStream rng(seed, id++);
    const SharpnessEstimate e = expected_sharpness(surface, c.at, delta, 1000, rng);
    const double z = std::abs(e.mean - c.expected) / e.std_error;
    out.push_back({std::string("expected sharpness at ") + c.name + " minimum", z <= 3.0,
                   format_number(e.mean) + " +- " + fmt(e.std_error) + " vs " + fmt(c.expected)});
  }
  return out;
}

// --- noise magnitude -------------------------------------------------------

std::vector<CheckResult> noise_constraint_checks(std::uint64_t seed) {
  std::vector<CheckResult> out;
  const Toy2dSurface toy(make_toy2d_dataset({}));
  const Vector toy_theta = Eigen::Vector2d(0.3, 0.6);

  ClassificationSpec spec;
  spec.n_clean = 40;
  spec.n_corrupt = 8;
  spec.input_dim = 6;
  spec.n_test = 1;
  spec.seed = seed;
  const OneHiddenNet net(5, OneHiddenNet::alternating_output_weights(5), make_classification_dataset(spec).train);
  RngStream init(seed, 5000);
  const Vector net_theta = net.initial_parameters(init);

  const struct {
    const char* name;
    const LossSurface* surface;
    const Vector* theta;
    std::optional<double> target;
  } surfaces[] = {{"toy2d", &toy, &toy_theta, 0.01}, {"net", &net, &net_theta, std::nullopt}};

  const long draws = 10000;
  std::uint64_t id = 6000;
  for (const auto& s : surfaces) {
    for (NoiseKind kind : all_noise_kinds()) {
      NoiseModel model;
      model.kind = kind;
      model.k = std::min<Index>(s.surface->dim(), 4);
      model.refresh = 1000000;
      model.target_norm = s.target;
      NoiseState state;
      const ResolvedNoise r = noise_covariance(model, state, *s.surface, *s.theta);
      const double analytic_gap = std::abs(r.expected_squared_norm() - r.target) / r.target;

      RngStream rng(seed, id++);
      double total = 0.0;
      for (long i = 0; i < draws; ++i) total += draw_noise(model, state, *s.surface, *s.theta, rng).squaredNorm();
      const double empirical_gap = std::abs(total / static_cast<double>(draws) - r.target) / r.target;
      out.push_back({std::string("noise magnitude ") + s.name + " " + std::string(noise_kind_name(kind)),
                     analytic_gap <= 1e-12 && empirical_gap <= 0.02,
                     "analytic gap " + fmt(analytic_gap) + ", sampled gap " + fmt(empirical_gap)});
    }
  }
  return out;
}

std::vector<CheckResult> full_check_suite(std::uint64_t seed) {
  std::vector<CheckResult> out;
  const OuValidation ou = validate_ou(OuSection{}, seed);
  out.insert(out.end(), ou.checks.begin(), ou.checks.end());
  const PropCheckOutcome prop = run_prop_checks(PropCheckSection{}, seed);
  out.insert(out.end(), prop.checks.begin(), prop.checks.end());
  const auto sharp = sharpness_checks(seed);
  out.insert(out.end(), sharp.begin(), sharp.end());
  const auto noise = noise_constraint_checks(seed);
  out.insert(out.end(), noise.begin(), noise.end());
  return out;
}

}  // namespace aniso::lab
