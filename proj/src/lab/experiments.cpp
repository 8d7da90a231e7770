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

#include "aniso/lab/experiments.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "aniso/dynamics.hpp"
#include "aniso/errors.hpp"
#include "aniso/format.hpp"
#include "aniso/indicators.hpp"
#include "aniso/lab/checks.hpp"
#include "aniso/lab/svg.hpp"
#include "aniso/losses.hpp"

namespace aniso::lab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Fixed stream ids so that adding or removing a dynamics from a list leaves
// the others' random numbers unchanged.
std::uint64_t dynamics_stream(const std::string& name) {
  if (name == kGradientDescent) return 0;
  return 1 + static_cast<std::uint64_t>(parse_noise_kind(name));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Context {
  const ExperimentConfig& cfg;
  OutputDir& out;
  RunManifest& manifest;
  std::ostream& log;

  void check(CheckResult c) {
    log << check_line(c) << '\n';
    manifest.checks.push_back(std::move(c));
  }
  void warn(const std::string& w) {
    log << "warning: " << w << '\n';
    manifest.warnings.push_back(w);
  }
  void svg(const std::string& name, const std::string& doc) {
    if (cfg.emit_svg) out.write(name, doc);
  }
};

// --- ou_validate -----------------------------------------------------------

void run_ou(Context& ctx) {
  const OuValidation v = validate_ou(ctx.cfg.ou, ctx.cfg.seed);
  CsvTable t({"pair", "t", "closed_form", "small_t_approx", "monte_carlo", "mc_stderr"});
  for (const OuRow& r : v.rows) {
    t.add_row({std::to_string(r.pair), format_number(r.t), format_number(r.closed_form), format_number(r.small_t),
               format_number(r.monte_carlo), format_number(r.mc_stderr)});
  }
  ctx.out.write_csv("ou_validate.csv", t);
  for (const CheckResult& c : v.checks) ctx.check(c);

  std::vector<Series> series;
  for (long p = 0; p < std::min<long>(ctx.cfg.ou.pairs, 3); ++p) {
    Series closed{"closed form, pair " + std::to_string(p), {}, {}};
    Series mc{"monte carlo, pair " + std::to_string(p), {}, {}};
    for (const OuRow& r : v.rows) {
      if (r.pair != p) continue;
      closed.x.push_back(r.t);
      closed.y.push_back(r.closed_form);
      mc.x.push_back(r.t);
      mc.y.push_back(r.monte_carlo);
    }
    series.push_back(closed);
    series.push_back(mc);
  }
  ctx.svg("ou_validate.svg", svg_line_chart({"Expected loss of the OU process", "t", "E L_t", false}, series));
}

// --- toy2d_escape ----------------------------------------------------------

NoiseModel toy_noise(const Toy2dSection& s, NoiseKind kind) {
  NoiseModel m;
  m.kind = kind;
  m.normalization = s.normalization;
  m.target_norm = s.target_norm;
  m.k = s.k;
  m.refresh = s.refresh;
  m.batch_size = s.batch_size;
  m.eta = s.eta;
  return m;
}

void run_toy2d(Context& ctx) {
  const Toy2dSection& s = ctx.cfg.toy2d;
  const Toy2dSurface surface(make_toy2d_dataset({s.n_points, s.data_seed, s.data_covariance}));
  const Eigen::Vector2d start(s.start[0], s.start[1]);

  CsvTable summary({"dynamics", "successes", "trials", "success_rate", "diverged"});
  CsvTable paths({"dynamics", "iteration", "w1", "w2", "loss"});
  std::map<std::string, double> rate;
  std::vector<Series> path_series;
  std::vector<double> bar_values;

  for (const std::string& name : s.dynamics) {
    DynamicsConfig dc;
    dc.surface = &surface;
    if (name != kGradientDescent) dc.noise = toy_noise(s, parse_noise_kind(name));
    dc.eta = s.eta;
    dc.iterations = s.iterations;
    dc.record_every = s.record_every;
    dc.seed = derive_stream_seed(ctx.cfg.seed, dynamics_stream(name));
    dc.trials = s.trials;

    const TrialBatch batch = run_escape_trials(dc, start, s.basin_radius);
    std::ostringstream trials_csv;
    write_trials_csv(trials_csv, batch);
    ctx.out.write("toy2d_trials_" + name + ".csv", trials_csv.str());
    long diverged = 0;
    for (const TrialOutcome& o : batch.outcomes) diverged += o.diverged ? 1 : 0;
    summary.add_row({name, std::to_string(batch.successes), std::to_string(batch.trials()),
                     format_number(batch.success_rate()), std::to_string(diverged)});
    rate[name] = batch.success_rate();
    bar_values.push_back(batch.success_rate());
    ctx.log << "toy2d " << name << ": success rate " << batch.success_rate() << '\n';

    // Trial 0's path, replayed with its stream.
    const Trajectory tr = run_trajectory(dc, start);
    Series ps{name, {}, {}};
    for (const TrajectoryRecord& r : tr.records) {
      paths.add_row({name, std::to_string(r.iteration), format_number(r.theta[0]), format_number(r.theta[1]),
                     format_number(r.loss)});
      ps.x.push_back(r.theta[0]);
      ps.y.push_back(r.theta[1]);
    }
    path_series.push_back(std::move(ps));
  }
  ctx.out.write_csv("toy2d_success.csv", summary);
  ctx.out.write_csv("toy2d_paths.csv", paths);

  if (ctx.cfg.emit_svg) {
    ContourSpec contour;
    contour.f = [&surface](double x, double y) { return surface.loss(Eigen::Vector2d(x, y)); };
    contour.x0 = -2.5;
    contour.x1 = 2.5;
    contour.y0 = -2.5;
    contour.y1 = 2.5;
    contour.levels = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
    ctx.svg("toy2d_paths.svg", svg_contour_chart({"Toy surface: one path per dynamics", "w1", "w2", false}, contour,
                                                 path_series));
    ctx.svg("toy2d_success.svg",
            svg_bar_chart({"Success rate of reaching the flat basin", "dynamics", "success rate", false}, s.dynamics,
                          bar_values));
  }

  if (!s.check_ordering) return;
  auto has = [&rate](const char* n) { return rate.count(n) > 0; };
  if (has("gd")) {
    ctx.check({"toy2d gd stays in the sharp basin", rate["gd"] == 0.0, "success rate " + fmt(rate["gd"])});
  }
  if (has("gld_first_eigvec")) {
    std::string beaten;
    for (const auto& [name, r] : rate) {
      if (r > rate["gld_first_eigvec"]) beaten += (beaten.empty() ? "" : ", ") + name;
    }
    ctx.check({"toy2d gld_first_eigvec has the highest success rate", beaten.empty(),
               beaten.empty() ? "rate " + fmt(rate["gld_first_eigvec"]) : "exceeded by " + beaten});
  }
  for (const char* a : {"gld_first_eigvec", "gld_hessian", "gld_leading"}) {
    for (const char* b : {"gld_const", "gld_diag"}) {
      if (!has(a) || !has(b)) continue;
      const double gap = rate[a] - rate[b];
      ctx.check({std::string("toy2d ") + a + " beats " + b, gap >= s.ordering_margin - 1e-12,
                 "gap " + fmt(gap) + " (need " + fmt(s.ordering_margin) + ")"});
    }
  }
}

// --- shared nn setup -------------------------------------------------------

struct NnTask {
  ClassificationData data;
  std::unique_ptr<OneHiddenNet> net;
  Vector theta0;
};

NnTask make_nn_task(const NnSection& s, std::uint64_t seed) {
  ClassificationSpec spec;
  spec.n_clean = s.n_clean;
  spec.n_corrupt = s.n_corrupt;
  spec.input_dim = s.input_dim;
  spec.n_test = s.n_test;
  spec.mu = s.mu;
  spec.seed = s.data_seed;
  NnTask t;
  t.data = make_classification_dataset(spec);
  t.net = std::make_unique<OneHiddenNet>(s.hidden, OneHiddenNet::alternating_output_weights(s.hidden), t.data.train);
  RngStream init(seed, 1);
  t.theta0 = t.net->initial_parameters(init);
  return t;
}

// Indicators of the SGD covariance at theta: Tr(H Sigma), Tr(H Sigma_bar), ratio, a_hat.
IndicatorReport sgd_indicators(const OneHiddenNet& net, const Vector& theta) {
  const SymmetricMatrix h = SymmetricMatrix::gram(net.curvature_rows(theta));
  const SymmetricMatrix sigma = gradient_bundle(net, theta).covariance();
  const EigenDecomposition eig = net.hessian_eigen(theta);
  return escape_indicator_report(h, sigma, &eig);
}

double a_hat_value(const IndicatorReport& r) { return r.a_hat ? r.a_hat->value : kNaN; }

// --- nn_escape -------------------------------------------------------------

NoiseModel nn_noise(const NnSection& s, NoiseKind kind) {
  NoiseModel m;
  m.kind = kind;
  m.normalization = kind == NoiseKind::gld_const ? Normalization::fixed_sigma : s.normalization;
  m.sigma = s.sigma;
  m.k = s.k;
  m.refresh = s.refresh;
  m.batch_size = s.batch_size;
  m.eta = s.eta;
  return m;
}

struct BranchSummary {
  std::vector<double> iterations;
  std::vector<double> sharpness;
  std::vector<double> test_acc;
  std::vector<double> ratio;
  std::vector<double> a_hat;
  double min_train_acc = 1.0;
  double final_sharpness = kNaN;
  bool diverged = false;
};

void run_nn(Context& ctx) {
  const NnSection& s = ctx.cfg.nn;
  const NnTask task = make_nn_task(s, ctx.cfg.seed);
  const OneHiddenNet& net = *task.net;
  const Dataset& train = task.data.train;
  const Dataset& test = task.data.test;
  ctx.log << "nn: D = " << net.dim() << ", N = " << train.size() << " (" << train.corrupt_count << " corrupted)\n";

  DynamicsConfig gd;
  gd.surface = &net;
  gd.eta = s.gd_eta;
  gd.iterations = s.gd_iterations;
  gd.record_every = s.checkpoint_every;
  gd.seed = ctx.cfg.seed;
  TrajectoryHooks phase1_hooks;
  phase1_hooks.extra_columns = {"train_acc", "test_acc"};
  phase1_hooks.record = [&](long, const Vector& th) {
    return std::vector<double>{net.accuracy(th, train), net.accuracy(th, test)};
  };
  const Trajectory phase1 = run_trajectory(gd, task.theta0, phase1_hooks);
  std::ostringstream p1;
  write_trajectory_csv(p1, phase1);
  ctx.out.write("nn_phase1.csv", p1.str());
  if (phase1.diverged_at) throw DivergenceError("nn_escape: phase 1 " + phase1.divergence_message, *phase1.diverged_at);

  const Vector theta_gd = phase1.final_theta();
  const double gd_acc = net.accuracy(theta_gd, train);
  ctx.log << "nn: phase 1 train accuracy " << gd_acc << ", test accuracy " << net.accuracy(theta_gd, test) << '\n';
  if (gd_acc < s.converged_accuracy) {
    ctx.warn("phase 1 reached train accuracy " + fmt(gd_acc) + " < " + fmt(s.converged_accuracy) +
             "; continuing from the last GD iterate");
  }

  auto sharpness = [&](const Vector& th) {
    RngStream rng(ctx.cfg.seed, 7);  // common perturbations at every checkpoint
    return expected_sharpness(net, th, s.sharpness_delta, s.sharpness_samples, rng);
  };
  const SharpnessEstimate gd_sharp = sharpness(theta_gd);
  ctx.log << "nn: sharpness at the GD solution " << gd_sharp.mean << '\n';

  CsvTable summary({"dynamics", "final_train_acc", "min_train_acc", "final_test_acc", "final_sharpness",
                    "final_sharpness_se", "initial_sharpness", "diverged"});
  std::map<std::string, BranchSummary> branches;

  for (const std::string& name : s.dynamics) {
    DynamicsConfig dc;
    dc.surface = &net;
    if (name != kGradientDescent) dc.noise = nn_noise(s, parse_noise_kind(name));
    dc.eta = s.eta;
    dc.iterations = s.phase2_iterations;
    dc.record_every = s.checkpoint_every;
    dc.seed = derive_stream_seed(ctx.cfg.seed, 100 + dynamics_stream(name));

    BranchSummary& b = branches[name];
    TrajectoryHooks hooks;
    hooks.extra_columns = {"train_acc",  "test_acc",       "sharpness",        "sharpness_se",
                           "tr_h_sigma", "tr_h_sigma_iso", "anisotropy_ratio", "a_hat"};
    hooks.record = [&](long t, const Vector& th) {
      const SharpnessEstimate sh = sharpness(th);
      const IndicatorReport ind = sgd_indicators(net, th);
      const double test_acc = net.accuracy(th, test);
      b.iterations.push_back(static_cast<double>(t));
      b.sharpness.push_back(sh.mean);
      b.test_acc.push_back(test_acc);
      b.ratio.push_back(ind.anisotropy_ratio);
      b.a_hat.push_back(a_hat_value(ind));
      b.final_sharpness = sh.mean;
      return std::vector<double>{net.accuracy(th, train), test_acc,      sh.mean,
                                 sh.std_error,            ind.tr_h_sigma, ind.tr_h_sigma_iso,
                                 ind.anisotropy_ratio,    a_hat_value(ind)};
    };
    hooks.every_iterate = [&](long, const Vector& th) {
      b.min_train_acc = std::min(b.min_train_acc, net.accuracy(th, train));
    };

    const Trajectory tr = run_trajectory(dc, theta_gd, hooks);
    std::ostringstream csv;
    write_trajectory_csv(csv, tr);
    ctx.out.write("nn_" + name + ".csv", csv.str());
    b.diverged = tr.diverged_at.has_value();
    if (b.diverged) ctx.warn("nn branch " + name + ": " + tr.divergence_message);

    const TrajectoryRecord& last = tr.records.back();
    summary.add_row({name, format_number(last.extras[0]), format_number(b.min_train_acc),
                     format_number(last.extras[1]), format_number(last.extras[2]), format_number(last.extras[3]),
                     format_number(gd_sharp.mean), b.diverged ? "1" : "0"});
    ctx.log << "nn " << name << ": final sharpness " << last.extras[2] << ", min train accuracy " << b.min_train_acc
            << ", final test accuracy " << last.extras[1] << '\n';
  }
  ctx.out.write_csv("nn_summary.csv", summary);

  if (ctx.cfg.emit_svg) {
    std::vector<Series> sharp_series;
    std::vector<Series> test_series;
    for (const std::string& name : s.dynamics) {
      const BranchSummary& b = branches[name];
      sharp_series.push_back({name, b.iterations, b.sharpness});
      test_series.push_back({name, b.iterations, b.test_acc});
    }
    ctx.svg("nn_sharpness.svg",
            svg_line_chart({"Expected sharpness after the GD solution", "iteration", "sharpness", true}, sharp_series));
    ctx.svg("nn_test_accuracy.svg", svg_line_chart({"Test accuracy", "iteration", "accuracy", false}, test_series));
    if (branches.count("sgd") > 0) {
      const BranchSummary& b = branches["sgd"];
      ctx.svg("nn_sgd_ratio.svg", svg_line_chart({"Tr(H Sigma) / Tr(H Sigma_bar) along SGD", "iteration", "ratio", true},
                                                 {{"sgd", b.iterations, b.ratio}}));
    }
  }

  if (!s.run_checks) return;
  if (branches.count("sgd") > 0) {
    const BranchSummary& b = branches["sgd"];
    double min_a = HUGE_VAL;
    for (double a : b.a_hat) min_a = std::isnan(a) ? -HUGE_VAL : std::min(min_a, a);
    ctx.check({"nn sgd a_hat stays positive", min_a > s.a_hat_threshold,
               "min a_hat " + fmt(min_a) + " over " + std::to_string(b.a_hat.size()) + " checkpoints"});
    const double r0 = b.ratio.empty() ? kNaN : b.ratio.front();
    ctx.check({"nn sgd anisotropy ratio at the first checkpoint", r0 > s.ratio_threshold,
               "Tr(H Sigma) / Tr(H Sigma_bar) = " + fmt(r0) + " (need > " + fmt(s.ratio_threshold) + ")"});
  }
  for (const char* name : {"sgd", "gld_first_eigvec", "gld_hessian", "gld_leading"}) {
    if (branches.count(name) == 0) continue;
    const BranchSummary& b = branches[name];
    ctx.check({std::string("nn ") + name + " ends flatter than the GD solution",
               !b.diverged && b.final_sharpness < gd_sharp.mean,
               "sharpness " + fmt(b.final_sharpness) + " vs " + fmt(gd_sharp.mean)});
  }
  for (const char* name : {"gld_const", "gld_dynamic", "gld_diag"}) {
    if (branches.count(name) == 0) continue;
    const BranchSummary& b = branches[name];
    ctx.check({std::string("nn ") + name + " stays trapped", !b.diverged && b.min_train_acc >= s.trapped_accuracy,
               "min train accuracy " + fmt(b.min_train_acc)});
  }
}

// --- prop_check ------------------------------------------------------------

void run_prop(Context& ctx) {
  const PropCheckOutcome o = run_prop_checks(ctx.cfg.prop_check, ctx.cfg.seed);
  CsvTable nets({"net", "hidden", "input_dim", "examples", "c_hat", "upper_margin", "lower_margin", "fisher_norm",
                 "fisher_residual", "sandwich_pass", "fisher_pass"});
  for (const RandomNetCase& c : o.nets) {
    nets.add_row({std::to_string(c.net), std::to_string(c.hidden), std::to_string(c.input_dim),
                  std::to_string(c.examples), format_number(c.c_hat), format_number(c.upper_margin),
                  format_number(c.lower_margin), format_number(c.fisher_norm), format_number(c.fisher_residual),
                  c.sandwich_pass ? "1" : "0", c.fisher_pass ? "1" : "0"});
  }
  ctx.out.write_csv("prop_sandwich.csv", nets);
  CsvTable ratios({"dim", "tail", "ratio", "expected"});
  Series measured{"Tr(H Sigma) / Tr(H Sigma_bar)", {}, {}};
  for (const RatioRow& r : o.ratios) {
    ratios.add_row({std::to_string(r.dim), format_number(r.tail), format_number(r.ratio), format_number(r.expected)});
    measured.x.push_back(static_cast<double>(r.dim));
    measured.y.push_back(r.ratio);
  }
  ctx.out.write_csv("prop_ratio.csv", ratios);
  for (const CheckResult& c : o.checks) ctx.check(c);
  ctx.svg("prop_ratio.svg", svg_line_chart({"Anisotropy ratio against dimension", "D", "ratio", true}, {measured}));
}

// --- indicator_trace -------------------------------------------------------

void run_trace(Context& ctx) {
  const NnSection& s = ctx.cfg.nn;
  const IndicatorTraceSection& it = ctx.cfg.indicator_trace;
  const NnTask task = make_nn_task(s, ctx.cfg.seed);
  const OneHiddenNet& net = *task.net;
  const Dataset& train = task.data.train;
  const Dataset& test = task.data.test;

  NoiseModel sgd;
  sgd.kind = NoiseKind::sgd;
  sgd.eta = it.eta;
  sgd.batch_size = it.batch_size;
  DynamicsConfig dc;
  dc.surface = &net;
  dc.noise = sgd;
  dc.eta = it.eta;
  dc.iterations = it.iterations;
  dc.record_every = it.checkpoint_every;
  dc.seed = derive_stream_seed(ctx.cfg.seed, 200);

  Series ratio{"Tr(H Sigma) / Tr(H Sigma_bar)", {}, {}};
  Series dominance{"|g0| / expected noise norm", {}, {}};
  TrajectoryHooks hooks;
  hooks.extra_columns = {"train_acc",     "test_acc", "tr_h_sigma",    "tr_h_sigma_iso",      "anisotropy_ratio",
                         "a_hat",         "lambda_1", "hessian_trace", "expected_noise_norm", "dominance_ratio"};
  hooks.record = [&](long t, const Vector& th) {
    const IndicatorReport ind = sgd_indicators(net, th);
    const NoiseDominance nd = noise_dominance(net, th, it.batch_size, it.eta);
    ratio.x.push_back(static_cast<double>(t));
    ratio.y.push_back(ind.anisotropy_ratio);
    dominance.x.push_back(static_cast<double>(t));
    dominance.y.push_back(nd.ratio);
    const double lambda1 = ind.leading_hessian_eigenvalues.size() > 0 ? ind.leading_hessian_eigenvalues[0] : kNaN;
    return std::vector<double>{net.accuracy(th, train), net.accuracy(th, test), ind.tr_h_sigma,
                               ind.tr_h_sigma_iso,      ind.anisotropy_ratio,   a_hat_value(ind),
                               lambda1,                 ind.hessian_trace,      nd.expected_noise_norm,
                               nd.ratio};
  };
  const Trajectory tr = run_trajectory(dc, task.theta0, hooks);
  std::ostringstream csv;
  write_trajectory_csv(csv, tr);
  ctx.out.write("indicator_trace.csv", csv.str());
  if (tr.diverged_at) throw DivergenceError("indicator_trace: " + tr.divergence_message, *tr.diverged_at);

  const Vector& start = task.theta0;
  const Vector& end = tr.final_theta();
  const EigenDecomposition eig0 = eig_sym(SymmetricMatrix::gram(net.curvature_rows(start)));
  const EigenDecomposition eig1 = eig_sym(SymmetricMatrix::gram(net.curvature_rows(end)));
  const Index count = std::min(it.spectrum_count, net.dim());
  CsvTable spectrum({"index", "initial", "final"});
  Series s0{"initial", {}, {}};
  Series s1{"final", {}, {}};
  for (Index i = 0; i < count; ++i) {
    spectrum.add_row({std::to_string(i + 1), format_number(eig0.eigenvalues[i]), format_number(eig1.eigenvalues[i])});
    s0.x.push_back(static_cast<double>(i + 1));
    s0.y.push_back(eig0.eigenvalues[i]);
    s1.x.push_back(static_cast<double>(i + 1));
    s1.y.push_back(eig1.eigenvalues[i]);
  }
  ctx.out.write_csv("indicator_spectrum.csv", spectrum);

  // Text summary at the final iterate; sandwich and alignment are reported,
  // not enforced (alignment assumes a point close to a minimum).
  const SymmetricMatrix h = SymmetricMatrix::gram(net.curvature_rows(end));
  const SymmetricMatrix sigma = gradient_bundle(net, end).covariance();
  const IndicatorReport rep = escape_indicator_report(h, sigma, &eig1);
  const SandwichResult sw = sandwich_check(net, end, train);
  std::ostringstream text;
  text << "final iterate " << tr.records.back().iteration << ", gradient norm "
       << format_number(tr.records.back().grad_norm) << '\n';
  if (h.trace() > 0.0) {
    const AlignmentResult al = alignment_check(h, sigma, sw.c_hat, ctx.cfg.prop_check.delta);
    write_indicator_text(text, rep, &sw, &al);
  } else {
    write_indicator_text(text, rep, &sw, nullptr);
  }
  ctx.out.write("indicator_report.txt", text.str());

  ctx.svg("indicator_ratio.svg", svg_line_chart({"Anisotropy ratio along SGD", "iteration", "ratio", true}, {ratio}));
  ctx.svg("indicator_dominance.svg",
          svg_line_chart({"Gradient norm over expected noise norm", "iteration", "ratio", true}, {dominance}));
  ctx.svg("indicator_spectrum.svg",
          svg_line_chart({"Leading Hessian eigenvalues", "index", "eigenvalue", true}, {s0, s1}));
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  OutputDir out(config.output_dir);
  RunResult result;
  RunManifest& m = result.manifest;
  m.config_json = config_to_json(config);
  m.version = ANISO_VERSION;
  m.experiment = std::string(experiment_name(config.experiment));
  m.seed = config.seed;

  Context ctx{config, out, m, log};
  try {
    switch (config.experiment) {
      case ExperimentKind::ou_validate:
        run_ou(ctx);
        break;
      case ExperimentKind::toy2d_escape:
        run_toy2d(ctx);
        break;
      case ExperimentKind::prop_check:
        run_prop(ctx);
        break;
      case ExperimentKind::nn_escape:
        run_nn(ctx);
        break;
      case ExperimentKind::indicator_trace:
        run_trace(ctx);
        break;
    }
  } catch (const std::exception& e) {
    m.partial = true;
    m.error = e.what();
    log << "error: " << e.what() << '\n';
  }

  m.files = out.files();
  m.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.write("manifest.json", manifest_to_json(m));

  bool all_pass = true;
  for (const CheckResult& c : m.checks) all_pass = all_pass && c.pass;
  result.exit_code = m.partial ? 3 : (all_pass ? 0 : 1);
  return result;
}

}  // namespace aniso::lab
