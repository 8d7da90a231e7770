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

#include "aniso/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "aniso/errors.hpp"
#include "aniso/format.hpp"
#include "aniso/parallel.hpp"

namespace aniso {

namespace {

constexpr double kDivergenceLimit = 1e12;

void check_finite(double loss, const Vector& grad, const Vector& theta, long iteration) {
  const bool bad = !std::isfinite(loss) || !grad.allFinite() || !theta.allFinite() ||
                   std::abs(loss) > kDivergenceLimit || theta.norm() > kDivergenceLimit;
  if (bad) {
    throw DivergenceError("step: diverged at iteration " + std::to_string(iteration) +
                              " (loss " + format_number(loss) + ", |theta| " + format_number(theta.norm()) + ")",
                          iteration);
  }
}

bool should_record(long t, long total, long every) {
  if (t == 0 || t == total) return true;
  return every > 0 && t % every == 0;
}

}  // namespace

void DynamicsConfig::validate() const {
  if (surface == nullptr) throw std::invalid_argument("DynamicsConfig: surface is not set");
  if (!(eta > 0.0)) throw std::invalid_argument("DynamicsConfig: eta must be > 0");
  if (iterations < 1) throw std::invalid_argument("DynamicsConfig: iterations must be >= 1");
  if (record_every < 0) throw std::invalid_argument("DynamicsConfig: record_every must be >= 0");
  if (trials < 1) throw std::invalid_argument("DynamicsConfig: trials must be >= 1");
  if (noise) noise->validate();
}

StepResult step(const Vector& theta, const LossSurface& surface, const NoiseModel* noise, NoiseState& state,
                double eta, RngStream& rng, long iteration) {
  if (theta.size() != surface.dim()) {
    throw std::invalid_argument("step: theta has length " + std::to_string(theta.size()) + ", surface dimension is " +
                                std::to_string(surface.dim()));
  }
  if (noise != nullptr && surface.dataset() != nullptr) {
    const GradientBundle bundle = gradient_bundle(surface, theta);
    check_finite(bundle.loss, bundle.mean_gradient, theta, iteration);
    Vector next = theta - eta * bundle.mean_gradient + draw_noise(*noise, state, surface, theta, rng, &bundle);
    return {std::move(next), bundle.loss, bundle.mean_gradient.norm()};
  }
  ValueGradient vg = surface.value_and_gradient(theta);
  check_finite(vg.loss, vg.gradient, theta, iteration);
  Vector next = theta - eta * vg.gradient;
  if (noise != nullptr) next += draw_noise(*noise, state, surface, theta, rng);
  return {std::move(next), vg.loss, vg.gradient.norm()};
}

Trajectory run_trajectory(const DynamicsConfig& config, const Vector& theta0, const TrajectoryHooks& hooks) {
  config.validate();
  const LossSurface& surface = *config.surface;
  const NoiseModel* noise = config.noise ? &*config.noise : nullptr;

  Trajectory out;
  out.extra_columns = hooks.extra_columns;
  RngStream rng(config.seed, config.stream_id);
  NoiseState state;
  Vector theta = theta0;

  auto record = [&](long t, double loss, double grad_norm) {
    TrajectoryRecord r;
    r.iteration = t;
    r.theta = theta;
    r.loss = loss;
    r.grad_norm = grad_norm;
    if (hooks.record) r.extras = hooks.record(t, theta);
    out.records.push_back(std::move(r));
  };

  try {
    for (long t = 0; t < config.iterations; ++t) {
      if (hooks.every_iterate) hooks.every_iterate(t, theta);
      StepResult s = step(theta, surface, noise, state, config.eta, rng, t);
      if (should_record(t, config.iterations, config.record_every)) record(t, s.loss, s.grad_norm);
      theta = std::move(s.theta);
    }
    const ValueGradient last = surface.value_and_gradient(theta);
    check_finite(last.loss, last.gradient, theta, config.iterations);
    if (hooks.every_iterate) hooks.every_iterate(config.iterations, theta);
    record(config.iterations, last.loss, last.gradient.norm());
  } catch (const DivergenceError& e) {
    out.diverged_at = e.iteration();
    out.divergence_message = e.what();
  }
  return out;
}

TwoPhaseResult run_two_phase(const DynamicsConfig& phase1, const DynamicsConfig& phase2, const Vector& theta0,
                             const TrajectoryHooks& hooks) {
  if (phase1.noise) throw std::invalid_argument("run_two_phase: phase 1 must be gradient descent");
  TwoPhaseResult out;
  out.phase1 = run_trajectory(phase1, theta0, hooks);
  if (out.phase1.diverged_at) {
    out.phase2.extra_columns = hooks.extra_columns;
    return out;
  }
  out.phase2 = run_trajectory(phase2, out.phase1.final_theta(), hooks);
  return out;
}

// --- basins and trials -----------------------------------------------------

std::string_view basin_name(Basin b) {
  switch (b) {
    case Basin::sharp:
      return "sharp";
    case Basin::flat:
      return "flat";
    case Basin::neither:
      return "neither";
  }
  return "neither";
}

Basin classify_basin(const Eigen::Vector2d& w, double radius) {
  if ((w - kFlatMinimum).norm() <= radius) return Basin::flat;
  if ((w - kSharpMinimum).norm() <= radius) return Basin::sharp;
  return Basin::neither;
}

double TrialBatch::success_rate() const {
  return outcomes.empty() ? 0.0 : static_cast<double>(successes) / static_cast<double>(outcomes.size());
}

TrialBatch run_escape_trials(const DynamicsConfig& config, const Eigen::Vector2d& start, double radius,
                             const std::vector<std::uint64_t>& stream_ids) {
  config.validate();
  if (config.surface->dim() != 2) throw std::invalid_argument("run_escape_trials: surface must be 2-D");
  if (!stream_ids.empty() && static_cast<long>(stream_ids.size()) != config.trials) {
    throw std::invalid_argument("run_escape_trials: need one stream id per trial");
  }

  TrialBatch batch;
  batch.outcomes.resize(static_cast<std::size_t>(config.trials));
  parallel_for(batch.outcomes.size(), [&](std::size_t i) {
    DynamicsConfig c = config;
    c.record_every = 0;
    c.stream_id = stream_ids.empty() ? static_cast<std::uint64_t>(i) : stream_ids[i];
    const Trajectory tr = run_trajectory(c, start);
    TrialOutcome& o = batch.outcomes[i];
    o.trial = static_cast<long>(i);
    if (tr.records.empty()) {
      o.final_w = start;
      o.final_loss = std::nan("");
    } else {
      o.final_w = tr.records.back().theta;
      o.final_loss = tr.records.back().loss;
    }
    o.diverged = tr.diverged_at.has_value();
    o.basin = o.diverged ? Basin::neither : classify_basin(o.final_w, radius);
    o.success = !o.diverged && o.basin == Basin::flat;
  });
  for (const TrialOutcome& o : batch.outcomes) batch.successes += o.success ? 1 : 0;
  return batch;
}

// --- OU Monte Carlo --------------------------------------------------------

namespace {

constexpr long kOuChunks = 64;

struct ChunkSums {
  std::vector<double> sum;
  std::vector<double> sum_sq;
};

}  // namespace

OuCurve ou_monte_carlo(const SymmetricMatrix& h, const SymmetricMatrix& sigma, const std::vector<double>& checkpoints,
                       double dt, long paths, std::uint64_t seed) {
  if (h.dim() != sigma.dim()) throw std::invalid_argument("ou_monte_carlo: H and Sigma dimensions differ");
  if (!(dt > 0.0)) throw std::invalid_argument("ou_monte_carlo: dt must be > 0");
  if (paths < 1) throw std::invalid_argument("ou_monte_carlo: paths must be >= 1");
  const double lambda1 = spectral_norm(h);
  if (dt * lambda1 >= 2.0) {
    throw StabilityError("ou_monte_carlo: dt * lambda_1 = " + format_number(dt * lambda1) + " >= 2 is unstable");
  }
  const SymmetricMatrix root = psd_sqrt(sigma);
  const Index d = h.dim();

  std::vector<long> steps;
  for (double t : checkpoints) {
    if (!(t >= 0.0)) throw std::invalid_argument("ou_monte_carlo: checkpoint times must be >= 0");
    steps.push_back(std::lround(t / dt));
  }
  const long last_step = steps.empty() ? 0 : *std::max_element(steps.begin(), steps.end());

  const long chunks = std::min(paths, kOuChunks);
  std::vector<ChunkSums> sums(static_cast<std::size_t>(chunks));
  parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
    const long width = paths / chunks + (static_cast<long>(c) < paths % chunks ? 1 : 0);
    RngStream rng(seed, c);
    ChunkSums& s = sums[c];
    s.sum.assign(steps.size(), 0.0);
    s.sum_sq.assign(steps.size(), 0.0);

    Matrix theta = Matrix::Zero(d, width);
    Matrix z(d, width);
    const Matrix drift = Matrix::Identity(d, d) - dt * h.matrix();
    const Matrix kick = std::sqrt(dt) * root.matrix();
    auto accumulate = [&](long n) {
      for (std::size_t k = 0; k < steps.size(); ++k) {
        if (steps[k] != n) continue;
        const Eigen::ArrayXd loss = 0.5 * (theta.array() * (h.matrix() * theta).array()).colwise().sum();
        s.sum[k] = loss.sum();
        s.sum_sq[k] = loss.square().sum();
      }
    };
    accumulate(0);
    for (long n = 1; n <= last_step; ++n) {
      for (Index j = 0; j < width; ++j) {
        for (Index i = 0; i < d; ++i) z(i, j) = rng.normal();
      }
      theta = drift * theta + kick * z;
      accumulate(n);
    }
  });

  OuCurve out;
  const double p = static_cast<double>(paths);
  for (std::size_t k = 0; k < steps.size(); ++k) {
    double total = 0.0;
    double total_sq = 0.0;
    for (const ChunkSums& s : sums) {
      total += s.sum[k];
      total_sq += s.sum_sq[k];
    }
    const double mean = total / p;
    const double var = paths > 1 ? std::max(total_sq - p * mean * mean, 0.0) / (p - 1.0) : 0.0;
    out.times.push_back(static_cast<double>(steps[k]) * dt);
    out.mean.push_back(mean);
    out.std_error.push_back(std::sqrt(var / p));
  }
  return out;
}

// --- CSV -------------------------------------------------------------------

void write_trajectory_csv(std::ostream& out, const Trajectory& t) {
  out << "iteration,loss,grad_norm";
  for (const std::string& c : t.extra_columns) out << ',' << c;
  out << '\n';
  for (const TrajectoryRecord& r : t.records) {
    out << r.iteration << ',' << format_number(r.loss) << ',' << format_number(r.grad_norm);
    for (double v : r.extras) out << ',' << format_number(v);
    out << '\n';
  }
}

void write_trials_csv(std::ostream& out, const TrialBatch& b) {
  out << "trial,final_w1,final_w2,basin,success\n";
  for (const TrialOutcome& o : b.outcomes) {
    out << o.trial << ',' << format_number(o.final_w[0]) << ',' << format_number(o.final_w[1]) << ','
        << basin_name(o.basin) << ',' << (o.success ? 1 : 0) << '\n';
  }
}

}  // namespace aniso
