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

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aniso/losses.hpp"
#include "aniso/noise.hpp"
#include "aniso/rng.hpp"
#include "aniso/symmat.hpp"

namespace aniso {

/// theta_{t+1} = theta_t - eta grad L(theta_t) + sigma_t eps_t.
/// An empty `noise` is plain gradient descent.
struct DynamicsConfig {
  const LossSurface* surface = nullptr;
  std::optional<NoiseModel> noise;
  double eta = 0.005;
  long iterations = 500;
  long record_every = 10;  // 0 records only the first and last iterate
  std::uint64_t seed = 1;
  std::uint64_t stream_id = 0;
  long trials = 100;

  void validate() const;
};

struct StepResult {
  Vector theta;      // theta_{t+1}
  double loss;       // L(theta_t)
  double grad_norm;  // |grad L(theta_t)|
};

/// One update. `iteration` only labels a DivergenceError, thrown when the loss
/// or gradient at theta is non-finite or |loss| or |theta| exceeds 1e12.
StepResult step(const Vector& theta, const LossSurface& surface, const NoiseModel* noise, NoiseState& state,
                double eta, RngStream& rng, long iteration = 0);

struct TrajectoryRecord {
  long iteration = 0;
  Vector theta;
  double loss = 0.0;
  double grad_norm = 0.0;
  std::vector<double> extras;  // values for Trajectory::extra_columns
};

struct Trajectory {
  std::vector<std::string> extra_columns;
  std::vector<TrajectoryRecord> records;
  std::optional<long> diverged_at;  // records stop before this iteration
  std::string divergence_message;

  const Vector& final_theta() const { return records.back().theta; }
};

/// Optional callbacks for run_trajectory.
struct TrajectoryHooks {
  // Fills TrajectoryRecord::extras at every recorded iterate.
  std::function<std::vector<double>(long iteration, const Vector& theta)> record;
  std::vector<std::string> extra_columns;
  // Sees every iterate, recorded or not, including the final one.
  std::function<void(long iteration, const Vector& theta)> every_iterate;
};

/// Runs `config.iterations` steps from theta0 with the stream
/// RngStream(config.seed, config.stream_id). Records iteration 0, every
/// record_every-th iteration, and the final iteration. Divergence ends the run
/// and keeps the records made so far.
Trajectory run_trajectory(const DynamicsConfig& config, const Vector& theta0, const TrajectoryHooks& hooks = {});

struct TwoPhaseResult {
  Trajectory phase1;  // gradient descent
  Trajectory phase2;  // configured dynamics started at phase 1's final iterate
};

/// Phase 1 must be noise-free. Phase 2 is skipped (empty records) if phase 1 diverges.
TwoPhaseResult run_two_phase(const DynamicsConfig& phase1, const DynamicsConfig& phase2, const Vector& theta0,
                             const TrajectoryHooks& hooks = {});

// ---------------------------------------------------------------------------
// Toy-surface basins and repeated trials
// ---------------------------------------------------------------------------

enum class Basin { sharp, flat, neither };

std::string_view basin_name(Basin b);

inline constexpr double kDefaultBasinRadius = 1.4;

/// flat within r of (-1,-1), sharp within r of (1,1), else neither.
Basin classify_basin(const Eigen::Vector2d& w, double radius = kDefaultBasinRadius);

struct TrialOutcome {
  long trial = 0;
  Eigen::Vector2d final_w = Eigen::Vector2d::Zero();
  Basin basin = Basin::neither;
  double final_loss = 0.0;
  bool diverged = false;
  bool success = false;
};

struct TrialBatch {
  std::vector<TrialOutcome> outcomes;
  long successes = 0;

  long trials() const { return static_cast<long>(outcomes.size()); }
  double success_rate() const;
};

/// `config.trials` independent trajectories from `start` on a 2-D surface.
/// Trial i uses RngStream(config.seed, stream_ids[i]) where stream_ids defaults
/// to 0, 1, ...; results are ordered by trial index whatever the worker count.
/// success = final basin is flat; diverged trials count as failures.
TrialBatch run_escape_trials(const DynamicsConfig& config, const Eigen::Vector2d& start,
                             double radius = kDefaultBasinRadius, const std::vector<std::uint64_t>& stream_ids = {});

// ---------------------------------------------------------------------------
// Ornstein-Uhlenbeck Monte Carlo
// ---------------------------------------------------------------------------

struct OuCurve {
  std::vector<double> times;  // simulated times n * dt
  std::vector<double> mean;   // mean of 1/2 theta^T H theta over paths
  std::vector<double> std_error;
};

/// Euler-Maruyama for d theta = -H theta dt + Sigma^(1/2) dW from theta_0 = 0.
/// Each checkpoint time is rounded to the nearest whole number of dt steps.
/// Paths are split into fixed chunks with their own streams, so the result
/// does not depend on the worker count. Throws StabilityError if
/// dt lambda_1(H) >= 2.
OuCurve ou_monte_carlo(const SymmetricMatrix& h, const SymmetricMatrix& sigma, const std::vector<double>& checkpoints,
                       double dt, long paths, std::uint64_t seed);

// ---------------------------------------------------------------------------
// CSV export
// ---------------------------------------------------------------------------

// iteration,loss,grad_norm[,extra columns]
void write_trajectory_csv(std::ostream& out, const Trajectory& t);
// trial,final_w1,final_w2,basin,success
void write_trials_csv(std::ostream& out, const TrialBatch& b);

}  // namespace aniso
