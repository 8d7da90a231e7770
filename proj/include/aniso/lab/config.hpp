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

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "aniso/dataset.hpp"
#include "aniso/noise.hpp"

namespace aniso::lab {

enum class ExperimentKind { ou_validate, toy2d_escape, prop_check, nn_escape, indicator_trace };

std::string_view experiment_name(ExperimentKind k);

// Dynamics names accepted in config lists: "gd" plus every noise kind.
inline constexpr std::string_view kGradientDescent = "gd";
std::string valid_dynamics_list();

/// Random PSD pairs (H, Sigma) checked against the OU closed form.
struct OuSection {
  Index dim = 3;
  long pairs = 20;
  long paths = 10000;
  double dt_scale = 0.01;  // dt = dt_scale / lambda_1(H)
  std::vector<double> time_scales{0.05, 0.25, 0.5, 1.0, 2.0};  // t = scale / lambda_1(H)
  double max_z = 3.0;                // allowed |MC - closed| in standard errors
  double small_t_tolerance = 0.1;    // relative, at the first time scale
};

struct Toy2dSection {
  Index n_points = 100;
  std::uint64_t data_seed = 7;
  ToyDataCovariance data_covariance = ToyDataCovariance::quadric_inverse;
  std::array<double, 2> start{1.0, 1.0};
  double basin_radius = 1.4;
  long trials = 100;
  double eta = 0.005;
  long iterations = 500;
  long record_every = 10;
  double target_norm = 0.01;  // common expected squared noise norm
  Normalization normalization = Normalization::match_sgd_norm;
  Index batch_size = 20;
  Index k = 2;
  Index refresh = 1;
  std::vector<std::string> dynamics{"gd",          "sgd",         "gld_const",   "gld_dynamic",
                                    "gld_diag",    "gld_leading", "gld_hessian", "gld_first_eigvec"};
  bool check_ordering = true;
  double ordering_margin = 0.3;
};

/// Synthetic corrupted-label classification with a one-hidden-layer net.
struct NnSection {
  Index input_dim = 40;
  Index hidden = 16;
  Index n_clean = 200;
  Index n_corrupt = 40;
  Index n_test = 2000;
  double mu = 1.5;
  std::uint64_t data_seed = 0;
  double gd_eta = 0.1;
  long gd_iterations = 2000;
  double eta = 0.07;
  Index batch_size = 20;
  double sigma = 1e-3;
  Index k = 20;
  Index refresh = 10;
  long phase2_iterations = 300;
  long checkpoint_every = 25;
  double sharpness_delta = 0.01;
  long sharpness_samples = 1000;
  Normalization normalization = Normalization::match_sgd_norm;
  std::vector<std::string> dynamics{"gd",          "sgd",         "gld_const",   "gld_dynamic",
                                    "gld_diag",    "gld_leading", "gld_hessian", "gld_first_eigvec"};
  bool run_checks = true;
  double a_hat_threshold = 0.0;
  double ratio_threshold = 5.0;
  double trapped_accuracy = 0.99;
  double converged_accuracy = 0.99;  // phase-1 warning threshold
};

struct PropCheckSection {
  long nets = 100;
  Index max_hidden = 10;
  Index max_input = 10;
  Index max_examples = 50;
  double tolerance = 1e-8;
  double fisher_tolerance = 1e-10;
  std::vector<Index> dims{50, 100, 200, 400};
  // Ill-conditioned spectrum: lambda_1 = 1, the other D - 1 eigenvalues D^-d.
  double tail_exponent = 1.0;
  double min_slope = 0.9;
  double delta = 0.1;
  long covariance_draws = 1000;
};

/// SGD from a random start on the nn task, with the Hessian spectrum and
/// noise diagnostics along the way. Data and net come from the nn section.
struct IndicatorTraceSection {
  long iterations = 2000;
  double eta = 0.5;
  Index batch_size = 20;
  long checkpoint_every = 50;
  Index spectrum_count = 400;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::ou_validate;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  bool emit_svg = false;
  OuSection ou;
  Toy2dSection toy2d;
  NnSection nn;
  PropCheckSection prop_check;
  IndicatorTraceSection indicator_trace;
};

/// Strict parse: unknown keys and ill-typed or out-of-range values throw
/// ConfigError naming the key path; syntax errors name line and column.
ExperimentConfig parse_config(std::string_view text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

/// Fully resolved config (every default filled in) as pretty-printed JSON.
std::string config_to_json(const ExperimentConfig& c);

}  // namespace aniso::lab
