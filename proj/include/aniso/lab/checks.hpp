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
#include <vector>

#include "aniso/lab/config.hpp"
#include "aniso/lab/output.hpp"
#include "aniso/symmat.hpp"

namespace aniso::lab {

// (A A^T) / d with A a d x d standard normal matrix.
SymmetricMatrix random_psd(Index d, RngStream& rng);

// --- OU closed form --------------------------------------------------------

struct OuRow {
  long pair = 0;
  double t = 0.0;
  double closed_form = 0.0;
  double small_t = 0.0;
  double monte_carlo = 0.0;
  double mc_stderr = 0.0;
};

struct OuValidation {
  std::vector<OuRow> rows;
  std::vector<CheckResult> checks;  // per pair: MC agreement, small-t agreement
};

/// Pair p draws (H, Sigma) from RngStream(seed, p) and simulates with
/// master seed derive_stream_seed(seed, 1000 + p).
OuValidation validate_ou(const OuSection& s, std::uint64_t seed);

// --- property checks ------------------------------------------------------

struct RandomNetCase {
  long net = 0;
  Index hidden = 0;
  Index input_dim = 0;
  Index examples = 0;
  double c_hat = 0.0;
  double upper_margin = 0.0;
  double lower_margin = 0.0;
  double fisher_norm = 0.0;      // spectral
  double fisher_frobenius = 0.0;
  double fisher_residual = 0.0;  // |F - (Sigma + g0 g0^T)|_F
  bool sandwich_pass = false;
  bool fisher_pass = false;
};

// Net i: h, p, N uniform in [1, max], Gaussian inputs, fair-coin labels,
// theta ~ N(0, I), all from RngStream(seed, 2000 + i).
std::vector<RandomNetCase> random_net_cases(const PropCheckSection& s, std::uint64_t seed);

struct RatioRow {
  Index dim = 0;
  double tail = 0.0;
  double ratio = 0.0;
  double expected = 0.0;  // D / (1 + (D - 1) tail)
};

/// lambda_1 = 1 with eigenvector e_1, D - 1 eigenvalues D^-d, Sigma = e_1 e_1^T.
std::vector<RatioRow> ill_conditioned_ratios(const PropCheckSection& s);

// Least-squares slope of log ratio against log D.
double loglog_slope(const std::vector<RatioRow>& rows);

struct PropCheckOutcome {
  std::vector<RandomNetCase> nets;
  std::vector<RatioRow> ratios;
  std::vector<CheckResult> checks;
};

PropCheckOutcome run_prop_checks(const PropCheckSection& s, std::uint64_t seed);

// --- smaller contracts -----------------------------------------------------

// Expected sharpness at the two toy minima of a single x = 0 example.
std::vector<CheckResult> sharpness_checks(std::uint64_t seed);

// Analytic and sampled noise magnitude for every kind under match_sgd_norm.
std::vector<CheckResult> noise_constraint_checks(std::uint64_t seed);

/// Everything `aniso-lab check` runs, with default settings.
std::vector<CheckResult> full_check_suite(std::uint64_t seed);

}  // namespace aniso::lab
