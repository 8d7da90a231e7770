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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aniso/losses.hpp"
#include "aniso/rng.hpp"
#include "aniso/symmat.hpp"

namespace aniso {

/// Covariance structures of the compared noisy dynamics. The config names are
/// the enumerator names.
///
///   sgd               Sigma^sgd, the per-example gradient covariance
///   gld_const         I with a fixed scale
///   gld_dynamic       I rescaled every step to SGD's expected squared norm
///   gld_diag          diag(Sigma^sgd)
///   gld_leading       Sigma^sgd truncated to its k leading eigenpairs
///   gld_hessian       H truncated to its k leading eigenpairs
///   gld_first_eigvec  lambda_1 u_1 u_1^T of H
enum class NoiseKind { sgd, gld_const, gld_dynamic, gld_diag, gld_leading, gld_hessian, gld_first_eigvec };

/// How sigma_t is chosen.
///
///   match_sgd_norm      sigma_t^2 Tr(Sigma_t) = tau, the target squared norm
///   recipe_coefficient  the per-kind coefficients of the training recipe
///   fixed_sigma         sigma_t = sigma
enum class Normalization { match_sgd_norm, recipe_coefficient, fixed_sigma };

const std::vector<NoiseKind>& all_noise_kinds();
std::string_view noise_kind_name(NoiseKind kind);
// Throws std::invalid_argument listing the valid names.
NoiseKind parse_noise_kind(std::string_view name);

std::string_view normalization_name(Normalization n);
Normalization parse_normalization(std::string_view name);

bool uses_gradient_covariance(NoiseKind kind);
bool uses_hessian(NoiseKind kind);

struct NoiseModel {
  NoiseKind kind = NoiseKind::sgd;
  Normalization normalization = Normalization::match_sgd_norm;
  double sigma = 1e-3;    // gld_const scale and the fixed_sigma value
  Index k = 20;           // gld_leading, gld_hessian
  Index refresh = 10;     // Hessian recomputation period (gld_hessian, gld_first_eigvec)
  Index batch_size = 20;  // m
  double eta = 0.07;      // step size entering the SGD coefficient eta / sqrt(m)
  // Target expected squared norm tau. Unset: tau = (eta^2 / m) Tr Sigma^sgd(theta_t).
  std::optional<double> target_norm;
  // sgd only: draw an actual minibatch (with replacement) instead of the Gaussian.
  bool minibatch_resample = false;

  // Throws std::invalid_argument on k < 1, m < 1, sigma < 0, refresh < 1,
  // eta < 0 or a negative target.
  void validate() const;
};

/// Structural covariance Sigma_t before the sigma_t scaling.
struct NoiseCovariance {
  enum class Form { zero, isotropic, diagonal, factor };

  Form form = Form::zero;
  Index dim = 0;
  Vector variances;      // diagonal form
  LowRankFactor factor;  // factor form, Sigma = F F^T

  static NoiseCovariance zero(Index dim);
  static NoiseCovariance isotropic(Index dim);
  static NoiseCovariance diagonal(Vector variances);
  static NoiseCovariance from_factor(LowRankFactor f);

  double trace() const;
  SymmetricMatrix dense() const;
  // eps ~ N(0, Sigma); the zero form consumes no random numbers.
  Vector sample(RngStream& rng) const;
};

/// Per-trajectory cache. Never shared between trajectories.
struct NoiseState {
  // Leading Hessian eigenpairs as a factor (columns sqrt(lambda_i) u_i).
  std::optional<LowRankFactor> hessian_factor;
  double hessian_trace = 0.0;
  double lambda1 = 0.0;
  Index age = 0;  // steps served by the cached factor, <= refresh
  double last_sigma = 0.0;
  double last_target = 0.0;
};

/// Inputs to the recipe_coefficient policy that do not live in Sigma_t itself.
struct MagnitudeContext {
  double sgd_trace = 0.0;      // Tr Sigma^sgd(theta_t)
  double hessian_trace = 0.0;  // Tr H(theta_t)
  double lambda1 = 0.0;        // leading eigenvalue of H(theta_t)
};

/// sigma_t for a covariance of trace `covariance_trace`.
///
/// match_sgd_norm: sqrt(tau / Tr Sigma_t); tau = 0 gives 0; Tr Sigma_t = 0 with
///   tau > 0 throws DegenerateInputError.
/// recipe_coefficient: sgd and gld_leading eta/sqrt(m); gld_hessian
///   sqrt(Tr H / (m Tr Sigma^sgd)); gld_first_eigvec sqrt(lambda_1 / (m Tr Sigma^sgd));
///   gld_const sigma; gld_dynamic and gld_diag fall back to matching tau.
/// fixed_sigma: sigma.
double normalize_magnitude(const NoiseModel& model, double covariance_trace, double target,
                           const MagnitudeContext& ctx = {});

struct ResolvedNoise {
  NoiseCovariance covariance;
  double sigma = 0.0;
  double target = 0.0;  // tau used by match_sgd_norm

  double expected_squared_norm() const { return sigma * sigma * covariance.trace(); }
};

/// Sigma_t and sigma_t at theta. `bundle` may carry the gradient bundle at
/// theta when the caller already has it. Refreshes the cached Hessian factor
/// in `state` when its age has reached the refresh period.
ResolvedNoise noise_covariance(const NoiseModel& model, NoiseState& state, const LossSurface& surface,
                               const Vector& theta, const GradientBundle* bundle = nullptr);

/// sigma_t eps_t for one step.
Vector draw_noise(const NoiseModel& model, NoiseState& state, const LossSurface& surface, const Vector& theta,
                  RngStream& rng, const GradientBundle* bundle = nullptr);

}  // namespace aniso
