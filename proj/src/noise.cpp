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

#include "aniso/noise.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "aniso/errors.hpp"

namespace aniso {

namespace {

struct KindName {
  NoiseKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {NoiseKind::sgd, "sgd"},
    {NoiseKind::gld_const, "gld_const"},
    {NoiseKind::gld_dynamic, "gld_dynamic"},
    {NoiseKind::gld_diag, "gld_diag"},
    {NoiseKind::gld_leading, "gld_leading"},
    {NoiseKind::gld_hessian, "gld_hessian"},
    {NoiseKind::gld_first_eigvec, "gld_first_eigvec"},
};

std::string valid_kind_list() {
  std::string out;
  for (const auto& kn : kKindNames) {
    if (!out.empty()) out += ", ";
    out += kn.name;
  }
  return out;
}

// Whether sigma_t depends on Tr Sigma^sgd(theta_t).
bool needs_sgd_trace(const NoiseModel& model) {
  switch (model.normalization) {
    case Normalization::fixed_sigma:
      return false;
    case Normalization::match_sgd_norm:
      return !model.target_norm.has_value();
    case Normalization::recipe_coefficient:
      switch (model.kind) {
        case NoiseKind::gld_hessian:
        case NoiseKind::gld_first_eigvec:
          return true;
        case NoiseKind::gld_dynamic:
        case NoiseKind::gld_diag:
          return !model.target_norm.has_value();
        default:
          return false;
      }
  }
  return false;
}

double match(double covariance_trace, double target) {
  if (target == 0.0) return 0.0;
  if (!(covariance_trace > 0.0)) {
    throw DegenerateInputError("normalize_magnitude: covariance has zero trace, cannot reach target " +
                               std::to_string(target));
  }
  return std::sqrt(target / covariance_trace);
}

double sgd_ratio(double numerator, const NoiseModel& model, const MagnitudeContext& ctx) {
  const double denom = static_cast<double>(model.batch_size) * ctx.sgd_trace;
  if (!(denom > 0.0)) {
    throw DegenerateInputError("normalize_magnitude: recipe coefficient needs Tr Sigma^sgd > 0");
  }
  return std::sqrt(std::max(numerator, 0.0) / denom);
}

}  // namespace

const std::vector<NoiseKind>& all_noise_kinds() {
  static const std::vector<NoiseKind> kinds = [] {
    std::vector<NoiseKind> v;
    for (const auto& kn : kKindNames) v.push_back(kn.kind);
    return v;
  }();
  return kinds;
}

std::string_view noise_kind_name(NoiseKind kind) {
  for (const auto& kn : kKindNames) {
    if (kn.kind == kind) return kn.name;
  }
  return "unknown";
}

NoiseKind parse_noise_kind(std::string_view name) {
  for (const auto& kn : kKindNames) {
    if (kn.name == name) return kn.kind;
  }
  throw std::invalid_argument("unknown noise kind '" + std::string(name) + "' (valid: " + valid_kind_list() + ")");
}

std::string_view normalization_name(Normalization n) {
  switch (n) {
    case Normalization::match_sgd_norm:
      return "match_sgd_norm";
    case Normalization::recipe_coefficient:
      return "recipe_coefficient";
    case Normalization::fixed_sigma:
      return "fixed_sigma";
  }
  return "unknown";
}

Normalization parse_normalization(std::string_view name) {
  for (Normalization n : {Normalization::match_sgd_norm, Normalization::recipe_coefficient,
                          Normalization::fixed_sigma}) {
    if (normalization_name(n) == name) return n;
  }
  throw std::invalid_argument("unknown normalization '" + std::string(name) +
                              "' (valid: match_sgd_norm, recipe_coefficient, fixed_sigma)");
}

bool uses_gradient_covariance(NoiseKind kind) {
  return kind == NoiseKind::sgd || kind == NoiseKind::gld_diag || kind == NoiseKind::gld_leading;
}

bool uses_hessian(NoiseKind kind) {
  return kind == NoiseKind::gld_hessian || kind == NoiseKind::gld_first_eigvec;
}

void NoiseModel::validate() const {
  if (k < 1) throw std::invalid_argument("NoiseModel: k must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("NoiseModel: batch size m must be >= 1");
  if (refresh < 1) throw std::invalid_argument("NoiseModel: refresh period must be >= 1");
  if (!(sigma >= 0.0)) throw std::invalid_argument("NoiseModel: sigma must be >= 0");
  if (!(eta >= 0.0)) throw std::invalid_argument("NoiseModel: eta must be >= 0");
  if (target_norm && !(*target_norm >= 0.0)) throw std::invalid_argument("NoiseModel: target norm must be >= 0");
  if (minibatch_resample && kind != NoiseKind::sgd) {
    throw std::invalid_argument("NoiseModel: minibatch resampling applies to sgd only");
  }
}

// --- covariance forms ------------------------------------------------------

NoiseCovariance NoiseCovariance::zero(Index dim) {
  NoiseCovariance c;
  c.form = Form::zero;
  c.dim = dim;
  return c;
}

NoiseCovariance NoiseCovariance::isotropic(Index dim) {
  NoiseCovariance c;
  c.form = Form::isotropic;
  c.dim = dim;
  return c;
}

NoiseCovariance NoiseCovariance::diagonal(Vector variances) {
  NoiseCovariance c;
  c.form = Form::diagonal;
  c.dim = variances.size();
  c.variances = std::move(variances);
  return c;
}

NoiseCovariance NoiseCovariance::from_factor(LowRankFactor f) {
  NoiseCovariance c;
  c.form = Form::factor;
  c.dim = f.dim();
  c.factor = std::move(f);
  return c;
}

double NoiseCovariance::trace() const {
  switch (form) {
    case Form::zero:
      return 0.0;
    case Form::isotropic:
      return static_cast<double>(dim);
    case Form::diagonal:
      return variances.sum();
    case Form::factor:
      return factor.trace();
  }
  return 0.0;
}

SymmetricMatrix NoiseCovariance::dense() const {
  switch (form) {
    case Form::zero:
      return SymmetricMatrix(dim);
    case Form::isotropic:
      return SymmetricMatrix::identity(dim);
    case Form::diagonal:
      return SymmetricMatrix::diagonal(variances);
    case Form::factor:
      return factor.dense();
  }
  return SymmetricMatrix(dim);
}

Vector NoiseCovariance::sample(RngStream& rng) const {
  switch (form) {
    case Form::zero:
      return Vector::Zero(dim);
    case Form::isotropic:
      return rng.normal_vector(dim);
    case Form::diagonal:
      return variances.cwiseSqrt().cwiseProduct(rng.normal_vector(dim));
    case Form::factor:
      return sample_gaussian(factor, rng);
  }
  return Vector::Zero(dim);
}

// --- magnitude -------------------------------------------------------------

double normalize_magnitude(const NoiseModel& model, double covariance_trace, double target,
                           const MagnitudeContext& ctx) {
  if (!(target >= 0.0)) throw std::invalid_argument("normalize_magnitude: target must be >= 0");
  switch (model.normalization) {
    case Normalization::fixed_sigma:
      return model.sigma;
    case Normalization::match_sgd_norm:
      return match(covariance_trace, target);
    case Normalization::recipe_coefficient:
      switch (model.kind) {
        case NoiseKind::sgd:
        case NoiseKind::gld_leading:
          return model.eta / std::sqrt(static_cast<double>(model.batch_size));
        case NoiseKind::gld_const:
          return model.sigma;
        case NoiseKind::gld_hessian:
          return sgd_ratio(ctx.hessian_trace, model, ctx);
        case NoiseKind::gld_first_eigvec:
          return sgd_ratio(ctx.lambda1, model, ctx);
        case NoiseKind::gld_dynamic:
        case NoiseKind::gld_diag:
          return match(covariance_trace, target);
      }
  }
  return 0.0;
}

// --- per-step covariance -----------------------------------------------------

namespace {

void refresh_hessian(const NoiseModel& model, NoiseState& state, const LossSurface& surface, const Vector& theta) {
  if (state.hessian_factor && state.age < model.refresh) return;
  const EigenDecomposition eig = surface.hessian_eigen(theta);
  state.lambda1 = eig.size() > 0 ? eig.eigenvalues[0] : 0.0;
  state.hessian_trace = eig.eigenvalues.sum();
  const Index k = model.kind == NoiseKind::gld_first_eigvec ? 1 : model.k;
  state.hessian_factor = leading_factor(eig, k);
  state.age = 0;
}

}  // namespace

ResolvedNoise noise_covariance(const NoiseModel& model, NoiseState& state, const LossSurface& surface,
                               const Vector& theta, const GradientBundle* bundle) {
  model.validate();
  if (theta.size() != surface.dim()) throw std::invalid_argument("noise_covariance: theta has wrong dimension");
  const Index d = surface.dim();

  GradientBundle local;
  const bool need_bundle = uses_gradient_covariance(model.kind) || needs_sgd_trace(model) ||
                           (model.kind == NoiseKind::gld_dynamic && !model.target_norm);
  if (need_bundle && bundle == nullptr) {
    if (surface.dataset() == nullptr) {
      throw std::invalid_argument("noise_covariance: " + std::string(noise_kind_name(model.kind)) +
                                  " needs per-example gradients but the surface has no dataset");
    }
    local = gradient_bundle(surface, theta);
    bundle = &local;
  }

  MagnitudeContext ctx;
  if (bundle != nullptr) ctx.sgd_trace = bundle->covariance_trace();
  const double n = bundle != nullptr ? static_cast<double>(bundle->examples()) : 1.0;

  ResolvedNoise out;
  switch (model.kind) {
    case NoiseKind::sgd: {
      LowRankFactor f;
      f.columns = bundle->centered().transpose() / std::sqrt(n);
      out.covariance = NoiseCovariance::from_factor(std::move(f));
      break;
    }
    case NoiseKind::gld_const:
    case NoiseKind::gld_dynamic:
      out.covariance = NoiseCovariance::isotropic(d);
      break;
    case NoiseKind::gld_diag:
      out.covariance = NoiseCovariance::diagonal(bundle->centered().colwise().squaredNorm().transpose() / n);
      break;
    case NoiseKind::gld_leading:
      out.covariance = NoiseCovariance::from_factor(leading_factor(eig_from_rows(bundle->centered(), 1.0 / n), model.k));
      break;
    case NoiseKind::gld_hessian:
    case NoiseKind::gld_first_eigvec:
      refresh_hessian(model, state, surface, theta);
      if (model.kind == NoiseKind::gld_first_eigvec && !(state.lambda1 > 0.0)) {
        throw DegenerateInputError("noise_covariance: gld_first_eigvec needs a positive leading Hessian eigenvalue, got " +
                                   std::to_string(state.lambda1));
      }
      out.covariance = NoiseCovariance::from_factor(*state.hessian_factor);
      ++state.age;
      ctx.hessian_trace = state.hessian_trace;
      ctx.lambda1 = state.lambda1;
      break;
  }

  const double m = static_cast<double>(model.batch_size);
  out.target = model.target_norm ? *model.target_norm : model.eta * model.eta / m * ctx.sgd_trace;
  out.sigma = normalize_magnitude(model, out.covariance.trace(), out.target, ctx);
  state.last_sigma = out.sigma;
  state.last_target = out.target;
  return out;
}

Vector draw_noise(const NoiseModel& model, NoiseState& state, const LossSurface& surface, const Vector& theta,
                  RngStream& rng, const GradientBundle* bundle) {
  GradientBundle local;
  if (model.minibatch_resample && bundle == nullptr) {
    if (surface.dataset() == nullptr) {
      throw std::invalid_argument("draw_noise: minibatch resampling needs a dataset");
    }
    local = gradient_bundle(surface, theta);
    bundle = &local;
  }
  const ResolvedNoise r = noise_covariance(model, state, surface, theta, bundle);
  if (r.sigma == 0.0) return Vector::Zero(surface.dim());

  if (model.minibatch_resample) {
    // g_B - g0 has covariance Sigma / m when indices are drawn with replacement.
    const auto n = static_cast<std::size_t>(bundle->examples());
    Vector g_batch = Vector::Zero(surface.dim());
    for (Index j = 0; j < model.batch_size; ++j) {
      g_batch += bundle->per_example.row(static_cast<Index>(rng.index(n))).transpose();
    }
    g_batch /= static_cast<double>(model.batch_size);
    return r.sigma * std::sqrt(static_cast<double>(model.batch_size)) * (g_batch - bundle->mean_gradient);
  }
  return r.sigma * r.covariance.sample(rng);
}

}  // namespace aniso
