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

#include "aniso/indicators.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "aniso/errors.hpp"
#include "aniso/format.hpp"

namespace aniso {

OuExpectedLoss ou_expected_loss_closed(const SymmetricMatrix& h, const SymmetricMatrix& sigma, double t) {
  if (h.dim() != sigma.dim()) throw std::invalid_argument("ou_expected_loss_closed: dimension mismatch");
  if (!(t >= 0.0)) throw std::invalid_argument("ou_expected_loss_closed: t must be >= 0");
  const EigenDecomposition eig = eig_sym(h);
  // I - exp(-2 H t) = U diag(-expm1(-2 lambda t)) U^T; expm1 keeps small t accurate.
  const Vector w = (-2.0 * t * eig.eigenvalues).unaryExpr([](double x) { return -std::expm1(x); });
  const Matrix sigma_u = eig.eigenvectors.transpose() * sigma.matrix() * eig.eigenvectors;
  const double exact = 0.25 * w.dot(sigma_u.diagonal());
  return {exact, 0.5 * t * trace_product(h, sigma)};
}

ProjectionCoefficient projection_coefficient(const EigenDecomposition& h_eig, double h_trace,
                                             const SymmetricMatrix& sigma) {
  const double sigma_trace = sigma.trace();
  if (!(sigma_trace > 0.0)) throw DegenerateInputError("projection_coefficient: Tr Sigma must be > 0");
  if (h_eig.size() == 0 || !(h_eig.eigenvalues[0] > 0.0)) {
    throw DegenerateInputError("projection_coefficient: leading Hessian eigenvalue must be > 0");
  }
  if (h_eig.eigenvectors.rows() != sigma.dim()) throw std::invalid_argument("projection_coefficient: dimension mismatch");
  const double lambda1 = h_eig.eigenvalues[0];

  ProjectionCoefficient out;
  out.multiplicity = 1;
  while (out.multiplicity < h_eig.size() &&
         std::abs(h_eig.eigenvalues[out.multiplicity] - lambda1) <= 1e-8 * lambda1) {
    ++out.multiplicity;
  }
  out.degenerate = out.multiplicity > 1;
  const Matrix u = h_eig.eigenvectors.leftCols(out.multiplicity);
  const double projected = (u.transpose() * sigma.matrix() * u).trace() / static_cast<double>(out.multiplicity);
  out.value = projected * h_trace / (lambda1 * sigma_trace);
  return out;
}

IndicatorReport escape_indicator_report(const SymmetricMatrix& h, const SymmetricMatrix& sigma,
                                        const EigenDecomposition* h_eig, Index leading) {
  if (h.dim() != sigma.dim()) throw std::invalid_argument("escape_indicator_report: dimension mismatch");
  EigenDecomposition local;
  if (h_eig == nullptr) {
    local = eig_sym(h);
    h_eig = &local;
  }
  IndicatorReport r;
  r.hessian_trace = h.trace();
  r.sigma_trace = sigma.trace();
  r.tr_h_sigma = trace_product(h, sigma);
  r.tr_h_sigma_iso = r.sigma_trace / static_cast<double>(h.dim()) * r.hessian_trace;
  r.anisotropy_ratio =
      r.tr_h_sigma_iso > 0.0 ? r.tr_h_sigma / r.tr_h_sigma_iso : std::numeric_limits<double>::quiet_NaN();
  try {
    r.a_hat = projection_coefficient(*h_eig, r.hessian_trace, sigma);
  } catch (const DegenerateInputError&) {
    r.a_hat.reset();
  }
  r.leading_hessian_eigenvalues = h_eig->eigenvalues.head(std::min(leading, h_eig->size()));
  return r;
}

SymmetricMatrix optimal_covariance(const SymmetricMatrix& h, double trace_budget) {
  if (!(trace_budget > 0.0)) throw std::invalid_argument("optimal_covariance: trace budget must be > 0");
  const EigenDecomposition eig = eig_sym(h);
  if (!(eig.eigenvalues[0] > 0.0)) {
    throw DegenerateInputError("optimal_covariance: flat curvature, leading eigenvalue " +
                               format_number(eig.eigenvalues[0]));
  }
  return SymmetricMatrix::outer(eig.eigenvectors.col(0), trace_budget);
}

SharpnessEstimate expected_sharpness(const LossSurface& surface, const Vector& theta, double delta, long samples,
                                     RngStream& rng) {
  if (!(delta >= 0.0)) throw std::invalid_argument("expected_sharpness: delta must be >= 0");
  if (samples < 1) throw std::invalid_argument("expected_sharpness: need at least one sample");
  if (delta == 0.0) return {0.0, 0.0};
  const double base = surface.loss(theta);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long i = 0; i < samples; ++i) {
    const double v = surface.loss(theta + delta * rng.normal_vector(theta.size())) - base;
    sum += v;
    sum_sq += v * v;
  }
  const double m = static_cast<double>(samples);
  const double mean = sum / m;
  const double var = samples > 1 ? std::max(sum_sq - m * mean * mean, 0.0) / (m - 1.0) : 0.0;
  return {mean, std::sqrt(var / m)};
}

double escape_efficiency_integrand(const LossSurface& surface, const Vector& theta, const SymmetricMatrix& sigma) {
  const Vector g = surface.gradient(theta);
  return -g.squaredNorm() + 0.5 * trace_product(surface.hessian(theta), sigma);
}

SandwichResult sandwich_check(const OneHiddenNet& net, const Vector& theta, const Dataset& data, double tolerance) {
  const GaussNewton gn = gauss_newton_matrices(net, theta, data);
  SandwichResult r;
  r.c_hat = gn.c_hat;
  r.fisher_norm = spectral_norm(gn.fisher);
  r.upper_margin = min_eigenvalue(gn.fisher * std::exp(gn.c_hat) - gn.hessian);
  r.lower_margin = min_eigenvalue(gn.hessian - gn.fisher * std::exp(-gn.c_hat));
  const double floor = -tolerance * r.fisher_norm;
  r.pass = r.upper_margin >= floor && r.lower_margin >= floor;
  return r;
}

AlignmentResult alignment_check(const SymmetricMatrix& h, const SymmetricMatrix& sigma, double c, double delta,
                                double tolerance) {
  if (h.dim() != sigma.dim()) throw std::invalid_argument("alignment_check: dimension mismatch");
  if (!(delta >= 0.0)) throw std::invalid_argument("alignment_check: delta must be >= 0");
  const double h_trace = h.trace();
  if (!(h_trace > 0.0)) throw DegenerateInputError("alignment_check: Tr H must be > 0");
  const double sigma_trace = sigma.trace();
  const EigenDecomposition eig = eig_sym(h);
  const double lambda1 = eig.eigenvalues[0];
  const double scale = std::exp(-2.0 * (c + delta)) * sigma_trace / h_trace;

  AlignmentResult out;
  out.min_margin = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < eig.size() && eig.eigenvalues[i] > 1e-10 * lambda1; ++i) {
    const Vector u = eig.eigenvectors.col(i);
    AlignmentMargin m;
    m.eigenvalue = eig.eigenvalues[i];
    m.projection = u.dot(sigma.matrix() * u);
    m.bound = scale * m.eigenvalue;
    m.margin = m.projection - m.bound;
    out.min_margin = std::min(out.min_margin, m.margin);
    out.margins.push_back(m);
  }
  out.pass = out.min_margin >= -tolerance * sigma_trace;
  return out;
}

NoiseDominance noise_dominance(const LossSurface& surface, const Vector& theta, Index batch_size, double eta) {
  if (batch_size < 1) throw std::invalid_argument("noise_dominance: batch size must be >= 1");
  const GradientBundle b = gradient_bundle(surface, theta);
  NoiseDominance out;
  out.grad_norm = b.mean_gradient.norm();
  out.expected_noise_norm = std::sqrt(eta * b.covariance_trace() / static_cast<double>(batch_size));
  out.ratio = out.expected_noise_norm > 0.0 ? out.grad_norm / out.expected_noise_norm
                                            : std::numeric_limits<double>::infinity();
  return out;
}

std::string indicator_csv_header() {
  return "tr_h_sigma,tr_h_sigma_iso,anisotropy_ratio,a_hat,a_hat_degenerate,hessian_trace,sigma_trace,lambda_1";
}

std::string indicator_csv_row(const IndicatorReport& r) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double lambda1 = r.leading_hessian_eigenvalues.size() > 0 ? r.leading_hessian_eigenvalues[0] : nan;
  std::string row = format_number(r.tr_h_sigma) + ',' + format_number(r.tr_h_sigma_iso) + ',' +
                    format_number(r.anisotropy_ratio) + ',' + format_number(r.a_hat ? r.a_hat->value : nan) + ',' +
                    (r.a_hat && r.a_hat->degenerate ? "1" : "0") + ',' + format_number(r.hessian_trace) + ',' +
                    format_number(r.sigma_trace) + ',' + format_number(lambda1);
  return row;
}

void write_indicator_text(std::ostream& out, const IndicatorReport& r, const SandwichResult* sandwich,
                          const AlignmentResult* alignment) {
  out << "Tr(H Sigma)        " << format_number(r.tr_h_sigma) << '\n';
  out << "Tr(H Sigma_bar)    " << format_number(r.tr_h_sigma_iso) << '\n';
  out << "anisotropy ratio   " << format_number(r.anisotropy_ratio) << '\n';
  if (r.a_hat) {
    out << "a_hat              " << format_number(r.a_hat->value);
    if (r.a_hat->degenerate) out << " (repeated lambda_1, multiplicity " << r.a_hat->multiplicity << ')';
    out << '\n';
  } else {
    out << "a_hat              undefined\n";
  }
  out << "leading eigenvalues";
  for (Index i = 0; i < r.leading_hessian_eigenvalues.size(); ++i) {
    out << ' ' << format_number(r.leading_hessian_eigenvalues[i]);
  }
  out << '\n';
  if (sandwich != nullptr) {
    out << (sandwich->pass ? "PASS" : "FAIL") << " sandwich: upper margin " << format_number(sandwich->upper_margin)
        << ", lower margin " << format_number(sandwich->lower_margin) << ", C " << format_number(sandwich->c_hat)
        << '\n';
  }
  if (alignment != nullptr) {
    out << (alignment->pass ? "PASS" : "FAIL") << " alignment: min margin " << format_number(alignment->min_margin)
        << " over " << alignment->margins.size() << " eigenpairs\n";
  }
}

}  // namespace aniso
