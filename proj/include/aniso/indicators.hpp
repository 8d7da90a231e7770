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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aniso/losses.hpp"
#include "aniso/rng.hpp"
#include "aniso/symmat.hpp"

namespace aniso {

/// E L_t = 1/4 Tr((I - exp(-2 H t)) Sigma) for the OU process started at the
/// minimum, and its first-order form (t/2) Tr(H Sigma).
struct OuExpectedLoss {
  double exact;
  double small_t;
};

OuExpectedLoss ou_expected_loss_closed(const SymmetricMatrix& h, const SymmetricMatrix& sigma, double t);

/// a_hat = u1^T Sigma u1 Tr H / (lambda_1 Tr Sigma). When lambda_1 repeats
/// (within 1e-8 relative) u1^T Sigma u1 becomes Tr(P Sigma) / rank P with P
/// the projector onto the repeated eigenspace, and `degenerate` is set.
struct ProjectionCoefficient {
  double value = 0.0;
  bool degenerate = false;
  Index multiplicity = 1;
};

/// `h_eig` holds H's leading eigenpairs (enough to cover a repeated lambda_1);
/// `h_trace` is Tr H. Throws DegenerateInputError on Tr Sigma = 0 or lambda_1 <= 0.
ProjectionCoefficient projection_coefficient(const EigenDecomposition& h_eig, double h_trace,
                                             const SymmetricMatrix& sigma);

struct IndicatorReport {
  double tr_h_sigma = 0.0;
  double tr_h_sigma_iso = 0.0;  // Tr(H Sigma_bar), Sigma_bar = (Tr Sigma / D) I
  double anisotropy_ratio = 0.0;  // NaN when tr_h_sigma_iso <= 0
  std::optional<ProjectionCoefficient> a_hat;  // empty when undefined
  Vector leading_hessian_eigenvalues;
  double hessian_trace = 0.0;
  double sigma_trace = 0.0;
};

/// Core fields for a PSD pair. `h_eig`, when given, replaces the dense
/// eigendecomposition of H (e.g. one computed through a Gram matrix).
IndicatorReport escape_indicator_report(const SymmetricMatrix& h, const SymmetricMatrix& sigma,
                                        const EigenDecomposition* h_eig = nullptr, Index leading = 10);

/// budget * u1 u1^T, the trace-constrained maximiser of Tr(H Sigma).
/// Throws DegenerateInputError when lambda_1 <= 0.
SymmetricMatrix optimal_covariance(const SymmetricMatrix& h, double trace_budget);

struct SharpnessEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// E_{nu ~ N(0, delta^2 I)} L(theta + nu) - L(theta) over M draws.
SharpnessEstimate expected_sharpness(const LossSurface& surface, const Vector& theta, double delta, long samples,
                                     RngStream& rng);

/// -|grad L|^2 + 1/2 Tr(H Sigma): the drift of E L_t along the dynamics.
double escape_efficiency_integrand(const LossSurface& surface, const Vector& theta, const SymmetricMatrix& sigma);

struct SandwichResult {
  double upper_margin = 0.0;  // min eig(e^C F - H)
  double lower_margin = 0.0;  // min eig(H - e^-C F)
  double c_hat = 0.0;
  double fisher_norm = 0.0;   // |F|_2
  bool pass = false;          // both margins >= -tolerance |F|_2
};

SandwichResult sandwich_check(const OneHiddenNet& net, const Vector& theta, const Dataset& data,
                              double tolerance = 1e-8);

struct AlignmentMargin {
  double eigenvalue;
  double projection;  // u^T Sigma u
  double bound;       // e^{-2(C + delta)} lambda Tr Sigma / Tr H
  double margin;      // projection - bound
};

struct AlignmentResult {
  std::vector<AlignmentMargin> margins;  // one per eigenvalue > 1e-10 lambda_1
  double min_margin = 0.0;
  bool pass = false;  // every margin >= -tolerance Tr Sigma
};

/// Throws DegenerateInputError when Tr H <= 0.
AlignmentResult alignment_check(const SymmetricMatrix& h, const SymmetricMatrix& sigma, double c, double delta,
                                double tolerance = 1e-8);

struct NoiseDominance {
  double grad_norm = 0.0;
  double expected_noise_norm = 0.0;  // sqrt(eta Tr Sigma^sgd / m)
  double ratio = 0.0;                // +inf when the noise norm is 0
};

NoiseDominance noise_dominance(const LossSurface& surface, const Vector& theta, Index batch_size, double eta);

/// One flat CSV row per report: the columns of indicator_csv_header().
std::string indicator_csv_header();
std::string indicator_csv_row(const IndicatorReport& r);

/// Human-readable summary with PASS/FAIL lines for whichever checks are given.
void write_indicator_text(std::ostream& out, const IndicatorReport& r, const SandwichResult* sandwich = nullptr,
                          const AlignmentResult* alignment = nullptr);

}  // namespace aniso
