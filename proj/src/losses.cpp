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

#include "aniso/losses.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aniso {

namespace {

double sigmoid(double f) {
  if (f >= 0.0) return 1.0 / (1.0 + std::exp(-f));
  const double e = std::exp(f);
  return e / (1.0 + e);
}

// log(1 + e^f) without overflow
double softplus(double f) { return std::max(f, 0.0) + std::log1p(std::exp(-std::abs(f))); }

const double kInvSqrt2 = std::sqrt(0.5);
const Eigen::Vector2d kAxisU{kInvSqrt2, -kInvSqrt2};
const Eigen::Vector2d kAxisV{kInvSqrt2, kInvSqrt2};

}  // namespace

PhiDerivatives phi_derivatives(double f, int y) {
  // softplus(f) - f = softplus(-f); the reflected forms keep tiny values exact.
  const double s = sigmoid(f), r = sigmoid(-f);
  return {y == 1 ? softplus(-f) : softplus(f), y == 1 ? -r : s, s * r};
}

ExampleGradients LossSurface::example_gradients(const Vector&) const {
  throw std::logic_error("example_gradients: surface has no attached dataset");
}

Matrix GradientBundle::centered() const { return per_example.rowwise() - mean_gradient.transpose(); }

SymmetricMatrix GradientBundle::covariance() const {
  return SymmetricMatrix::gram(centered(), 1.0 / static_cast<double>(examples()));
}

double GradientBundle::covariance_trace() const {
  return centered().squaredNorm() / static_cast<double>(examples());
}

GradientBundle gradient_bundle(const LossSurface& surface, const Vector& theta) {
  ExampleGradients eg = surface.example_gradients(theta);
  GradientBundle b;
  b.loss = eg.loss;
  b.mean_gradient = eg.per_example.colwise().mean().transpose();
  b.per_example = std::move(eg.per_example);
  return b;
}

// --- quadratic -------------------------------------------------------------

QuadraticSurface::QuadraticSurface(SymmetricMatrix h, Vector center)
    : h_(std::move(h)), center_(std::move(center)) {
  if (center_.size() != h_.dim()) throw std::invalid_argument("QuadraticSurface: center has wrong dimension");
}

QuadraticSurface::QuadraticSurface(SymmetricMatrix h)
    : QuadraticSurface(h, Vector::Zero(h.dim())) {}

double QuadraticSurface::loss(const Vector& theta) const {
  const Vector d = theta - center_;
  return 0.5 * d.dot(h_.matrix() * d);
}

ValueGradient QuadraticSurface::value_and_gradient(const Vector& theta) const {
  const Vector d = theta - center_;
  Vector g = h_.matrix() * d;
  return {0.5 * d.dot(g), std::move(g)};
}

// --- toy 2-D ---------------------------------------------------------------

Toy2dExample toy2d_example(const Eigen::Vector2d& w, const Eigen::Vector2d& x) {
  const Eigen::Vector2d s = w - Eigen::Vector2d::Ones() - x;
  const double u = kAxisU.dot(s);
  const double v = kAxisV.dot(s);
  const double quadric = 10.0 * u * u + 100.0 * v * v;
  const Eigen::Vector2d r = w - x + Eigen::Vector2d::Ones();
  const double bowl = r.squaredNorm();

  Toy2dExample e;
  e.branch_gap = std::abs(quadric - bowl);
  e.sharp_branch = quadric <= bowl;
  if (e.sharp_branch) {
    e.loss = quadric;
    e.gradient = 20.0 * u * kAxisU + 200.0 * v * kAxisV;
  } else {
    e.loss = bowl;
    e.gradient = 2.0 * r;
  }
  return e;
}

ValueGradient toy2d_value_grad(const Vector& w, const Dataset& data) {
  if (w.size() != 2 || data.input_dim() != 2) throw std::invalid_argument("toy2d_value_grad: expects 2-D points");
  const Eigen::Vector2d w2 = w;
  double total = 0.0;
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
  for (Index k = 0; k < data.size(); ++k) {
    const Toy2dExample e = toy2d_example(w2, data.inputs.row(k).transpose());
    total += e.loss;
    grad += e.gradient;
  }
  const double n = static_cast<double>(data.size());
  return {total / n, grad / n};
}

Toy2dHessian toy2d_hessian(const Vector& w, const Dataset& data) {
  if (w.size() != 2 || data.input_dim() != 2) throw std::invalid_argument("toy2d_hessian: expects 2-D points");
  const Eigen::Matrix2d sharp = 20.0 * kAxisU * kAxisU.transpose() + 200.0 * kAxisV * kAxisV.transpose();
  const Eigen::Matrix2d bowl = 2.0 * Eigen::Matrix2d::Identity();
  const Eigen::Vector2d w2 = w;
  Index n_sharp = 0;
  bool near = false;
  for (Index k = 0; k < data.size(); ++k) {
    const Toy2dExample e = toy2d_example(w2, data.inputs.row(k).transpose());
    if (e.sharp_branch) ++n_sharp;
    if (e.branch_gap <= 1e-9) near = true;
  }
  const double frac = static_cast<double>(n_sharp) / static_cast<double>(data.size());
  return {SymmetricMatrix(Matrix(frac * sharp + (1.0 - frac) * bowl)), near};
}

Toy2dSurface::Toy2dSurface(Dataset data) : data_(std::move(data)) {
  data_.validate();
  if (data_.input_dim() != 2) throw std::invalid_argument("Toy2dSurface: dataset must be 2-D");
}

double Toy2dSurface::loss(const Vector& w) const { return toy2d_value_grad(w, data_).loss; }

ValueGradient Toy2dSurface::value_and_gradient(const Vector& w) const { return toy2d_value_grad(w, data_); }

SymmetricMatrix Toy2dSurface::hessian(const Vector& w) const { return toy2d_hessian(w, data_).hessian; }

ExampleGradients Toy2dSurface::example_gradients(const Vector& w) const {
  if (w.size() != 2) throw std::invalid_argument("Toy2dSurface: expects a 2-vector");
  const Eigen::Vector2d w2 = w;
  ExampleGradients out;
  out.per_example.resize(data_.size(), 2);
  double total = 0.0;
  for (Index k = 0; k < data_.size(); ++k) {
    const Toy2dExample e = toy2d_example(w2, data_.inputs.row(k).transpose());
    total += e.loss;
    out.per_example.row(k) = e.gradient.transpose();
  }
  out.loss = total / static_cast<double>(data_.size());
  return out;
}

// --- one-hidden-layer network ----------------------------------------------

OneHiddenNet::OneHiddenNet(Index hidden, Vector output_weights, Dataset data)
    : hidden_(hidden), input_dim_(data.input_dim()), v_(std::move(output_weights)), data_(std::move(data)) {
  data_.validate();
  if (hidden_ < 1) throw std::invalid_argument("OneHiddenNet: hidden width must be >= 1");
  if (v_.size() != hidden_) throw std::invalid_argument("OneHiddenNet: output weights must have length h");
}

Vector OneHiddenNet::alternating_output_weights(Index hidden) {
  Vector v(hidden);
  const double mag = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (Index i = 0; i < hidden; ++i) v[i] = (i % 2 == 0) ? mag : -mag;
  return v;
}

void OneHiddenNet::check_theta(const Vector& theta) const {
  if (theta.size() != dim()) {
    throw std::invalid_argument("OneHiddenNet: parameter vector has length " + std::to_string(theta.size()) +
                                ", expected " + std::to_string(dim()));
  }
}

Vector OneHiddenNet::initial_parameters(RngStream& rng) const {
  const double sd = 1.0 / std::sqrt(static_cast<double>(input_dim_));
  Vector theta(dim());
  for (Index i = 0; i < theta.size(); ++i) theta[i] = sd * rng.normal();
  return theta;
}

OneHiddenNet::ForwardJacobian OneHiddenNet::forward_jacobian(const Vector& theta, const Vector& x) const {
  check_theta(theta);
  if (x.size() != input_dim_) throw std::invalid_argument("forward_jacobian: input has wrong dimension");
  ForwardJacobian out{0.0, Vector::Zero(dim())};
  const Index p = input_dim_;
  for (Index i = 0; i < hidden_; ++i) {
    const double pre = theta.segment(i * p, p).dot(x) + theta[hidden_ * p + i];
    if (pre > 0.0) {
      out.f += v_[i] * pre;
      out.jacobian.segment(i * p, p) = v_[i] * x;
      out.jacobian[hidden_ * p + i] = v_[i];
    }
  }
  return out;
}

Vector OneHiddenNet::outputs(const Vector& theta, const Matrix& inputs) const {
  check_theta(theta);
  const Index p = input_dim_;
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w(
      theta.data(), hidden_, p);
  Matrix pre = inputs * w.transpose();
  pre.rowwise() += theta.tail(hidden_).transpose();
  return pre.cwiseMax(0.0) * v_;
}

Matrix OneHiddenNet::jacobians(const Vector& theta, const Matrix& inputs, Vector* outputs) const {
  check_theta(theta);
  const Index p = input_dim_;
  const Index n = inputs.rows();
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w(
      theta.data(), hidden_, p);
  Matrix pre = inputs * w.transpose();
  pre.rowwise() += theta.tail(hidden_).transpose();
  if (outputs != nullptr) *outputs = pre.cwiseMax(0.0) * v_;

  Matrix jac = Matrix::Zero(n, dim());
  for (Index i = 0; i < hidden_; ++i) {
    for (Index r = 0; r < n; ++r) {
      if (pre(r, i) > 0.0) {
        jac.block(r, i * p, 1, p) = v_[i] * inputs.row(r);
        jac(r, hidden_ * p + i) = v_[i];
      }
    }
  }
  return jac;
}

double OneHiddenNet::loss_on(const Vector& theta, const Dataset& data) const {
  const Vector f = outputs(theta, data.inputs);
  double total = 0.0;
  for (Index r = 0; r < f.size(); ++r) total += phi_derivatives(f[r], data.labels[static_cast<std::size_t>(r)]).loss;
  return total / static_cast<double>(f.size());
}

double OneHiddenNet::accuracy(const Vector& theta, const Dataset& data) const {
  const Vector f = outputs(theta, data.inputs);
  Index hits = 0;
  for (Index r = 0; r < f.size(); ++r) {
    const int pred = f[r] > 0.0 ? 1 : 0;
    if (pred == data.labels[static_cast<std::size_t>(r)]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(f.size());
}

double OneHiddenNet::loss(const Vector& theta) const { return loss_on(theta, data_); }

ExampleGradients OneHiddenNet::example_gradients(const Vector& theta) const {
  Vector f;
  Matrix jac = jacobians(theta, data_.inputs, &f);
  double total = 0.0;
  for (Index r = 0; r < f.size(); ++r) {
    const PhiDerivatives d = phi_derivatives(f[r], data_.labels[static_cast<std::size_t>(r)]);
    total += d.loss;
    jac.row(r) *= d.first;
  }
  return {total / static_cast<double>(f.size()), std::move(jac)};
}

ValueGradient OneHiddenNet::value_and_gradient(const Vector& theta) const {
  ExampleGradients eg = example_gradients(theta);
  return {eg.loss, eg.per_example.colwise().mean().transpose()};
}

SymmetricMatrix OneHiddenNet::hessian(const Vector& theta) const {
  return gauss_newton_matrices(*this, theta, data_).hessian;
}

Matrix OneHiddenNet::curvature_rows(const Vector& theta) const {
  Vector f;
  Matrix jac = jacobians(theta, data_.inputs, &f);
  const double inv_n = 1.0 / static_cast<double>(f.size());
  for (Index r = 0; r < f.size(); ++r) {
    jac.row(r) *= std::sqrt(phi_derivatives(f[r], data_.labels[static_cast<std::size_t>(r)]).second * inv_n);
  }
  return jac;
}

EigenDecomposition OneHiddenNet::hessian_eigen(const Vector& theta) const {
  return eig_from_rows(curvature_rows(theta), 1.0);
}

GaussNewton gauss_newton_matrices(const OneHiddenNet& net, const Vector& theta, const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("gauss_newton_matrices: empty dataset");
  if (data.input_dim() != net.input_dim()) throw std::invalid_argument("gauss_newton_matrices: input dimension mismatch");
  Vector f;
  const Matrix jac = net.jacobians(theta, data.inputs, &f);
  const Index n = data.size();
  Matrix h_rows(n, jac.cols());
  Matrix f_rows(n, jac.cols());
  double c_hat = 0.0;
  for (Index r = 0; r < n; ++r) {
    const PhiDerivatives d = phi_derivatives(f[r], data.labels[static_cast<std::size_t>(r)]);
    h_rows.row(r) = std::sqrt(d.second) * jac.row(r);
    f_rows.row(r) = d.first * jac.row(r);
    c_hat = std::max(c_hat, std::abs(f[r]));
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  return {SymmetricMatrix::gram(h_rows, inv_n), SymmetricMatrix::gram(f_rows, inv_n), c_hat};
}

}  // namespace aniso
