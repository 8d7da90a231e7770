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

#include <memory>

#include <Eigen/Core>

#include "aniso/dataset.hpp"
#include "aniso/symmat.hpp"

namespace aniso {

enum class SurfaceKind { quadratic, toy2d, one_hidden_net };

/// Binary cross-entropy on a logit, with its first two derivatives in f.
struct PhiDerivatives {
  double loss;
  double first;
  double second;
};

PhiDerivatives phi_derivatives(double f, int y);

struct ValueGradient {
  double loss;
  Vector gradient;
};

struct ExampleGradients {
  double loss;         // mean loss
  Matrix per_example;  // N x D, row i is the gradient of example i
};

/// An objective L(theta) with gradient and Hessian access. Surfaces are
/// immutable after construction and safe to evaluate concurrently.
class LossSurface {
 public:
  virtual ~LossSurface() = default;

  virtual SurfaceKind kind() const = 0;
  virtual Index dim() const = 0;
  virtual double loss(const Vector& theta) const = 0;
  virtual ValueGradient value_and_gradient(const Vector& theta) const = 0;
  virtual SymmetricMatrix hessian(const Vector& theta) const = 0;
  // Eigenpairs of hessian(theta), descending. Implementations may omit
  // eigenvalues that are exactly zero by construction.
  virtual EigenDecomposition hessian_eigen(const Vector& theta) const { return eig_sym(hessian(theta)); }

  // Attached training set, or nullptr for data-free surfaces.
  virtual const Dataset* dataset() const { return nullptr; }
  // Throws std::logic_error when the surface has no dataset.
  virtual ExampleGradients example_gradients(const Vector& theta) const;

  Vector gradient(const Vector& theta) const { return value_and_gradient(theta).gradient; }
};

/// g0, the per-example gradients, and the gradient covariance
/// Sigma = (1/N) sum_i (g_i - g0)(g_i - g0)^T.
struct GradientBundle {
  double loss = 0.0;
  Vector mean_gradient;
  Matrix per_example;

  Index examples() const { return per_example.rows(); }
  Matrix centered() const;
  SymmetricMatrix covariance() const;
  double covariance_trace() const;
};

GradientBundle gradient_bundle(const LossSurface& surface, const Vector& theta);

// ---------------------------------------------------------------------------
// Quadratic: L = 1/2 (theta - c)^T H (theta - c)
// ---------------------------------------------------------------------------

class QuadraticSurface final : public LossSurface {
 public:
  QuadraticSurface(SymmetricMatrix h, Vector center);
  explicit QuadraticSurface(SymmetricMatrix h);

  SurfaceKind kind() const override { return SurfaceKind::quadratic; }
  Index dim() const override { return h_.dim(); }
  double loss(const Vector& theta) const override;
  ValueGradient value_and_gradient(const Vector& theta) const override;
  SymmetricMatrix hessian(const Vector&) const override { return h_; }

  const SymmetricMatrix& curvature() const { return h_; }
  const Vector& center() const { return center_; }

 private:
  SymmetricMatrix h_;
  Vector center_;
};

// ---------------------------------------------------------------------------
// Two-basin toy surface. Per example x:
//   l(w; x) = min{ 10 u^2 + 100 v^2, |w - x + 1|^2 }
// with s = w - 1 - x, u = (s1 - s2)/sqrt 2, v = (s1 + s2)/sqrt 2.
// Ties take the first (sharp quadric) branch.
// ---------------------------------------------------------------------------

inline const Eigen::Vector2d kSharpMinimum{1.0, 1.0};
inline const Eigen::Vector2d kFlatMinimum{-1.0, -1.0};

struct Toy2dExample {
  double loss;
  Eigen::Vector2d gradient;
  bool sharp_branch;
  double branch_gap;  // |quadric - paraboloid|
};

Toy2dExample toy2d_example(const Eigen::Vector2d& w, const Eigen::Vector2d& x);
ValueGradient toy2d_value_grad(const Vector& w, const Dataset& data);

struct Toy2dHessian {
  SymmetricMatrix hessian;
  // Some example sits within 1e-9 of its branch switch; the Hessian uses the
  // active branch anyway.
  bool near_boundary = false;
};

Toy2dHessian toy2d_hessian(const Vector& w, const Dataset& data);

class Toy2dSurface final : public LossSurface {
 public:
  explicit Toy2dSurface(Dataset data);

  SurfaceKind kind() const override { return SurfaceKind::toy2d; }
  Index dim() const override { return 2; }
  double loss(const Vector& w) const override;
  ValueGradient value_and_gradient(const Vector& w) const override;
  SymmetricMatrix hessian(const Vector& w) const override;
  const Dataset* dataset() const override { return &data_; }
  ExampleGradients example_gradients(const Vector& w) const override;

 private:
  Dataset data_;
};

// ---------------------------------------------------------------------------
// One-hidden-layer rectifier network with a fixed output layer:
//   f(x; theta) = v^T relu(W x + b),  theta = [W (row-major, h x p), b (h)].
// Zero pre-activation counts as inactive.
// ---------------------------------------------------------------------------

class OneHiddenNet final : public LossSurface {
 public:
  OneHiddenNet(Index hidden, Vector output_weights, Dataset data);

  // v_i = +-1/sqrt(h), alternating, starting with +.
  static Vector alternating_output_weights(Index hidden);

  SurfaceKind kind() const override { return SurfaceKind::one_hidden_net; }
  Index dim() const override { return hidden_ * (input_dim_ + 1); }
  double loss(const Vector& theta) const override;
  ValueGradient value_and_gradient(const Vector& theta) const override;
  // Gauss-Newton matrix; equals the true Hessian wherever no pre-activation is zero.
  SymmetricMatrix hessian(const Vector& theta) const override;
  // Through the N x N Gram form when N < D.
  EigenDecomposition hessian_eigen(const Vector& theta) const override;
  const Dataset* dataset() const override { return &data_; }
  ExampleGradients example_gradients(const Vector& theta) const override;

  Index hidden() const { return hidden_; }
  Index input_dim() const { return input_dim_; }
  const Vector& output_weights() const { return v_; }

  // W, b entries drawn from N(0, 1/p).
  Vector initial_parameters(RngStream& rng) const;

  struct ForwardJacobian {
    double f;
    Vector jacobian;
  };
  ForwardJacobian forward_jacobian(const Vector& theta, const Vector& x) const;

  Vector outputs(const Vector& theta, const Matrix& inputs) const;
  // N x D Jacobian of f for every row of `inputs`; fills `outputs` when given.
  Matrix jacobians(const Vector& theta, const Matrix& inputs, Vector* outputs = nullptr) const;

  double loss_on(const Vector& theta, const Dataset& data) const;
  // Fraction of examples with 1[f > 0] == y.
  double accuracy(const Vector& theta, const Dataset& data) const;

  // Rows sqrt(phi''_i / N) J_i, so that the Gauss-Newton matrix is R^T R.
  Matrix curvature_rows(const Vector& theta) const;

 private:
  void check_theta(const Vector& theta) const;

  Index hidden_;
  Index input_dim_;
  const Vector v_;
  Dataset data_;
};

struct GaussNewton {
  SymmetricMatrix hessian;  // mean phi'' J J^T
  SymmetricMatrix fisher;   // mean phi'^2 J J^T
  double c_hat;             // max |f| over the data
};

GaussNewton gauss_newton_matrices(const OneHiddenNet& net, const Vector& theta, const Dataset& data);

}  // namespace aniso
