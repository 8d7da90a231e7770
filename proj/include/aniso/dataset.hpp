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
#include <iosfwd>
#include <vector>

#include "aniso/symmat.hpp"

namespace aniso {

/// Labelled examples, one per row of `inputs`.
struct Dataset {
  Matrix inputs;            // N x p
  std::vector<int> labels;  // N values in {0, 1}
  Index corrupt_count = 0;  // labels that were deliberately randomised

  Index size() const { return inputs.rows(); }
  Index input_dim() const { return inputs.cols(); }
  // Throws std::invalid_argument when an invariant is broken.
  void validate() const;
};

Dataset single_point_dataset(const Vector& x, int label = 0);

/// Covariance of the toy surface's sampled offsets.
///
/// quadric_inverse: A^-1 where A = 10 a a^T + 100 b b^T is the matrix of the
///   sharp basin's quadric form (a = (c, -s), b = (c, s), c = s = 1/sqrt 2).
/// identity: N(0, I_2).
enum class ToyDataCovariance { quadric_inverse, identity };

struct Toy2dDataSpec {
  Index n_points = 100;
  std::uint64_t seed = 7;
  ToyDataCovariance covariance = ToyDataCovariance::quadric_inverse;
};

Dataset make_toy2d_dataset(const Toy2dDataSpec& spec);

/// Two Gaussian clusters with means +-mu/sqrt(p) * 1 and identity covariance.
/// The first n_clean training examples keep their cluster label; the last
/// n_corrupt get a label drawn uniformly from {0, 1}. The test split is drawn
/// from the clean distribution with an independent stream.
struct ClassificationSpec {
  Index n_clean = 1000;
  Index n_corrupt = 200;
  Index input_dim = 20;
  Index n_test = 2000;
  double mu = 1.5;
  std::uint64_t seed = 0;
};

struct ClassificationData {
  Dataset train;
  Dataset test;
};

ClassificationData make_classification_dataset(const ClassificationSpec& spec);

// CSV with header x_0,...,x_{p-1},y; numbers at 17 significant digits, LF endings.
void write_dataset_csv(std::ostream& out, const Dataset& data);
Dataset read_dataset_csv(std::istream& in);

}  // namespace aniso
