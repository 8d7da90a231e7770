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

#include "aniso/dataset.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "aniso/format.hpp"

namespace aniso {

void Dataset::validate() const {
  if (inputs.rows() < 1) throw std::invalid_argument("Dataset: needs at least one example");
  if (inputs.cols() < 1) throw std::invalid_argument("Dataset: input dimension must be >= 1");
  if (static_cast<Index>(labels.size()) != inputs.rows()) {
    throw std::invalid_argument("Dataset: " + std::to_string(labels.size()) + " labels for " +
                                std::to_string(inputs.rows()) + " inputs");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw std::invalid_argument("Dataset: labels must be 0 or 1");
  }
  if (corrupt_count < 0 || corrupt_count > inputs.rows()) {
    throw std::invalid_argument("Dataset: corrupt_count out of range");
  }
}

Dataset single_point_dataset(const Vector& x, int label) {
  Dataset d;
  d.inputs = x.transpose();
  d.labels = {label};
  d.validate();
  return d;
}

Dataset make_toy2d_dataset(const Toy2dDataSpec& spec) {
  if (spec.n_points < 1) throw std::invalid_argument("make_toy2d_dataset: n_points must be >= 1");
  const double c = std::sqrt(0.5);
  const Eigen::Vector2d a(c, -c);
  const Eigen::Vector2d b(c, c);

  RngStream rng(spec.seed, 0);
  Dataset d;
  d.inputs.resize(spec.n_points, 2);
  d.labels.assign(static_cast<std::size_t>(spec.n_points), 0);
  for (Index k = 0; k < spec.n_points; ++k) {
    const Eigen::Vector2d z(rng.normal(), rng.normal());
    Eigen::Vector2d x = z;
    if (spec.covariance == ToyDataCovariance::quadric_inverse) {
      // A^-1/2 = a a^T / sqrt(10) + b b^T / 10
      x = a * (a.dot(z) / std::sqrt(10.0)) + b * (b.dot(z) / 10.0);
    }
    d.inputs.row(k) = x.transpose();
  }
  return d;
}

namespace {

Dataset draw_clusters(Index n, Index p, double mu, RngStream& rng) {
  Dataset d;
  d.inputs.resize(n, p);
  d.labels.resize(static_cast<std::size_t>(n));
  const double shift = mu / std::sqrt(static_cast<double>(p));
  for (Index i = 0; i < n; ++i) {
    const int y = rng.uniform() < 0.5 ? 0 : 1;
    d.labels[static_cast<std::size_t>(i)] = y;
    const double s = y == 1 ? shift : -shift;
    for (Index j = 0; j < p; ++j) d.inputs(i, j) = s + rng.normal();
  }
  return d;
}

}  // namespace

ClassificationData make_classification_dataset(const ClassificationSpec& spec) {
  if (spec.n_clean < 0 || spec.n_corrupt < 0 || spec.n_clean + spec.n_corrupt < 1) {
    throw std::invalid_argument("make_classification_dataset: need at least one training example");
  }
  if (spec.input_dim < 1) throw std::invalid_argument("make_classification_dataset: input_dim must be >= 1");
  if (spec.n_test < 1) throw std::invalid_argument("make_classification_dataset: n_test must be >= 1");

  RngStream train_rng(spec.seed, 0);
  RngStream test_rng(spec.seed, 1);
  RngStream label_rng(spec.seed, 2);

  ClassificationData out;
  out.train = draw_clusters(spec.n_clean + spec.n_corrupt, spec.input_dim, spec.mu, train_rng);
  for (Index i = spec.n_clean; i < spec.n_clean + spec.n_corrupt; ++i) {
    out.train.labels[static_cast<std::size_t>(i)] = label_rng.uniform() < 0.5 ? 0 : 1;
  }
  out.train.corrupt_count = spec.n_corrupt;
  out.test = draw_clusters(spec.n_test, spec.input_dim, spec.mu, test_rng);
  return out;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  for (Index j = 0; j < data.input_dim(); ++j) out << "x_" << j << ',';
  out << "y\n";
  for (Index i = 0; i < data.size(); ++i) {
    for (Index j = 0; j < data.input_dim(); ++j) out << format_number(data.inputs(i, j)) << ',';
    out << data.labels[static_cast<std::size_t>(i)] << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_dataset_csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2 || header.back() != "y") {
    throw std::runtime_error("read_dataset_csv: header must be x_0,...,x_{p-1},y");
  }
  const Index p = static_cast<Index>(header.size()) - 1;
  for (Index j = 0; j < p; ++j) {
    if (header[static_cast<std::size_t>(j)] != "x_" + std::to_string(j)) {
      throw std::runtime_error("read_dataset_csv: unexpected header column '" +
                               header[static_cast<std::size_t>(j)] + "'");
    }
  }

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(parse_number(cell));
      } catch (const std::invalid_argument& e) {
        throw std::runtime_error("read_dataset_csv: line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (static_cast<Index>(row.size()) != p + 1) {
      throw std::runtime_error("read_dataset_csv: line " + std::to_string(line_no) + ": expected " +
                               std::to_string(p + 1) + " fields");
    }
    const double y = row.back();
    if (y != 0.0 && y != 1.0) {
      throw std::runtime_error("read_dataset_csv: line " + std::to_string(line_no) + ": label must be 0 or 1");
    }
    labels.push_back(static_cast<int>(y));
    row.pop_back();
    rows.push_back(std::move(row));
  }

  Dataset d;
  d.inputs.resize(static_cast<Index>(rows.size()), p);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Index j = 0; j < p; ++j) d.inputs(static_cast<Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  }
  d.labels = std::move(labels);
  d.validate();
  return d;
}

}  // namespace aniso
