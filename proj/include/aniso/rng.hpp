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
#include <random>

#include <Eigen/Core>

namespace aniso {

/// Mixes (master_seed, stream_id) into the 64-bit seed of one stream.
///
/// seed = splitmix64(master_seed ^ splitmix64(stream_id + 0x9E3779B97F4A7C15)).
/// splitmix64 is a bijection with full avalanche, so distinct stream ids give
/// unrelated engine seeds.
std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t stream_id);

std::uint64_t splitmix64(std::uint64_t x);

/// A reproducible random stream identified by (master_seed, stream_id).
///
/// Streams are independent objects: copy one to replay it, `split` it to get a
/// child stream for a sub-task. Nothing is shared between instances.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  double normal();
  double uniform();
  std::uint64_t next_u64();
  // Uniform on {0, ..., n-1}.
  std::size_t index(std::size_t n);
  Eigen::VectorXd normal_vector(Eigen::Index n);

  // Child stream whose master seed is this stream's derived seed.
  RngStream split(std::uint64_t sub_id) const;

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace aniso
