// Copyright 2026 The LabelDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LABELDP_RANDOM_H_
#define LABELDP_RANDOM_H_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace labeldp {

// Deterministic source of randomness identified by (seed, stream id).
//
// Two streams constructed with the same pair produce the same draws; distinct
// stream ids are seeded independently through std::seed_seq. A stream is not
// thread-safe: concurrent tasks each own their own stream, usually obtained
// through Fork().
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed, uint64_t stream_id = 0);

  uint64_t seed() const { return seed_; }
  uint64_t stream_id() const { return stream_id_; }

  // Child stream for a named sub-task. Depends only on (seed, stream_id,
  // child), never on how many draws this stream has made.
  RandomStream Fork(uint64_t child) const;

  // Uniform on [0, 1).
  double Uniform();
  // Uniform on the open interval (0, 1).
  double UniformOpen();
  double Gaussian(double mean, double stddev);
  // Zero-mean Laplace with density exp(-|x| / scale) / (2 scale).
  double Laplace(double scale);
  bool Bernoulli(double p);
  // Uniform on {0, ..., n - 1}; n must be positive.
  size_t UniformIndex(size_t n);

  template <typename T>
  void Shuffle(std::span<T> values) {
    std::shuffle(values.begin(), values.end(), engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  uint64_t seed_;
  uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace labeldp

#endif  // LABELDP_RANDOM_H_
