/*
 * Copyright 2026 The MTMT Uplift Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MTMT_CORE_RANDOM_HPP_
#define MTMT_CORE_RANDOM_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace mtmt {

// Mixes a run seed with a stream id so that independent consumers (data
// generation, splitting, initialization, shuffling) never share a sequence.
uint64_t derive_seed(uint64_t seed, uint64_t stream);

// Seeded generator with platform-independent transforms. The std::
// distributions are implementation-defined, so only the raw engine is used.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Standard normal via Box-Muller.
  double normal();
  // Unbiased integer in [0, n).
  uint64_t below(uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  // Index drawn from a discrete distribution given by `probabilities`.
  size_t categorical(std::span<const double> probabilities);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Fisher-Yates over the whole range.
void shuffle(std::span<size_t> values, Rng& rng);
std::vector<size_t> permutation(size_t n, Rng& rng);

}  // namespace mtmt

#endif  // MTMT_CORE_RANDOM_HPP_
