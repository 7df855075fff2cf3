//
// Copyright 2026 The stabdp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef STABDP_RNG_H_
#define STABDP_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <utility>

namespace stabdp {

// SplitMix64 finalizer. Bijective on 64-bit words.
uint64_t Mix64(uint64_t x);

// Folds a list of words into one stream key. Order matters.
uint64_t DeriveKey(std::initializer_list<uint64_t> parts);

// Bit pattern of a double, for keying streams on parameter values.
uint64_t DoubleBits(double x);

// Counter-based generator: the i-th output is Mix64(key + i * golden_gamma).
// Streams derived with Derive() never share state with their parent, so
// parallel workers get reproducible, disjoint sequences regardless of the
// order in which they run. Distribution sampling is done here rather than
// through <random> distributions, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0);

  uint64_t NextU64();

  // Uniform on [0, 1) with 53 bits of resolution.
  double Uniform();

  // Uniform on the open interval (0, 1).
  double UniformOpen();

  // Standard normal (Box-Muller, one output per pair of uniforms).
  double Gaussian();

  // Uniform integer in [0, bound). bound must be positive.
  uint64_t UniformInt(uint64_t bound);

  // Independent child stream.
  Rng Derive(uint64_t stream) const;

  template <typename RandomIt>
  void Shuffle(RandomIt first, RandomIt last) {
    auto n = static_cast<uint64_t>(std::distance(first, last));
    for (uint64_t i = n; i > 1; --i) {
      uint64_t j = UniformInt(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

  uint64_t seed() const { return seed_; }
  uint64_t stream() const { return stream_; }
  uint64_t counter() const { return counter_; }

 private:
  uint64_t seed_;
  uint64_t stream_;
  uint64_t key_;
  uint64_t counter_ = 0;
};

}  // namespace stabdp

#endif  // STABDP_RNG_H_
