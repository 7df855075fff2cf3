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

#include "stabdp/rng.h"

#include <bit>
#include <cmath>
#include <numbers>

namespace stabdp {
namespace {

constexpr uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

}  // namespace

uint64_t Mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

uint64_t DeriveKey(std::initializer_list<uint64_t> parts) {
  uint64_t key = 0x6A09E667F3BCC909ULL;
  for (uint64_t p : parts) {
    key = Mix64(key ^ Mix64(p + kGoldenGamma));
  }
  return key;
}

uint64_t DoubleBits(double x) { return std::bit_cast<uint64_t>(x); }

Rng::Rng(uint64_t seed, uint64_t stream)
    : seed_(seed), stream_(stream), key_(DeriveKey({seed, stream})) {}

uint64_t Rng::NextU64() {
  ++counter_;
  return Mix64(key_ + counter_ * kGoldenGamma);
}

double Rng::Uniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

double Rng::UniformOpen() {
  // (k + 0.5) / 2^53 for k in [0, 2^53) never hits 0 or 1.
  return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::Gaussian() {
  double u1 = UniformOpen();
  double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

uint64_t Rng::UniformInt(uint64_t bound) {
  // Lemire's multiply-shift with rejection; unbiased.
  uint64_t x = NextU64();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<uint64_t>(m);
  if (low < bound) {
    uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = NextU64();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<uint64_t>(m);
    }
  }
  return static_cast<uint64_t>(m >> 64);
}

Rng Rng::Derive(uint64_t stream) const {
  return Rng(seed_, DeriveKey({stream_, stream}));
}

}  // namespace stabdp
