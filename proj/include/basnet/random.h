/* Copyright 2026 The BaSNet Engine Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef BASNET_RANDOM_H_
#define BASNET_RANDOM_H_

#include <cstdint>
#include <random>

namespace basnet {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) built from the top 53 bits, so streams are
// identical across standard library implementations.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double UniformRange(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * UniformUnit(rng);
}

// Uniform integer in [lo, hi], inclusive.
inline std::int64_t UniformInt(Rng& rng, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(UniformUnit(rng) * span);
}

}  // namespace basnet

#endif  // BASNET_RANDOM_H_
