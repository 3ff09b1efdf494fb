/*
 * Copyright 2026 The forestlab Authors.
 *
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

#ifndef FORESTLAB_RNG_H_
#define FORESTLAB_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace forestlab {

using Seed = std::uint64_t;
using Engine = std::mt19937_64;

// Seed derivation scheme. Every random concern (covariates, noise, bootstrap,
// mtry draws, ...) reads from its own engine seeded by a keyed hash of the
// parent seed, a purpose tag and optional indices:
//
//   h = mix64(parent + kGolden)
//   h = mix64(h ^ fnv1a64(tag))
//   for each index i:  h = mix64(h ^ mix64(i + kGolden))
//
// where mix64 is the SplitMix64 finalizer. The scheme is frozen: the
// bagging/forest coincidence and rho = 1 checks depend on it.
Seed derive_seed(Seed parent, std::string_view tag);
Seed derive_seed(Seed parent, std::string_view tag, std::uint64_t index);
Seed derive_seed(Seed parent, std::string_view tag, std::uint64_t index,
                 std::uint64_t index2);

std::uint64_t mix64(std::uint64_t z);
std::uint64_t fnv1a64(std::string_view bytes);

inline Engine make_engine(Seed seed) { return Engine(seed); }

// Uniform on [0, 1) using the top 53 bits of one engine output.
inline double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace forestlab

#endif  // FORESTLAB_RNG_H_
