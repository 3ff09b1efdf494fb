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

#include "forestlab/rng.h"

namespace forestlab {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

Seed derive_seed(Seed parent, std::string_view tag) {
  const std::uint64_t h = mix64(parent + kGolden);
  return mix64(h ^ fnv1a64(tag));
}

Seed derive_seed(Seed parent, std::string_view tag, std::uint64_t index) {
  return mix64(derive_seed(parent, tag) ^ mix64(index + kGolden));
}

Seed derive_seed(Seed parent, std::string_view tag, std::uint64_t index,
                 std::uint64_t index2) {
  return mix64(derive_seed(parent, tag, index) ^ mix64(index2 + kGolden));
}

}  // namespace forestlab
