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

#ifndef FORESTLAB_ERROR_H_
#define FORESTLAB_ERROR_H_

#include <stdexcept>
#include <string>

namespace forestlab {

// Bad arguments, malformed configuration, dimension mismatches. The CLI maps
// this to exit code 1.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Degenerate numerical situations (zero variance, empty accumulators). The
// CLI maps this to exit code 2.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace forestlab

#endif  // FORESTLAB_ERROR_H_
