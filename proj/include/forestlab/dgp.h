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

#ifndef FORESTLAB_DGP_H_
#define FORESTLAB_DGP_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forestlab/matrix.h"
#include "forestlab/rng.h"

namespace forestlab {

// Data-generating processes: covariate laws, the three benchmark regression
// functions, variance normalization and SNR-controlled Gaussian noise.

enum class CovariateKind { kIidUniform01, kIidStandardNormal, kEquicorrelatedNormal };

struct CovariateLaw {
  CovariateKind kind = CovariateKind::kIidStandardNormal;
  // Common pairwise correlation; only read for kEquicorrelatedNormal.
  double rho = 0.0;

  static CovariateLaw Uniform() { return {CovariateKind::kIidUniform01, 0.0}; }
  static CovariateLaw Normal() { return {CovariateKind::kIidStandardNormal, 0.0}; }
  static CovariateLaw Equicorrelated(double rho) {
    return {CovariateKind::kEquicorrelatedNormal, rho};
  }

  bool operator==(const CovariateLaw&) const = default;
};

enum class RegressionKind { kLinear5, kMars, kHiddenPattern };

struct RegressionFn {
  RegressionKind kind = RegressionKind::kLinear5;

  // Number of leading coordinates the function reads: 5, 5 and 2.
  int relevant_count() const;

  bool operator==(const RegressionFn&) const = default;
};

// Raw (un-normalized) regression function. Only the first relevant_count()
// coordinates are read.
//   Linear5:       x1 + x2 + x3 + x4 + x5
//   Mars:          10 sin(pi x1 x2) + 20 (x3 - 0.05)^2 + 10 x4 + 5 x5
//   HiddenPattern: x1 - 1(0.6 <= x2 <= 0.65)
double eval_regression(RegressionFn f, std::span<const double> x);

// Sample standard deviation (divisor n - 1). Throws NumericError when the
// values have zero spread.
double sample_std(std::span<const double> values);

inline constexpr int kDefaultCalibrationDraws = 100000;
// Fixed calibration stream so sigma_f is a property of the DGP alone, not of
// the experiment's master seed.
inline constexpr Seed kCalibrationSeed = 0xCA11B4A7E5EEDULL;

// Standard deviation of f(X) over calib_n covariate draws.
double estimate_sigma_f(RegressionFn f, const CovariateLaw& law, int p_total,
                        int calib_n = kDefaultCalibrationDraws,
                        Seed seed = kCalibrationSeed);

// n x p matrix of covariate draws. Equicorrelated rows use the single-factor
// construction x_j = sqrt(rho) z0 + sqrt(1 - rho) z_j.
Matrix sample_covariates(const CovariateLaw& law, int n, int p, Seed seed);

struct DgpSpec {
  RegressionFn f;
  CovariateLaw law;
  int p_total = 5;
  double snr = 1.0;
  bool normalized = false;
  // Estimated sd of f(X) (the normalization constant).
  double sigma_f = 1.0;
  // Noise sd: effective_sigma_f() / sqrt(snr).
  double sigma_eps = 1.0;

  // 1 when normalized, sigma_f otherwise.
  double effective_sigma_f() const { return normalized ? 1.0 : sigma_f; }
  int irrelevant_count() const { return p_total - f.relevant_count(); }

  // Noiseless response g(x): f(x) / sigma_f when normalized, else f(x).
  double signal(std::span<const double> x) const;
};

// Validates the inputs, estimates sigma_f and sets sigma_eps.
DgpSpec resolve_dgp(RegressionFn f, const CovariateLaw& law, int p_total,
                    double snr, bool normalized,
                    int calib_n = kDefaultCalibrationDraws,
                    Seed calib_seed = kCalibrationSeed);

struct Dataset {
  Matrix x;
  std::vector<double> y;
  // Noiseless g(x_i); kept so test sets can be scored against the truth.
  std::vector<double> signal;

  std::size_t n() const { return x.rows(); }
  std::size_t p() const { return x.cols(); }
};

// y_i = g(x_i) + sigma_eps * z_i. Covariates come from the sub-stream
// derive_seed(seed, "covariates") and the standard normals z_i from
// derive_seed(seed, "noise"), so the noise sequence does not depend on p.
Dataset generate_dataset(const DgpSpec& spec, int n, Seed seed);

// FNV-1a digest over the bytes of x and y.
std::uint64_t dataset_digest(const Dataset& data);

std::string to_string(RegressionKind kind);
std::string to_string(CovariateKind kind);
// Accepts "linear", "mars", "hidden" (and the enum spellings).
RegressionKind parse_regression_kind(std::string_view name);
// Accepts "uniform", "normal", "equicorrelated".
CovariateKind parse_covariate_kind(std::string_view name);

}  // namespace forestlab

#endif  // FORESTLAB_DGP_H_
