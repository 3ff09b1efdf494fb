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

#include "forestlab/dgp.h"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "forestlab/error.h"

namespace forestlab {

namespace {

void check_law(const CovariateLaw& law) {
  if (law.kind == CovariateKind::kEquicorrelatedNormal &&
      !(law.rho >= 0.0 && law.rho <= 1.0)) {
    throw InputError("rho must lie in [0, 1], got " + std::to_string(law.rho));
  }
}

// Fills covariate rows one at a time from a single engine.
class CovariateSampler {
 public:
  CovariateSampler(const CovariateLaw& law, Seed seed)
      : law_(law),
        engine_(make_engine(seed)),
        factor_weight_(std::sqrt(law.rho)),
        own_weight_(std::sqrt(1.0 - law.rho)) {}

  void fill(std::span<double> row) {
    switch (law_.kind) {
      case CovariateKind::kIidUniform01:
        for (double& v : row) v = uniform01(engine_);
        break;
      case CovariateKind::kIidStandardNormal:
        for (double& v : row) v = normal_(engine_);
        break;
      case CovariateKind::kEquicorrelatedNormal: {
        const double z0 = normal_(engine_);
        for (double& v : row) {
          v = factor_weight_ * z0 + own_weight_ * normal_(engine_);
        }
        break;
      }
    }
  }

 private:
  CovariateLaw law_;
  Engine engine_;
  std::normal_distribution<double> normal_;
  double factor_weight_;
  double own_weight_;
};

}  // namespace

int RegressionFn::relevant_count() const {
  switch (kind) {
    case RegressionKind::kLinear5:
    case RegressionKind::kMars:
      return 5;
    case RegressionKind::kHiddenPattern:
      return 2;
  }
  return 0;
}

double eval_regression(RegressionFn f, std::span<const double> x) {
  if (x.size() < static_cast<std::size_t>(f.relevant_count())) {
    throw InputError("eval_regression: need at least " +
                     std::to_string(f.relevant_count()) + " coordinates, got " +
                     std::to_string(x.size()));
  }
  switch (f.kind) {
    case RegressionKind::kLinear5:
      return x[0] + x[1] + x[2] + x[3] + x[4];
    case RegressionKind::kMars: {
      const double d = x[2] - 0.05;
      return 10.0 * std::sin(std::numbers::pi * x[0] * x[1]) + 20.0 * d * d +
             10.0 * x[3] + 5.0 * x[4];
    }
    case RegressionKind::kHiddenPattern:
      return x[0] - ((x[1] >= 0.6 && x[1] <= 0.65) ? 1.0 : 0.0);
  }
  return 0.0;
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) throw NumericError("sample_std: need at least 2 values");
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  if (!(ss > 0.0)) {
    throw NumericError("regression function has zero variance under this law");
  }
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double estimate_sigma_f(RegressionFn f, const CovariateLaw& law, int p_total,
                        int calib_n, Seed seed) {
  if (calib_n < 10000) {
    throw InputError("calibration needs at least 10000 draws, got " +
                     std::to_string(calib_n));
  }
  if (p_total < f.relevant_count()) {
    throw InputError("p_total must be >= " + std::to_string(f.relevant_count()));
  }
  check_law(law);
  CovariateSampler sampler(law, derive_seed(seed, "calibration"));
  std::vector<double> row(static_cast<std::size_t>(p_total));
  std::vector<double> values(static_cast<std::size_t>(calib_n));
  for (double& v : values) {
    sampler.fill(row);
    v = eval_regression(f, row);
  }
  return sample_std(values);
}

Matrix sample_covariates(const CovariateLaw& law, int n, int p, Seed seed) {
  if (n < 1 || p < 1) throw InputError("sample_covariates: need n >= 1 and p >= 1");
  check_law(law);
  Matrix x(static_cast<std::size_t>(n), static_cast<std::size_t>(p));
  CovariateSampler sampler(law, seed);
  for (std::size_t i = 0; i < x.rows(); ++i) sampler.fill(x.row(i));
  return x;
}

double DgpSpec::signal(std::span<const double> x) const {
  const double raw = eval_regression(f, x);
  return normalized ? raw / sigma_f : raw;
}

DgpSpec resolve_dgp(RegressionFn f, const CovariateLaw& law, int p_total,
                    double snr, bool normalized, int calib_n, Seed calib_seed) {
  if (!(snr > 0.0) || !std::isfinite(snr)) {
    throw InputError("snr must be a positive finite number");
  }
  DgpSpec spec;
  spec.f = f;
  spec.law = law;
  spec.p_total = p_total;
  spec.snr = snr;
  spec.normalized = normalized;
  spec.sigma_f = estimate_sigma_f(f, law, p_total, calib_n, calib_seed);
  spec.sigma_eps = spec.effective_sigma_f() / std::sqrt(snr);
  return spec;
}

Dataset generate_dataset(const DgpSpec& spec, int n, Seed seed) {
  Dataset data;
  data.x = sample_covariates(spec.law, n, spec.p_total,
                             derive_seed(seed, "covariates"));
  data.y.resize(data.n());
  data.signal.resize(data.n());
  Engine noise_engine = make_engine(derive_seed(seed, "noise"));
  std::normal_distribution<double> normal;
  for (std::size_t i = 0; i < data.n(); ++i) {
    data.signal[i] = spec.signal(data.x.row(i));
    data.y[i] = data.signal[i] + spec.sigma_eps * normal(noise_engine);
  }
  return data;
}

std::uint64_t dataset_digest(const Dataset& data) {
  const auto bytes = [](std::span<const double> v) {
    return std::string_view(reinterpret_cast<const char*>(v.data()),
                            v.size() * sizeof(double));
  };
  return fnv1a64(bytes(data.x.data())) ^ mix64(fnv1a64(bytes(data.y)));
}

std::string to_string(RegressionKind kind) {
  switch (kind) {
    case RegressionKind::kLinear5: return "linear";
    case RegressionKind::kMars: return "mars";
    case RegressionKind::kHiddenPattern: return "hidden";
  }
  return "?";
}

std::string to_string(CovariateKind kind) {
  switch (kind) {
    case CovariateKind::kIidUniform01: return "uniform";
    case CovariateKind::kIidStandardNormal: return "normal";
    case CovariateKind::kEquicorrelatedNormal: return "equicorrelated";
  }
  return "?";
}

RegressionKind parse_regression_kind(std::string_view name) {
  if (name == "linear" || name == "Linear5") return RegressionKind::kLinear5;
  if (name == "mars" || name == "Mars") return RegressionKind::kMars;
  if (name == "hidden" || name == "HiddenPattern") return RegressionKind::kHiddenPattern;
  throw InputError("model: unknown regression function '" + std::string(name) +
                   "' (expected linear, mars or hidden)");
}

CovariateKind parse_covariate_kind(std::string_view name) {
  if (name == "uniform" || name == "IidUniform01") return CovariateKind::kIidUniform01;
  if (name == "normal" || name == "IidStandardNormal") return CovariateKind::kIidStandardNormal;
  if (name == "equicorrelated" || name == "EquicorrelatedNormal") {
    return CovariateKind::kEquicorrelatedNormal;
  }
  throw InputError("law: unknown covariate law '" + std::string(name) +
                   "' (expected uniform, normal or equicorrelated)");
}

}  // namespace forestlab
