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

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "forestlab/dgp.h"
#include "forestlab/error.h"

namespace forestlab {
namespace {

const RegressionFn kLinear{RegressionKind::kLinear5};
const RegressionFn kMars{RegressionKind::kMars};
const RegressionFn kHidden{RegressionKind::kHiddenPattern};

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const auto n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

double variance(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

TEST_CASE("regression functions at hand-checked points") {
  const std::vector<double> ones{1, 1, 1, 1, 1};
  CHECK(eval_regression(kLinear, ones) == 5.0);
  CHECK(eval_regression(kHidden, std::vector<double>{0.5, 0.62}) == -0.5);
  CHECK(eval_regression(kMars, std::vector<double>(5, 0.0)) == doctest::Approx(0.05).epsilon(1e-15));

  // Closed indicator interval on both ends.
  CHECK(eval_regression(kHidden, std::vector<double>{0.0, 0.6}) == -1.0);
  CHECK(eval_regression(kHidden, std::vector<double>{0.0, 0.65}) == -1.0);
  CHECK(eval_regression(kHidden, std::vector<double>{0.0, 0.66}) == 0.0);

  // Mars uses (x3 - 0.05)^2, not (x3 - 0.5)^2.
  const std::vector<double> x{0.5, 0.5, 0.05, 0.0, 0.0};
  CHECK(eval_regression(kMars, x) == doctest::Approx(10 * std::sin(std::numbers::pi * 0.25)));
}

TEST_CASE("regression functions read only the relevant coordinates") {
  CHECK(kLinear.relevant_count() == 5);
  CHECK(kMars.relevant_count() == 5);
  CHECK(kHidden.relevant_count() == 2);
  const std::vector<double> a{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
  std::vector<double> b = a;
  b[5] = 123.0;
  b[6] = -9.0;
  for (const auto f : {kLinear, kMars, kHidden}) CHECK(eval_regression(f, a) == eval_regression(f, b));
  CHECK_THROWS_AS(eval_regression(kLinear, std::vector<double>{1, 2, 3}), InputError);
  CHECK_THROWS_AS(eval_regression(kHidden, std::vector<double>{1}), InputError);
}

TEST_CASE("sigma_f calibration") {
  SUBCASE("linear under iid normals is sqrt(5)") {
    CHECK(estimate_sigma_f(kLinear, CovariateLaw::Normal(), 5) == doctest::Approx(std::sqrt(5.0)).epsilon(0.01));
  }
  SUBCASE("hidden pattern under uniforms matches the analytic variance") {
    // Var = 1/12 + q(1 - q), q = P(0.6 <= U <= 0.65) = 0.05.
    const double analytic = std::sqrt(1.0 / 12.0 + 0.05 * 0.95);
    CHECK(analytic == doctest::Approx(0.3617).epsilon(1e-4));
    CHECK(estimate_sigma_f(kHidden, CovariateLaw::Uniform(), 2) == doctest::Approx(analytic).epsilon(0.01));
  }
  SUBCASE("mars under uniforms agrees with a 1e6-draw oracle and with 7.11") {
    std::mt19937_64 engine(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> values(1000000);
    for (double& v : values) {
      const double x1 = u(engine), x2 = u(engine), x3 = u(engine), x4 = u(engine), x5 = u(engine);
      v = 10 * std::sin(std::numbers::pi * x1 * x2) + 20 * (x3 - 0.05) * (x3 - 0.05) + 10 * x4 + 5 * x5;
    }
    const double oracle = std::sqrt(variance(values));
    const double estimate = estimate_sigma_f(kMars, CovariateLaw::Uniform(), 5);
    CHECK(std::abs(estimate - oracle) < 0.04);
    CHECK(std::abs(estimate - 7.11) < 0.05);
  }
  SUBCASE("calibration is a property of the DGP, not of p_total beyond relevance") {
    CHECK(estimate_sigma_f(kLinear, CovariateLaw::Normal(), 5) ==
          estimate_sigma_f(kLinear, CovariateLaw::Normal(), 5));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(estimate_sigma_f(kLinear, CovariateLaw::Normal(), 5, 9999), InputError);
    CHECK_THROWS_AS(estimate_sigma_f(kLinear, CovariateLaw::Normal(), 4), InputError);
    const std::vector<double> flat(100, 3.0);
    CHECK_THROWS_AS(sample_std(flat), NumericError);
  }
}

TEST_CASE("covariate laws") {
  SUBCASE("uniform values lie in [0, 1)") {
    const Matrix x = sample_covariates(CovariateLaw::Uniform(), 20000, 3, 5);
    for (const double v : x.data()) {
      CHECK(v >= 0.0);
      CHECK(v < 1.0);
    }
  }
  SUBCASE("iid normal has unit variance") {
    const Matrix x = sample_covariates(CovariateLaw::Normal(), 100000, 2, 6);
    CHECK(variance(x.column(0)) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(std::abs(correlation(x.column(0), x.column(1))) < 0.01);
  }
  SUBCASE("rho = 1 makes every coordinate of a row equal") {
    const Matrix x = sample_covariates(CovariateLaw::Equicorrelated(1.0), 50, 7, 8);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      for (std::size_t j = 1; j < x.cols(); ++j) CHECK(x(i, j) == x(i, 0));
    }
  }
  SUBCASE("pairwise correlations match rho") {
    for (const double rho : {0.0, 0.25, 0.5, 0.9, 1.0}) {
      CAPTURE(rho);
      const Matrix x = sample_covariates(CovariateLaw::Equicorrelated(rho), 100000, 5, 11);
      for (std::size_t a = 0; a < 5; ++a) {
        CHECK(variance(x.column(a)) == doctest::Approx(1.0).epsilon(0.02));
        for (std::size_t b = a + 1; b < 5; ++b) {
          CHECK(std::abs(correlation(x.column(a), x.column(b)) - rho) < 0.01);
        }
      }
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(sample_covariates(CovariateLaw::Equicorrelated(1.5), 10, 2, 1), InputError);
    CHECK_THROWS_AS(sample_covariates(CovariateLaw::Equicorrelated(-0.1), 10, 2, 1), InputError);
    CHECK_THROWS_AS(sample_covariates(CovariateLaw::Normal(), 0, 2, 1), InputError);
  }
}

TEST_CASE("resolved specs and noise level") {
  const DgpSpec low = resolve_dgp(kLinear, CovariateLaw::Normal(), 5, 0.05, true);
  CHECK(low.sigma_eps == doctest::Approx(4.47).epsilon(0.002));
  const DgpSpec high = resolve_dgp(kLinear, CovariateLaw::Normal(), 5, 6.0, true);
  CHECK(high.sigma_eps == doctest::Approx(0.41).epsilon(0.01));
  const DgpSpec original = resolve_dgp(kLinear, CovariateLaw::Normal(), 5, 1.0, false);
  CHECK(original.sigma_eps == original.sigma_f);
  CHECK(original.sigma_f == doctest::Approx(2.236).epsilon(0.01));
  CHECK_THROWS_AS(resolve_dgp(kLinear, CovariateLaw::Normal(), 5, 0.0, true), InputError);
}

TEST_CASE("generated datasets") {
  const DgpSpec spec = resolve_dgp(kLinear, CovariateLaw::Normal(), 5, 1.0, true);

  SUBCASE("normalization gives the signal unit variance") {
    const Dataset d = generate_dataset(spec, 100000, 3);
    CHECK(variance(d.signal) == doctest::Approx(1.0).epsilon(0.02));
  }
  SUBCASE("noise has the requested sd and is independent of x") {
    const Dataset d = generate_dataset(spec, 100000, 4);
    std::vector<double> noise(d.n());
    for (std::size_t i = 0; i < d.n(); ++i) noise[i] = d.y[i] - d.signal[i];
    CHECK(std::sqrt(variance(noise)) == doctest::Approx(spec.sigma_eps).epsilon(0.01));
    CHECK(std::abs(correlation(noise, d.x.column(0))) < 0.01);
  }
  SUBCASE("identical inputs give bit-identical datasets") {
    const Dataset a = generate_dataset(spec, 300, 77);
    const Dataset b = generate_dataset(spec, 300, 77);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
    CHECK(dataset_digest(a) == dataset_digest(b));
    CHECK(dataset_digest(a) != dataset_digest(generate_dataset(spec, 300, 78)));
  }
  SUBCASE("irrelevant covariates do not enter y") {
    const DgpSpec wide = resolve_dgp(kMars, CovariateLaw::Uniform(), 9, 1.0, true);
    Dataset d = generate_dataset(wide, 200, 12);
    std::mt19937_64 engine(1);
    std::normal_distribution<double> z;
    for (std::size_t i = 0; i < d.n(); ++i) {
      const double noise = d.y[i] - d.signal[i];
      for (std::size_t j = 5; j < d.p(); ++j) d.x(i, j) = z(engine);
      CHECK(wide.signal(d.x.row(i)) + noise == doctest::Approx(d.y[i]).epsilon(1e-12));
    }
  }
  SUBCASE("noise stream does not depend on p") {
    const DgpSpec narrow = resolve_dgp(kMars, CovariateLaw::Uniform(), 5, 1.0, true);
    DgpSpec wide = narrow;
    wide.p_total = 8;
    const Dataset a = generate_dataset(narrow, 50, 5);
    const Dataset b = generate_dataset(wide, 50, 5);
    for (std::size_t i = 0; i < a.n(); ++i) {
      CHECK(a.y[i] - a.signal[i] == doctest::Approx(b.y[i] - b.signal[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("name parsing") {
  CHECK(parse_regression_kind("mars") == RegressionKind::kMars);
  CHECK(parse_covariate_kind("equicorrelated") == CovariateKind::kEquicorrelatedNormal);
  CHECK_THROWS_AS(parse_regression_kind("friedman"), InputError);
  CHECK_THROWS_AS(parse_covariate_kind("cauchy"), InputError);
}

}  // namespace
}  // namespace forestlab
