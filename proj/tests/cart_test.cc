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

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "forestlab/cart.h"
#include "forestlab/dgp.h"
#include "forestlab/error.h"

namespace forestlab {
namespace {

Dataset make_dataset(const Matrix& x, std::vector<double> y) {
  Dataset d;
  d.x = x;
  d.signal = y;
  d.y = std::move(y);
  return d;
}

Dataset mars_data(std::size_t n, std::size_t p, Seed seed) {
  const DgpSpec spec = resolve_dgp(RegressionFn{RegressionKind::kMars}, CovariateLaw::Uniform(), p, 1.0, true);
  return generate_dataset(spec, n, seed);
}

struct OracleSplit {
  int covariate = -1;
  double threshold = 0.0;
};

double two_pass_sse(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double m = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s;
}

// Exhaustive root split by direct SSE evaluation of every (covariate, cut).
OracleSplit brute_force_root(const Dataset& d) {
  const double node_ss = two_pass_sse(d.y);
  const double tol = kSplitTieTolerance * node_ss;
  OracleSplit best;
  double best_gain = 0.0;
  for (std::size_t j = 0; j < d.p(); ++j) {
    std::vector<double> values = d.x.column(j);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t c = 0; c + 1 < values.size(); ++c) {
      double cut = 0.5 * (values[c] + values[c + 1]);
      if (!(cut < values[c + 1])) cut = values[c];
      std::vector<double> left, right;
      for (std::size_t i = 0; i < d.n(); ++i) (d.x(i, j) <= cut ? left : right).push_back(d.y[i]);
      const double gain = node_ss - two_pass_sse(left) - two_pass_sse(right);
      if (gain > best_gain + tol) {
        best_gain = gain;
        best = {static_cast<int>(j), cut};
      }
    }
  }
  return best;
}

TEST_CASE("bootstrap indices") {
  CHECK(bootstrap_indices(1, 42) == std::vector<std::uint32_t>{0});
  CHECK_THROWS_AS(bootstrap_indices(0, 42), InputError);
  CHECK(bootstrap_indices(500, 7) == bootstrap_indices(500, 7));
  CHECK(bootstrap_indices(500, 7) != bootstrap_indices(500, 8));

  const auto idx = bootstrap_indices(10000, 3);
  CHECK(idx.size() == 10000);
  CHECK(*std::max_element(idx.begin(), idx.end()) < 10000);
  const std::set<std::uint32_t> distinct(idx.begin(), idx.end());
  const double fraction = static_cast<double>(distinct.size()) / 10000.0;
  CHECK(std::abs(fraction - (1.0 - std::exp(-1.0))) < 0.03);
}

TEST_CASE("two observations split at the midpoint") {
  Matrix x(2, 1);
  x(0, 0) = 0.0;
  x(1, 0) = 1.0;
  const Dataset d = make_dataset(x, {0.0, 10.0});
  const Tree t = grow_tree(d, GrowthParams{1, 1, false}, 1);
  REQUIRE(t.nodes().size() == 3);
  REQUIRE(t.nodes()[0].split.has_value());
  CHECK(t.nodes()[0].split->threshold == 0.5);
  CHECK(t.num_leaves() == 2);
  CHECK(t.predict(std::vector<double>{0.2}) == 0.0);
  CHECK(t.predict(std::vector<double>{0.9}) == 10.0);
}

TEST_CASE("constant response gives a single leaf") {
  const Dataset base = mars_data(50, 5, 9);
  const Dataset d = make_dataset(base.x, std::vector<double>(50, 2.5));
  const Tree t = grow_tree(d, GrowthParams{5, 1, true}, 4);
  CHECK(t.nodes().size() == 1);
  CHECK(t.predict(base.x.row(3)) == 2.5);
}

TEST_CASE("node size threshold") {
  const Dataset d = mars_data(5, 5, 2);
  CHECK(grow_tree(d, GrowthParams{5, 5, false}, 1).nodes().size() == 1);
  const Tree t = grow_tree(mars_data(200, 5, 3), GrowthParams{2, 5, true}, 1);
  for (const TreeNode& node : t.nodes()) {
    if (!node.is_leaf()) CHECK(node.count > 5);
    CHECK(node.count >= 1);
  }
}

TEST_CASE("root split agrees with exhaustive search") {
  std::mt19937_64 engine(2024);
  std::uniform_int_distribution<int> level(0, 6);
  for (int instance = 0; instance < 100; ++instance) {
    CAPTURE(instance);
    Dataset d = mars_data(20 + instance % 40, 5 + instance % 4, static_cast<Seed>(1000 + instance));
    // Every third instance uses coarse covariates so ties in x occur.
    if (instance % 3 == 0) {
      for (double& v : d.x.data()) v = level(engine) / 6.0;
    }
    const OracleSplit oracle = brute_force_root(d);
    const Tree t = grow_tree(d, GrowthParams{static_cast<int>(d.p()), 1, false}, 5);
    const auto& root = t.nodes()[0].split;
    if (oracle.covariate < 0) {
      CHECK_FALSE(root.has_value());
      continue;
    }
    REQUIRE(root.has_value());
    CHECK(root->covariate == oracle.covariate);
    CHECK(root->threshold == oracle.threshold);
  }
}

TEST_CASE("leaves partition the covariate space and predict in-bag means") {
  const Dataset d = mars_data(1000, 5, 17);
  const Tree t = grow_tree(d, GrowthParams{2, 5, true}, 23);

  std::map<std::size_t, std::pair<double, int>> per_leaf;
  for (const std::uint32_t s : t.inbag()) {
    const std::size_t leaf = t.leaf_of(d.x.row(s));
    CHECK(t.nodes()[leaf].is_leaf());
    per_leaf[leaf].first += d.y[s];
    per_leaf[leaf].second += 1;
  }
  int total = 0;
  for (const auto& [leaf, acc] : per_leaf) {
    CHECK(t.nodes()[leaf].count == acc.second);
    CHECK(t.nodes()[leaf].value == doctest::Approx(acc.first / acc.second).epsilon(1e-12));
    total += acc.second;
  }
  CHECK(total == 1000);
  CHECK(per_leaf.size() == t.num_leaves());

  // Weights of a prediction: bootstrap multiplicity over leaf count, summing to 1.
  const Dataset test = mars_data(50, 5, 18);
  for (std::size_t i = 0; i < test.n(); ++i) {
    const std::size_t leaf = t.leaf_of(test.x.row(i));
    double weight_sum = 0.0, weighted = 0.0;
    for (const std::uint32_t s : t.inbag()) {
      if (t.leaf_of(d.x.row(s)) != leaf) continue;
      const double w = 1.0 / t.nodes()[leaf].count;
      weight_sum += w;
      weighted += w * d.y[s];
    }
    CHECK(weight_sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.predict(test.x.row(i)) == doctest::Approx(weighted).epsilon(1e-12));
  }
}

TEST_CASE("predictions stay in the in-bag response range") {
  const Dataset d = mars_data(300, 6, 5);
  const Tree t = grow_tree(d, GrowthParams{2, 5, true}, 8);
  double lo = d.y[t.inbag()[0]], hi = lo;
  for (const std::uint32_t s : t.inbag()) {
    lo = std::min(lo, d.y[s]);
    hi = std::max(hi, d.y[s]);
  }
  const Dataset test = mars_data(500, 6, 6);
  for (std::size_t i = 0; i < test.n(); ++i) {
    const double v = t.predict(test.x.row(i));
    CHECK(v >= lo);
    CHECK(v <= hi);
  }
}

TEST_CASE("affine response transform commutes with growth") {
  for (int rep = 0; rep < 20; ++rep) {
    CAPTURE(rep);
    const Dataset d = mars_data(150, 5, static_cast<Seed>(300 + rep));
    std::vector<double> shifted(d.y.size());
    for (std::size_t i = 0; i < d.y.size(); ++i) shifted[i] = 3.0 * d.y[i] + 7.0;
    const Dataset e = make_dataset(d.x, shifted);
    const GrowthParams params{2, 5, true};
    const Tree a = grow_tree(d, params, static_cast<Seed>(rep));
    const Tree b = grow_tree(e, params, static_cast<Seed>(rep));
    REQUIRE(a.nodes().size() == b.nodes().size());
    for (std::size_t k = 0; k < a.nodes().size(); ++k) {
      CHECK(a.nodes()[k].split == b.nodes()[k].split);
      CHECK(b.nodes()[k].value == doctest::Approx(3.0 * a.nodes()[k].value + 7.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("growth is deterministic in the seed") {
  const Dataset d = mars_data(200, 8, 31);
  const GrowthParams params{3, 5, true};
  CHECK(grow_tree(d, params, 99) == grow_tree(d, params, 99));
  CHECK_FALSE(grow_tree(d, params, 99) == grow_tree(d, params, 100));
}

TEST_CASE("with mtry equal to p the tree depends only on the bootstrap sample") {
  const Dataset d = mars_data(200, 5, 41);
  const GrowthParams bag{5, 5, true};
  const Tree t = grow_tree(d, bag, 7);

  // Regrow on the explicit resample without bootstrapping and a different seed.
  Matrix x(d.n(), d.p());
  std::vector<double> y(d.n());
  for (std::size_t i = 0; i < d.n(); ++i) {
    const std::uint32_t s = t.inbag()[i];
    for (std::size_t j = 0; j < d.p(); ++j) x(i, j) = d.x(s, j);
    y[i] = d.y[s];
  }
  const Tree u = grow_tree(make_dataset(x, y), GrowthParams{5, 5, false}, 12345);
  CHECK(t.nodes() == u.nodes());

  CHECK(grow_tree(d, GrowthParams{5, 5, false}, 1).nodes() == grow_tree(d, GrowthParams{5, 5, false}, 2).nodes());
}

TEST_CASE("input validation") {
  const Dataset d = mars_data(30, 5, 1);
  CHECK_THROWS_AS(grow_tree(d, GrowthParams{0, 5, true}, 1), InputError);
  CHECK_THROWS_AS(grow_tree(d, GrowthParams{6, 5, true}, 1), InputError);
  CHECK_THROWS_AS(grow_tree(d, GrowthParams{2, 0, true}, 1), InputError);
  CHECK_THROWS_AS(grow_tree(Dataset{}, GrowthParams{}, 1), InputError);
  const Tree t = grow_tree(d, GrowthParams{2, 5, true}, 1);
  CHECK_THROWS_AS(t.predict(std::vector<double>{0.1, 0.2}), InputError);
}

}  // namespace
}  // namespace forestlab
