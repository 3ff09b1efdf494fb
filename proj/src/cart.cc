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

#include "forestlab/cart.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <utility>

#include "forestlab/error.h"

namespace forestlab {

namespace {

struct BestSplit {
  int covariate = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

double midpoint(double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  // Adjacent doubles can round the midpoint up onto hi.
  return mid < hi ? mid : lo;
}

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const GrowthParams& params, Seed seed)
      : data_(data),
        params_(params),
        p_(data.p()),
        mtry_engine_(make_engine(derive_seed(seed, "mtry"))),
        order_(p_) {}

  Tree build(std::vector<std::uint32_t> inbag) {
    samples_ = inbag;
    nodes_.reserve(2 * samples_.size() / std::max(1, params_.min_node_size) + 1);
    grow(0, samples_.size());
    return Tree(std::move(nodes_), std::move(inbag), p_);
  }

 private:
  double x(std::uint32_t row, int covariate) const {
    return data_.x(row, static_cast<std::size_t>(covariate));
  }

  std::int32_t grow(std::size_t begin, std::size_t end) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();
    const std::size_t k = end - begin;

    double sum = 0.0;
    double lo = data_.y[samples_[begin]];
    double hi = lo;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = data_.y[samples_[i]];
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double mean = sum / static_cast<double>(k);
    nodes_[id].value = mean;
    nodes_[id].count = static_cast<std::int32_t>(k);

    if (k <= static_cast<std::size_t>(params_.min_node_size) || lo == hi) return id;

    const BestSplit best = find_split(begin, end, mean);
    if (best.covariate < 0) return id;

    // Stable partition: left block keeps in-node order, then the right block.
    scratch_.clear();
    std::size_t write = begin;
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint32_t s = samples_[i];
      if (x(s, best.covariate) <= best.threshold) {
        samples_[write++] = s;
      } else {
        scratch_.push_back(s);
      }
    }
    std::copy(scratch_.begin(), scratch_.end(), samples_.begin() + static_cast<std::ptrdiff_t>(write));

    const std::int32_t left = grow(begin, write);
    const std::int32_t right = grow(write, end);
    TreeNode& node = nodes_[id];
    node.split = SplitRule{best.covariate, best.threshold};
    node.left = left;
    node.right = right;
    return id;
  }

  // Candidate covariates for this node, ascending.
  std::span<const int> draw_candidates() {
    std::iota(order_.begin(), order_.end(), 0);
    const auto m = static_cast<std::size_t>(params_.mtry);
    if (m >= p_) return order_;
    for (std::size_t i = 0; i < m; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, p_ - 1);
      std::swap(order_[i], order_[pick(mtry_engine_)]);
    }
    std::sort(order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(m));
    return std::span<const int>(order_).first(m);
  }

  BestSplit find_split(std::size_t begin, std::size_t end, double mean) {
    const std::size_t k = end - begin;
    double node_ss = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double d = data_.y[samples_[i]] - mean;
      node_ss += d * d;
    }
    const double tol = kSplitTieTolerance * node_ss;
    const double kd = static_cast<double>(k);

    BestSplit best;
    for (const int covariate : draw_candidates()) {
      pairs_.resize(k);
      for (std::size_t i = 0; i < k; ++i) {
        const std::uint32_t s = samples_[begin + i];
        pairs_[i] = {x(s, covariate), data_.y[s] - mean};
      }
      std::sort(pairs_.begin(), pairs_.end());
      if (pairs_.front().first == pairs_.back().first) continue;

      double total = 0.0;
      for (const auto& pr : pairs_) total += pr.second;
      const double base = total * total / kd;

      double left_sum = 0.0;
      for (std::size_t i = 0; i + 1 < k; ++i) {
        left_sum += pairs_[i].second;
        if (pairs_[i].first == pairs_[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = kd - nl;
        const double right_sum = total - left_sum;
        const double gain = left_sum * left_sum / nl + right_sum * right_sum / nr - base;
        if (gain > best.gain + tol) {
          best.covariate = covariate;
          best.threshold = midpoint(pairs_[i].first, pairs_[i + 1].first);
          best.gain = gain;
        }
      }
    }
    return best;
  }

  const Dataset& data_;
  GrowthParams params_;
  std::size_t p_;
  Engine mtry_engine_;
  std::vector<int> order_;
  std::vector<std::uint32_t> samples_;
  std::vector<std::uint32_t> scratch_;
  std::vector<std::pair<double, double>> pairs_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

std::size_t Tree::leaf_of(std::span<const double> x) const {
  if (x.size() != num_features_) {
    throw InputError("predict: expected " + std::to_string(num_features_) +
                     " covariates, got " + std::to_string(x.size()));
  }
  std::size_t id = 0;
  while (const auto& split = nodes_[id].split) {
    id = static_cast<std::size_t>(split->goes_left(x) ? nodes_[id].left : nodes_[id].right);
  }
  return id;
}

std::size_t Tree::num_leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::vector<std::uint32_t> bootstrap_indices(std::size_t n, Seed seed) {
  if (n == 0) throw InputError("bootstrap_indices: n must be >= 1");
  Engine engine = make_engine(seed);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
  std::vector<std::uint32_t> out(n);
  for (auto& v : out) v = pick(engine);
  return out;
}

Tree grow_tree(const Dataset& data, const GrowthParams& params, Seed seed) {
  if (data.n() == 0 || data.p() == 0) throw InputError("grow_tree: empty dataset");
  if (data.y.size() != data.n()) throw InputError("grow_tree: y length does not match x rows");
  if (params.mtry < 1 || static_cast<std::size_t>(params.mtry) > data.p()) {
    throw InputError("mtry must lie in [1, " + std::to_string(data.p()) + "], got " +
                     std::to_string(params.mtry));
  }
  if (params.min_node_size < 1) throw InputError("min_node_size must be >= 1");

  std::vector<std::uint32_t> inbag;
  if (params.bootstrap) {
    inbag = bootstrap_indices(data.n(), derive_seed(seed, "bootstrap"));
  } else {
    inbag.resize(data.n());
    std::iota(inbag.begin(), inbag.end(), 0U);
  }
  return TreeBuilder(data, params, seed).build(std::move(inbag));
}

double predict_tree(const Tree& tree, std::span<const double> x) { return tree.predict(x); }

}  // namespace forestlab
