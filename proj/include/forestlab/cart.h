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

#ifndef FORESTLAB_CART_H_
#define FORESTLAB_CART_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "forestlab/dgp.h"
#include "forestlab/rng.h"

namespace forestlab {

struct GrowthParams {
  // Covariates drawn (without replacement) as split candidates at each node.
  // mtry == p is bagging.
  int mtry = 1;
  // A node with at most this many in-bag observations is not split.
  int min_node_size = 5;
  // Grow on a size-n bootstrap resample (true) or on the data as is (false).
  bool bootstrap = true;

  bool operator==(const GrowthParams&) const = default;
};

struct SplitRule {
  int covariate = 0;
  double threshold = 0.0;

  bool goes_left(std::span<const double> x) const {
    return x[static_cast<std::size_t>(covariate)] <= threshold;
  }
  bool operator==(const SplitRule&) const = default;
};

// Flat node. Internal nodes carry a split and two child ids; leaves carry the
// mean of their in-bag responses. value/count are set on every node.
struct TreeNode {
  std::optional<SplitRule> split;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;
  std::int32_t count = 0;

  bool is_leaf() const { return !split.has_value(); }
  bool operator==(const TreeNode&) const = default;
};

// Relative tolerance (times the node's sum of squares) under which two
// criterion values are treated as tied, and under which a gain counts as zero.
inline constexpr double kSplitTieTolerance = 1e-10;

// A grown regression tree. Immutable after growth.
class Tree {
 public:
  Tree(std::vector<TreeNode> nodes, std::vector<std::uint32_t> inbag,
       std::size_t num_features)
      : nodes_(std::move(nodes)), inbag_(std::move(inbag)), num_features_(num_features) {}

  // Index of the leaf containing x.
  std::size_t leaf_of(std::span<const double> x) const;
  double predict(std::span<const double> x) const { return nodes_[leaf_of(x)].value; }

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  // The bootstrap multiset (0-based row indices) the tree was grown on.
  const std::vector<std::uint32_t>& inbag() const { return inbag_; }
  std::size_t num_features() const { return num_features_; }
  std::size_t num_leaves() const;

  bool operator==(const Tree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
  std::vector<std::uint32_t> inbag_;
  std::size_t num_features_ = 0;
};

// n uniform draws with replacement from {0, ..., n-1}.
std::vector<std::uint32_t> bootstrap_indices(std::size_t n, Seed seed);

// Grows a CART regression tree.
//
// At each node with more than min_node_size in-bag observations and
// non-constant responses, mtry covariates are drawn without replacement from
// the derive_seed(seed, "mtry") stream (skipped when mtry == p). For each
// drawn covariate, thresholds are midpoints between consecutive distinct
// in-node values. The split maximizing the decrease in within-node sum of
// squares is taken. Candidates are visited in ascending (covariate,
// threshold) order, and a candidate displaces the incumbent only if it
// improves on it by more than kSplitTieTolerance times the node's sum of
// squares, so ties go to the lowest covariate index and then the lowest
// threshold. If no candidate beats zero by that margin the node is a leaf.
//
// The bootstrap sample comes from derive_seed(seed, "bootstrap"), which is
// independent of mtry.
Tree grow_tree(const Dataset& data, const GrowthParams& params, Seed seed);

double predict_tree(const Tree& tree, std::span<const double> x);

}  // namespace forestlab

#endif  // FORESTLAB_CART_H_
