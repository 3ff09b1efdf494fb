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

#ifndef FORESTLAB_ENSEMBLE_H_
#define FORESTLAB_ENSEMBLE_H_

#include <span>
#include <vector>

#include "forestlab/cart.h"
#include "forestlab/matrix.h"

namespace forestlab {

enum class EnsembleKind { kBagging, kForest };

// B trees averaged with equal weights. Bagging iff mtry == p.
class EnsembleModel {
 public:
  EnsembleModel(std::vector<Tree> trees, GrowthParams params, std::size_t num_features)
      : trees_(std::move(trees)), params_(params), num_features_(num_features) {}

  const std::vector<Tree>& trees() const { return trees_; }
  const GrowthParams& params() const { return params_; }
  std::size_t num_features() const { return num_features_; }
  std::size_t size() const { return trees_.size(); }

  EnsembleKind kind() const {
    return static_cast<std::size_t>(params_.mtry) == num_features_ ? EnsembleKind::kBagging
                                                                   : EnsembleKind::kForest;
  }

  bool operator==(const EnsembleModel&) const = default;

 private:
  std::vector<Tree> trees_;
  GrowthParams params_;
  std::size_t num_features_;
};

// Seed of tree b: derive_seed(ensemble_seed, "tree", b). Independent of B, so
// growing more trees leaves the earlier ones untouched.
Seed tree_seed(Seed ensemble_seed, std::size_t b);

// Grows B trees, tree b from tree_seed(seed, b). Trees are distributed over
// `workers` threads; the model does not depend on the worker count.
EnsembleModel train_ensemble(const Dataset& data, const GrowthParams& params, int B,
                             Seed seed, int workers = 1);

// Same, with explicit per-tree seeds (tree b grown from seeds[b]).
EnsembleModel train_ensemble_with_seeds(const Dataset& data, const GrowthParams& params,
                                        std::span<const Seed> seeds, int workers = 1);

// (1/B) * sum of tree predictions, summed in tree-index order.
double predict_ensemble(const EnsembleModel& model, std::span<const double> x);

std::vector<double> predict_per_tree(const EnsembleModel& model, std::span<const double> x);

// Per-point sums over trees for a batch of query rows: S_j = sum_b t_b(x_j)
// and Q_j = sum_b t_b(x_j)^2, both in tree-index order, and the ensemble
// prediction S_j / B (bit-identical to predict_ensemble).
struct TreeMoments {
  std::vector<double> prediction;
  std::vector<double> sum;
  std::vector<double> sum_sq;
};
TreeMoments predict_moments(const EnsembleModel& model, const Matrix& x);

}  // namespace forestlab

#endif  // FORESTLAB_ENSEMBLE_H_
