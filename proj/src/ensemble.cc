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

#include "forestlab/ensemble.h"

#include <optional>
#include <string>

#include "forestlab/error.h"
#include "forestlab/parallel.h"

namespace forestlab {

namespace {

void check_dims(const EnsembleModel& model, std::size_t got) {
  if (got != model.num_features()) {
    throw InputError("predict: expected " + std::to_string(model.num_features()) +
                     " covariates, got " + std::to_string(got));
  }
}

}  // namespace

Seed tree_seed(Seed ensemble_seed, std::size_t b) {
  return derive_seed(ensemble_seed, "tree", b);
}

EnsembleModel train_ensemble(const Dataset& data, const GrowthParams& params, int B,
                             Seed seed, int workers) {
  if (B < 1) throw InputError("B must be >= 1, got " + std::to_string(B));
  std::vector<Seed> seeds(static_cast<std::size_t>(B));
  for (std::size_t b = 0; b < seeds.size(); ++b) seeds[b] = tree_seed(seed, b);
  return train_ensemble_with_seeds(data, params, seeds, workers);
}

EnsembleModel train_ensemble_with_seeds(const Dataset& data, const GrowthParams& params,
                                        std::span<const Seed> seeds, int workers) {
  if (seeds.empty()) throw InputError("B must be >= 1, got 0");
  std::vector<std::optional<Tree>> slots(seeds.size());
  parallel_for(seeds.size(), workers,
               [&](std::size_t b) { slots[b].emplace(grow_tree(data, params, seeds[b])); });
  std::vector<Tree> trees;
  trees.reserve(slots.size());
  for (auto& slot : slots) trees.push_back(std::move(*slot));
  return EnsembleModel(std::move(trees), params, data.p());
}

double predict_ensemble(const EnsembleModel& model, std::span<const double> x) {
  check_dims(model, x.size());
  double sum = 0.0;
  for (const Tree& tree : model.trees()) sum += tree.predict(x);
  return sum / static_cast<double>(model.size());
}

std::vector<double> predict_per_tree(const EnsembleModel& model, std::span<const double> x) {
  check_dims(model, x.size());
  std::vector<double> out;
  out.reserve(model.size());
  for (const Tree& tree : model.trees()) out.push_back(tree.predict(x));
  return out;
}

TreeMoments predict_moments(const EnsembleModel& model, const Matrix& x) {
  check_dims(model, x.cols());
  const std::size_t J = x.rows();
  TreeMoments m;
  m.sum.assign(J, 0.0);
  m.sum_sq.assign(J, 0.0);
  for (const Tree& tree : model.trees()) {
    for (std::size_t j = 0; j < J; ++j) {
      const double t = tree.predict(x.row(j));
      m.sum[j] += t;
      m.sum_sq[j] += t * t;
    }
  }
  m.prediction.resize(J);
  const auto B = static_cast<double>(model.size());
  for (std::size_t j = 0; j < J; ++j) m.prediction[j] = m.sum[j] / B;
  return m;
}

}  // namespace forestlab
