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

#ifndef FORESTLAB_METRICS_H_
#define FORESTLAB_METRICS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "forestlab/matrix.h"

namespace forestlab {

// Streaming statistics for one method over W training replicates, evaluated
// on a fixed test set of J points. Per point j it keeps running sums over runs
// of the ensemble prediction p and p^2, of (y_j - p)^2, and of the within-run
// tree sums S = sum_b t_b, Q = sum_b t_b^2 and S^2. Per run it keeps the test
// MSE and the mean and population variance over j of the signal error f - p.
//
// Accumulators over disjoint runs merge by field-wise addition (run vectors
// are concatenated). Single writer.
class RunAccumulator {
 public:
  RunAccumulator(std::vector<double> signal, std::vector<double> test_y);

  // Adds one run. `tree_sum` and `tree_sum_sq` are the per-point S and Q.
  void accumulate_run(std::span<const double> predictions, std::span<const double> tree_sum,
                      std::span<const double> tree_sum_sq);
  void merge(const RunAccumulator& other);

  std::size_t runs() const { return mse_run_.size(); }
  std::size_t points() const { return signal_.size(); }

  const std::vector<double>& signal() const { return signal_; }
  const std::vector<double>& test_y() const { return test_y_; }
  const std::vector<double>& sum_p() const { return sum_p_; }
  const std::vector<double>& sum_p2() const { return sum_p2_; }
  const std::vector<double>& sum_sqerr_y() const { return sum_sqerr_y_; }
  const std::vector<double>& sum_s() const { return sum_s_; }
  const std::vector<double>& sum_q() const { return sum_q_; }
  const std::vector<double>& sum_s2() const { return sum_s2_; }
  const std::vector<double>& mse_run() const { return mse_run_; }
  const std::vector<double>& run_error_mean() const { return run_error_mean_; }
  const std::vector<double>& run_error_var() const { return run_error_var_; }

  bool operator==(const RunAccumulator&) const = default;

 private:
  std::vector<double> signal_;
  std::vector<double> test_y_;
  std::vector<double> sum_p_, sum_p2_, sum_sqerr_y_;
  std::vector<double> sum_s_, sum_q_, sum_s2_;
  std::vector<double> mse_run_;
  std::vector<double> run_error_mean_, run_error_var_;
};

struct DecompositionReport {
  // Conditional-on-x split: E[(f - E[fhat|X])^2] and E[Var[fhat|X]].
  double bias_sq = 0.0;
  double variance = 0.0;
  double tree_variance = 0.0;
  double pairwise_correlation = 0.0;
  // mean_j cov_j / mean_j tree_var_j, logged next to the mean of ratios.
  double correlation_ratio_of_means = 0.0;
  std::size_t degenerate_correlation_points = 0;
  std::size_t clamped_correlation_points = 0;
  // Known sigma_eps^2 and the test-set mean of (y - f)^2.
  double irreducible = 0.0;
  double irreducible_empirical = 0.0;
  double mse_empirical = 0.0;
  double mse_plugin = 0.0;
  // Conditional-on-fhat split of the same total.
  double fhat_bias_sq = 0.0;
  double fhat_variance = 0.0;
};

struct ComparisonReport {
  DecompositionReport bagging;
  DecompositionReport forest;
  double delta_r_percent = 0.0;
  // NaN when the per-run differences have zero spread (t_degenerate set).
  double t_statistic = 0.0;
  double z_bar = 0.0;
  double z_std = 0.0;
  bool t_degenerate = false;
  std::size_t W = 0;
};

// Per point: bias_j = f_j - mean_w p, var_j = mean_w p^2 - (mean_w p)^2
// (population divisor). Averages over j, plus mse_plugin = bias_sq + variance
// + sigma_eps^2. Needs W >= 2. Tree fields are left at zero.
DecompositionReport decompose_conditional_on_x(const RunAccumulator& acc, double sigma_eps);

struct FhatDecomposition {
  double bias_sq = 0.0;
  double variance = 0.0;
};

// Rows are runs, columns test points, entries f_j - p_{w,j}. Per run: mean and
// population variance over j; bias_sq = mean_w mean^2, variance = mean_w var.
FhatDecomposition decompose_conditional_on_fhat(const Matrix& errors);
FhatDecomposition decompose_conditional_on_fhat(const RunAccumulator& acc);

struct TreeDiagnostics {
  double tree_variance = 0.0;
  double pairwise_correlation = 0.0;
  double correlation_ratio_of_means = 0.0;
  std::size_t degenerate_points = 0;
  std::size_t clamped_points = 0;
};

// Pools the W*B tree predictions at each point: tree_var_j = Q/N - (S/N)^2.
// E[T1 T2] is the all-pairs estimate mean_w (S^2 - Q) / (B (B - 1)). A point
// with zero tree variance gets correlation 1 and is counted as degenerate;
// ratios outside [-1, 1] are clamped and counted.
TreeDiagnostics tree_diagnostics(const RunAccumulator& acc, int B);

// Everything above in one report. With B < 2 the correlation fields are NaN
// and tree_variance equals the ensemble variance. The conditional-on-fhat
// fields are NaN for a single test point.
DecompositionReport decompose(const RunAccumulator& acc, double sigma_eps, int B);

// |variance - correlation * tree_variance| / variance.
double decorrelation_identity_gap(const DecompositionReport& report);

// 100 (mse_bag - mse_forest) / mse_forest.
double relative_difference(double mse_bag, double mse_forest);

struct PairedT {
  double t = 0.0;
  double z_bar = 0.0;
  double z_std = 0.0;
};

// t = mean(z) / (sd(z) / sqrt(W)), sd with divisor W - 1.
PairedT paired_t(std::span<const double> z);

ComparisonReport compare(const RunAccumulator& bagging, const RunAccumulator& forest,
                         double sigma_eps, int B);

// Per test point conditional quantities for one method.
struct PointStats {
  std::vector<double> mse;       // mean_w (y_j - p_{w,j})^2
  std::vector<double> bias;      // f_j - mean_w p_{w,j}
  std::vector<double> variance;  // population variance over w
};
PointStats point_stats(const RunAccumulator& acc);

struct SliceBin {
  double low = 0.0;
  double high = 0.0;
  double mid = 0.0;
  double d_mse = 0.0;
  double d_bias_sq = 0.0;
  double d_var = 0.0;
  std::size_t count = 0;
};

// Equal-count bins over `covariate` (bin b holds ranks [bJ/bins, (b+1)J/bins)
// of the sorted values); per bin, the means of bagging minus forest
// conditional MSE, squared bias and variance.
std::vector<SliceBin> conditional_slice(const PointStats& bagging, const PointStats& forest,
                                        std::span<const double> covariate, int bins);

}  // namespace forestlab

#endif  // FORESTLAB_METRICS_H_
