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

#include "forestlab/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "forestlab/error.h"

namespace forestlab {

namespace {

void check_length(std::span<const double> v, std::size_t expected, const char* what) {
  if (v.size() != expected) {
    throw InputError(std::string(what) + ": expected length " + std::to_string(expected) +
                     ", got " + std::to_string(v.size()));
  }
}

void add_into(std::vector<double>& dst, const std::vector<double>& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

void append(std::vector<double>& dst, const std::vector<double>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

struct RowMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// Mean and population variance of one row of errors.
RowMoments row_moments(std::span<const double> errors) {
  const auto J = static_cast<double>(errors.size());
  double mean = 0.0;
  for (const double e : errors) mean += e;
  mean /= J;
  double var = 0.0;
  for (const double e : errors) var += (e - mean) * (e - mean);
  return {mean, var / J};
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

RunAccumulator::RunAccumulator(std::vector<double> signal, std::vector<double> test_y)
    : signal_(std::move(signal)), test_y_(std::move(test_y)) {
  if (signal_.size() != test_y_.size()) {
    throw InputError("RunAccumulator: signal and test_y lengths differ");
  }
  if (signal_.empty()) throw InputError("RunAccumulator: empty test set");
  const std::size_t J = signal_.size();
  for (auto* v : {&sum_p_, &sum_p2_, &sum_sqerr_y_, &sum_s_, &sum_q_, &sum_s2_}) {
    v->assign(J, 0.0);
  }
}

void RunAccumulator::accumulate_run(std::span<const double> predictions,
                                    std::span<const double> tree_sum,
                                    std::span<const double> tree_sum_sq) {
  const std::size_t J = points();
  check_length(predictions, J, "accumulate_run predictions");
  check_length(tree_sum, J, "accumulate_run tree sums");
  check_length(tree_sum_sq, J, "accumulate_run tree sums of squares");

  std::vector<double> errors(J);
  double sq_err_y = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    const double p = predictions[j];
    const double r = test_y_[j] - p;
    sum_p_[j] += p;
    sum_p2_[j] += p * p;
    sum_sqerr_y_[j] += r * r;
    sum_s_[j] += tree_sum[j];
    sum_q_[j] += tree_sum_sq[j];
    sum_s2_[j] += tree_sum[j] * tree_sum[j];
    sq_err_y += r * r;
    errors[j] = signal_[j] - p;
  }
  mse_run_.push_back(sq_err_y / static_cast<double>(J));
  const RowMoments m = row_moments(errors);
  run_error_mean_.push_back(m.mean);
  run_error_var_.push_back(m.variance);
}

void RunAccumulator::merge(const RunAccumulator& other) {
  if (other.signal_ != signal_ || other.test_y_ != test_y_) {
    throw InputError("RunAccumulator::merge: accumulators were built on different test sets");
  }
  add_into(sum_p_, other.sum_p_);
  add_into(sum_p2_, other.sum_p2_);
  add_into(sum_sqerr_y_, other.sum_sqerr_y_);
  add_into(sum_s_, other.sum_s_);
  add_into(sum_q_, other.sum_q_);
  add_into(sum_s2_, other.sum_s2_);
  append(mse_run_, other.mse_run_);
  append(run_error_mean_, other.run_error_mean_);
  append(run_error_var_, other.run_error_var_);
}

DecompositionReport decompose_conditional_on_x(const RunAccumulator& acc, double sigma_eps) {
  if (acc.runs() < 2) {
    throw NumericError("decomposition needs at least 2 runs, have " + std::to_string(acc.runs()));
  }
  const auto W = static_cast<double>(acc.runs());
  const std::size_t J = acc.points();
  DecompositionReport r;
  double bias_sq = 0.0, variance = 0.0, mse = 0.0, noise = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    const double mean = acc.sum_p()[j] / W;
    const double bias = acc.signal()[j] - mean;
    bias_sq += bias * bias;
    variance += acc.sum_p2()[j] / W - mean * mean;
    mse += acc.sum_sqerr_y()[j] / W;
    const double e = acc.test_y()[j] - acc.signal()[j];
    noise += e * e;
  }
  const auto Jd = static_cast<double>(J);
  r.bias_sq = bias_sq / Jd;
  r.variance = variance / Jd;
  r.mse_empirical = mse / Jd;
  r.irreducible = sigma_eps * sigma_eps;
  r.irreducible_empirical = noise / Jd;
  r.mse_plugin = r.bias_sq + r.variance + r.irreducible;
  return r;
}

FhatDecomposition decompose_conditional_on_fhat(const Matrix& errors) {
  if (errors.rows() < 1) throw NumericError("fhat decomposition needs at least 1 run");
  if (errors.cols() < 2) throw NumericError("fhat decomposition needs at least 2 test points");
  FhatDecomposition out;
  for (std::size_t w = 0; w < errors.rows(); ++w) {
    const RowMoments m = row_moments(errors.row(w));
    out.bias_sq += m.mean * m.mean;
    out.variance += m.variance;
  }
  const auto W = static_cast<double>(errors.rows());
  out.bias_sq /= W;
  out.variance /= W;
  return out;
}

FhatDecomposition decompose_conditional_on_fhat(const RunAccumulator& acc) {
  if (acc.runs() < 1) throw NumericError("fhat decomposition needs at least 1 run");
  if (acc.points() < 2) throw NumericError("fhat decomposition needs at least 2 test points");
  FhatDecomposition out;
  for (std::size_t w = 0; w < acc.runs(); ++w) {
    out.bias_sq += acc.run_error_mean()[w] * acc.run_error_mean()[w];
    out.variance += acc.run_error_var()[w];
  }
  const auto W = static_cast<double>(acc.runs());
  out.bias_sq /= W;
  out.variance /= W;
  return out;
}

TreeDiagnostics tree_diagnostics(const RunAccumulator& acc, int B) {
  if (acc.runs() < 2) throw NumericError("tree diagnostics need at least 2 runs");
  if (B < 2) throw NumericError("tree diagnostics need at least 2 trees per ensemble");
  const auto W = static_cast<double>(acc.runs());
  const auto Bd = static_cast<double>(B);
  const double N = W * Bd;
  const std::size_t J = acc.points();

  TreeDiagnostics d;
  double sum_var = 0.0, sum_corr = 0.0, sum_cov = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    const double mean = acc.sum_s()[j] / N;
    const double mean_sq = acc.sum_q()[j] / N;
    const double var = mean_sq - mean * mean;
    const double cross = (acc.sum_s2()[j] - acc.sum_q()[j]) / (W * Bd * (Bd - 1.0));
    const double cov = cross - mean * mean;
    double corr = 1.0;
    if (var <= 1e-12 * mean_sq || var <= 0.0) {
      ++d.degenerate_points;
    } else {
      corr = cov / var;
      if (corr > 1.0 || corr < -1.0) {
        ++d.clamped_points;
        corr = std::clamp(corr, -1.0, 1.0);
      }
    }
    sum_var += var;
    sum_cov += cov;
    sum_corr += corr;
  }
  const auto Jd = static_cast<double>(J);
  d.tree_variance = sum_var / Jd;
  d.pairwise_correlation = sum_corr / Jd;
  d.correlation_ratio_of_means =
      sum_var > 0.0 ? sum_cov / sum_var : std::numeric_limits<double>::quiet_NaN();
  return d;
}

DecompositionReport decompose(const RunAccumulator& acc, double sigma_eps, int B) {
  DecompositionReport r = decompose_conditional_on_x(acc, sigma_eps);
  if (B >= 2) {
    const TreeDiagnostics d = tree_diagnostics(acc, B);
    r.tree_variance = d.tree_variance;
    r.pairwise_correlation = d.pairwise_correlation;
    r.correlation_ratio_of_means = d.correlation_ratio_of_means;
    r.degenerate_correlation_points = d.degenerate_points;
    r.clamped_correlation_points = d.clamped_points;
  } else {
    // Single-tree ensembles have no pairwise correlation.
    r.tree_variance = r.variance;
    r.pairwise_correlation = std::numeric_limits<double>::quiet_NaN();
    r.correlation_ratio_of_means = std::numeric_limits<double>::quiet_NaN();
  }
  if (acc.points() >= 2) {
    const FhatDecomposition alt = decompose_conditional_on_fhat(acc);
    r.fhat_bias_sq = alt.bias_sq;
    r.fhat_variance = alt.variance;
  } else {
    r.fhat_bias_sq = std::numeric_limits<double>::quiet_NaN();
    r.fhat_variance = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

double decorrelation_identity_gap(const DecompositionReport& report) {
  if (!(report.variance > 0.0)) {
    throw NumericError("decorrelation gap undefined for zero ensemble variance");
  }
  return std::abs(report.variance - report.pairwise_correlation * report.tree_variance) /
         report.variance;
}

double relative_difference(double mse_bag, double mse_forest) {
  if (!(mse_forest > 0.0)) {
    throw NumericError("relative difference needs a positive forest MSE");
  }
  return 100.0 * (mse_bag - mse_forest) / mse_forest;
}

PairedT paired_t(std::span<const double> z) {
  if (z.size() < 2) throw NumericError("paired t needs at least 2 runs");
  const auto W = static_cast<double>(z.size());
  PairedT out;
  for (const double v : z) out.z_bar += v;
  out.z_bar /= W;
  double ss = 0.0;
  for (const double v : z) ss += (v - out.z_bar) * (v - out.z_bar);
  out.z_std = std::sqrt(ss / (W - 1.0));
  if (!(out.z_std > 0.0)) {
    throw NumericError("paired t undefined: per-run differences have zero spread");
  }
  out.t = out.z_bar / (out.z_std / std::sqrt(W));
  return out;
}

ComparisonReport compare(const RunAccumulator& bagging, const RunAccumulator& forest,
                         double sigma_eps, int B) {
  if (bagging.runs() != forest.runs()) {
    throw InputError("compare: bagging and forest saw different numbers of runs");
  }
  ComparisonReport c;
  c.W = bagging.runs();
  c.bagging = decompose(bagging, sigma_eps, B);
  c.forest = decompose(forest, sigma_eps, B);
  c.delta_r_percent = relative_difference(c.bagging.mse_empirical, c.forest.mse_empirical);

  std::vector<double> z(c.W);
  for (std::size_t w = 0; w < c.W; ++w) z[w] = bagging.mse_run()[w] - forest.mse_run()[w];
  try {
    const PairedT t = paired_t(z);
    c.t_statistic = t.t;
    c.z_bar = t.z_bar;
    c.z_std = t.z_std;
  } catch (const NumericError&) {
    c.t_degenerate = true;
    c.t_statistic = std::numeric_limits<double>::quiet_NaN();
    c.z_bar = mean_of(z);
    c.z_std = 0.0;
  }
  return c;
}

PointStats point_stats(const RunAccumulator& acc) {
  if (acc.runs() < 1) throw NumericError("point stats need at least 1 run");
  const auto W = static_cast<double>(acc.runs());
  const std::size_t J = acc.points();
  PointStats s;
  s.mse.resize(J);
  s.bias.resize(J);
  s.variance.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    const double mean = acc.sum_p()[j] / W;
    s.mse[j] = acc.sum_sqerr_y()[j] / W;
    s.bias[j] = acc.signal()[j] - mean;
    s.variance[j] = acc.sum_p2()[j] / W - mean * mean;
  }
  return s;
}

std::vector<SliceBin> conditional_slice(const PointStats& bagging, const PointStats& forest,
                                        std::span<const double> covariate, int bins) {
  if (bins < 2) throw InputError("bins must be >= 2, got " + std::to_string(bins));
  const std::size_t J = covariate.size();
  for (const PointStats* s : {&bagging, &forest}) {
    if (s->mse.size() != J || s->bias.size() != J || s->variance.size() != J) {
      throw InputError("conditional_slice: point statistics do not match covariate length");
    }
  }
  std::vector<std::size_t> order(J);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return covariate[a] < covariate[b]; });
  std::size_t distinct = J == 0 ? 0 : 1;
  for (std::size_t i = 1; i < J; ++i) {
    if (covariate[order[i]] != covariate[order[i - 1]]) ++distinct;
  }
  if (distinct < static_cast<std::size_t>(bins)) {
    throw InputError("conditional_slice: " + std::to_string(distinct) +
                     " distinct covariate values cannot fill " + std::to_string(bins) + " bins");
  }

  std::vector<SliceBin> out(static_cast<std::size_t>(bins));
  const auto nb = static_cast<std::size_t>(bins);
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t lo = b * J / nb;
    const std::size_t hi = (b + 1) * J / nb;
    SliceBin& bin = out[b];
    bin.count = hi - lo;
    bin.low = covariate[order[lo]];
    bin.high = covariate[order[hi - 1]];
    bin.mid = 0.5 * (bin.low + bin.high);
    for (std::size_t r = lo; r < hi; ++r) {
      const std::size_t j = order[r];
      bin.d_mse += bagging.mse[j] - forest.mse[j];
      bin.d_bias_sq += bagging.bias[j] * bagging.bias[j] - forest.bias[j] * forest.bias[j];
      bin.d_var += bagging.variance[j] - forest.variance[j];
    }
    const auto n = static_cast<double>(bin.count);
    bin.d_mse /= n;
    bin.d_bias_sq /= n;
    bin.d_var /= n;
  }
  return out;
}

}  // namespace forestlab
