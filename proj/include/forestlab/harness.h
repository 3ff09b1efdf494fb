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

#ifndef FORESTLAB_HARNESS_H_
#define FORESTLAB_HARNESS_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forestlab/dgp.h"
#include "forestlab/matrix.h"
#include "forestlab/metrics.h"

namespace forestlab {

// Forest mtry: floor(p/3), floor(p/2) (never below 1) or an explicit count.
class MtryRule {
 public:
  enum class Kind { kThirdOfP, kHalfOfP, kExplicit };

  static MtryRule ThirdOfP() { return MtryRule(Kind::kThirdOfP, 0); }
  static MtryRule HalfOfP() { return MtryRule(Kind::kHalfOfP, 0); }
  static MtryRule Explicit(int k) { return MtryRule(Kind::kExplicit, k); }
  // "p/3", "p/2" or a positive integer.
  static MtryRule parse(std::string_view token);

  int resolve(int p) const;
  std::string to_string() const;
  Kind kind() const { return kind_; }

  bool operator==(const MtryRule&) const = default;

 private:
  MtryRule(Kind kind, int value) : kind_(kind), value_(value) {}
  Kind kind_ = Kind::kThirdOfP;
  int value_ = 0;
};

inline constexpr Seed kDefaultMasterSeed = 20250101;
// Runs per accumulation chunk. Chunks are merged in index order, which makes
// results independent of the worker count.
inline constexpr int kRunsPerChunk = 4;

struct ExperimentConfig {
  std::string label;
  RegressionKind model = RegressionKind::kLinear5;
  CovariateKind law = CovariateKind::kIidStandardNormal;
  double rho = 0.0;
  // 0 means the regression function's relevant count.
  int p_total = 0;
  double snr = 1.0;
  bool normalized = true;
  int n = 100;
  int W = 500;
  int B = 500;
  MtryRule mtry_forest = MtryRule::ThirdOfP();
  int min_node_size = 5;
  int test_size = 10000;
  Seed master_seed = kDefaultMasterSeed;
  int workers = 1;
  // Output path (empty: stdout) and format token: csv, json or md.
  std::string output;
  std::string format = "csv";

  int resolved_p() const;
  CovariateLaw covariate_law() const;
  // Throws InputError naming the offending field.
  void validate() const;
};

// One column of a results table.
struct ReportRow {
  std::string label;
  double sigma_f = 0.0;
  double sigma_eps = 0.0;
  double bias_sq_bag = 0.0;
  double bias_sq_forest = 0.0;
  double var_bag = 0.0;
  double var_forest = 0.0;
  double tree_var_bag = 0.0;
  double tree_var_forest = 0.0;
  double corr_bag = 0.0;
  double corr_forest = 0.0;
  double irreducible = 0.0;
  double mse_bag = 0.0;
  double mse_forest = 0.0;
  double t_statistic = 0.0;
  double delta_r_percent = 0.0;

  bool operator==(const ReportRow&) const = default;
};

ReportRow make_report_row(std::string label, const DgpSpec& dgp, const ComparisonReport& c);

struct ExperimentResult {
  ExperimentConfig config;
  DgpSpec dgp;
  ComparisonReport comparison;
  ReportRow row;
  // Retained test covariates and per-point conditional statistics.
  Matrix test_x;
  PointStats bagging_points;
  PointStats forest_points;
  // Per run: digest of the training data handed to bagging and to forest.
  std::vector<std::array<std::uint64_t, 2>> pairing_digests;
};

// Paired experiment. One test set from derive_seed(master, "test"); run w
// trains on derive_seed(master, "train", w) and both methods grow their trees
// from derive_seed(master, "ensemble", w), so they share bootstrap samples.
ExperimentResult run_experiment(const ExperimentConfig& config);

std::span<const std::string_view> preset_names();

// Desk-scale overrides applied on top of a preset.
struct PresetOverrides {
  std::optional<int> W;
  std::optional<int> B;
  std::optional<int> test_size;
  std::optional<Seed> master_seed;
  std::optional<int> workers;
};

// One config per table column (table7_joint: 9 model/irrelevant-count rows x
// 3 rho values = 27 configs, grouped by row).
std::vector<ExperimentConfig> preset_configs(std::string_view name,
                                             const PresetOverrides& overrides = {});
std::vector<ReportRow> run_table_preset(std::string_view name,
                                        const PresetOverrides& overrides = {});

enum class SweepKind { kIrrelevant, kRho };
SweepKind parse_sweep_kind(std::string_view token);

struct SweepPoint {
  double value = 0.0;
  ReportRow row;
};

// Irrelevant sweeps take counts of appended covariates; rho sweeps switch the
// law to equicorrelated normal.
std::vector<SweepPoint> run_sweep(SweepKind kind, const ExperimentConfig& base,
                                  std::span<const double> grid);

// Binned bagging-minus-forest conditional differences along covariate
// `covariate` (1-based).
std::vector<SliceBin> figure_data(const ExperimentResult& result, int covariate, int bins);

}  // namespace forestlab

#endif  // FORESTLAB_HARNESS_H_
