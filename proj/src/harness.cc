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

#include "forestlab/harness.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "forestlab/ensemble.h"
#include "forestlab/error.h"
#include "forestlab/parallel.h"

namespace forestlab {

// ---------------------------------------------------------------------------
// MtryRule

MtryRule MtryRule::parse(std::string_view token) {
  if (token == "p/3") return ThirdOfP();
  if (token == "p/2") return HalfOfP();
  int k = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), k);
  if (ec != std::errc() || ptr != token.data() + token.size() || k < 1) {
    throw InputError("mtry_forest: expected 'p/3', 'p/2' or a positive integer, got '" +
                     std::string(token) + "'");
  }
  return Explicit(k);
}

int MtryRule::resolve(int p) const {
  switch (kind_) {
    case Kind::kThirdOfP: return std::max(1, p / 3);
    case Kind::kHalfOfP: return std::max(1, p / 2);
    case Kind::kExplicit:
      if (value_ > p) {
        throw InputError("mtry_forest: " + std::to_string(value_) + " exceeds p = " +
                         std::to_string(p));
      }
      return value_;
  }
  return 1;
}

std::string MtryRule::to_string() const {
  switch (kind_) {
    case Kind::kThirdOfP: return "p/3";
    case Kind::kHalfOfP: return "p/2";
    case Kind::kExplicit: return std::to_string(value_);
  }
  return "?";
}

// ---------------------------------------------------------------------------
// ExperimentConfig

int ExperimentConfig::resolved_p() const {
  return p_total == 0 ? RegressionFn{model}.relevant_count() : p_total;
}

CovariateLaw ExperimentConfig::covariate_law() const {
  return {law, law == CovariateKind::kEquicorrelatedNormal ? rho : 0.0};
}

void ExperimentConfig::validate() const {
  const auto fail = [](const std::string& field, const std::string& why) {
    throw InputError(field + ": " + why);
  };
  const int relevant = RegressionFn{model}.relevant_count();
  if (p_total != 0 && p_total < relevant) {
    fail("p_total", "must be 0 or >= " + std::to_string(relevant));
  }
  if (!(rho >= 0.0 && rho <= 1.0)) fail("rho", "must lie in [0, 1]");
  if (!(snr > 0.0) || !std::isfinite(snr)) fail("snr", "must be positive");
  if (n < 1) fail("n", "must be >= 1");
  if (W < 2) fail("W", "must be >= 2");
  if (B < 1) fail("B", "must be >= 1");
  if (min_node_size < 1) fail("min_node_size", "must be >= 1");
  if (test_size < 2) fail("test_size", "must be >= 2");
  if (workers < 1) fail("workers", "must be >= 1");
  if (format != "csv" && format != "json" && format != "md") {
    fail("format", "expected csv, json or md");
  }
  mtry_forest.resolve(resolved_p());
}

// ---------------------------------------------------------------------------
// Experiments

ReportRow make_report_row(std::string label, const DgpSpec& dgp, const ComparisonReport& c) {
  ReportRow r;
  r.label = std::move(label);
  r.sigma_f = dgp.effective_sigma_f();
  r.sigma_eps = dgp.sigma_eps;
  r.bias_sq_bag = c.bagging.bias_sq;
  r.bias_sq_forest = c.forest.bias_sq;
  r.var_bag = c.bagging.variance;
  r.var_forest = c.forest.variance;
  r.tree_var_bag = c.bagging.tree_variance;
  r.tree_var_forest = c.forest.tree_variance;
  r.corr_bag = c.bagging.pairwise_correlation;
  r.corr_forest = c.forest.pairwise_correlation;
  r.irreducible = c.bagging.irreducible_empirical;
  r.mse_bag = c.bagging.mse_empirical;
  r.mse_forest = c.forest.mse_empirical;
  r.t_statistic = c.t_statistic;
  r.delta_r_percent = c.delta_r_percent;
  return r;
}

namespace {

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string default_label(const ExperimentConfig& c) {
  std::string s = c.law == CovariateKind::kIidUniform01 ? "U-" : "N-";
  std::string model = to_string(c.model);
  std::transform(model.begin(), model.end(), model.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  s += model;
  s += " p=" + std::to_string(c.resolved_p());
  if (c.law == CovariateKind::kEquicorrelatedNormal) s += " rho=" + format_number(c.rho);
  s += " n=" + std::to_string(c.n);
  s += " SNR=" + format_number(c.snr);
  s += c.normalized ? " normalized" : " original";
  return s;
}

struct RunChunk {
  RunAccumulator bagging;
  RunAccumulator forest;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const int p = config.resolved_p();
  ExperimentResult result;
  result.config = config;
  result.dgp = resolve_dgp(RegressionFn{config.model}, config.covariate_law(), p, config.snr,
                           config.normalized);
  const DgpSpec& dgp = result.dgp;
  const Seed master = config.master_seed;

  Dataset test = generate_dataset(dgp, config.test_size, derive_seed(master, "test"));

  GrowthParams bag_params{.mtry = p, .min_node_size = config.min_node_size, .bootstrap = true};
  GrowthParams forest_params = bag_params;
  forest_params.mtry = config.mtry_forest.resolve(p);

  const auto W = static_cast<std::size_t>(config.W);
  const std::size_t num_chunks = (W + kRunsPerChunk - 1) / kRunsPerChunk;
  RunAccumulator bag_total(test.signal, test.y);
  RunAccumulator forest_total(test.signal, test.y);
  result.pairing_digests.resize(W);

  const auto run_chunk = [&](std::size_t chunk) {
    RunChunk acc{RunAccumulator(test.signal, test.y), RunAccumulator(test.signal, test.y)};
    const std::size_t first = chunk * kRunsPerChunk;
    const std::size_t last = std::min(W, first + kRunsPerChunk);
    for (std::size_t w = first; w < last; ++w) {
      const Dataset train = generate_dataset(dgp, config.n, derive_seed(master, "train", w));
      const Seed ensemble_seed = derive_seed(master, "ensemble", w);

      result.pairing_digests[w][0] = dataset_digest(train);
      {
        const EnsembleModel model = train_ensemble(train, bag_params, config.B, ensemble_seed);
        const TreeMoments m = predict_moments(model, test.x);
        acc.bagging.accumulate_run(m.prediction, m.sum, m.sum_sq);
      }
      result.pairing_digests[w][1] = dataset_digest(train);
      {
        const EnsembleModel model = train_ensemble(train, forest_params, config.B, ensemble_seed);
        const TreeMoments m = predict_moments(model, test.x);
        acc.forest.accumulate_run(m.prediction, m.sum, m.sum_sq);
      }
    }
    return acc;
  };

  // Waves of at most `workers` chunks; each wave is merged in chunk order.
  const auto wave_size = static_cast<std::size_t>(config.workers);
  for (std::size_t start = 0; start < num_chunks; start += wave_size) {
    const std::size_t count = std::min(wave_size, num_chunks - start);
    std::vector<std::optional<RunChunk>> wave(count);
    parallel_for(count, config.workers, [&](std::size_t i) { wave[i].emplace(run_chunk(start + i)); });
    for (auto& chunk : wave) {
      bag_total.merge(chunk->bagging);
      forest_total.merge(chunk->forest);
    }
  }

  result.comparison = compare(bag_total, forest_total, dgp.sigma_eps, config.B);
  result.row = make_report_row(config.label.empty() ? default_label(config) : config.label, dgp,
                               result.comparison);
  result.bagging_points = point_stats(bag_total);
  result.forest_points = point_stats(forest_total);
  result.test_x = std::move(test.x);
  return result;
}

// ---------------------------------------------------------------------------
// Presets

namespace {

constexpr std::string_view kPresetNames[] = {
    "table1",           "table2",     "table3",       "table4_dist",    "table5_irrelevant",
    "table6_rho",       "table7_joint", "appendixC_low", "appendixC_high"};

ExperimentConfig make_config(RegressionKind model, CovariateKind law, int p, int n, double snr,
                             bool normalized, MtryRule mtry, double rho = 0.0) {
  ExperimentConfig c;
  c.model = model;
  c.law = law;
  c.rho = rho;
  c.p_total = p;
  c.n = n;
  c.snr = snr;
  c.normalized = normalized;
  c.mtry_forest = mtry;
  return c;
}

// Three SNRs, original then normalized.
std::vector<ExperimentConfig> snr_grid(RegressionKind model, CovariateKind law, int p, int n,
                                          MtryRule mtry) {
  std::vector<ExperimentConfig> out;
  for (const bool normalized : {false, true}) {
    for (const double snr : {0.05, 1.0, 6.0}) {
      out.push_back(make_config(model, law, p, n, snr, normalized, mtry));
    }
  }
  return out;
}

// Extensions run at n = 250, normalized, mtry = floor(p/3).
constexpr int kExtensionN = 250;

std::vector<ExperimentConfig> distribution_table(double snr) {
  std::vector<ExperimentConfig> out;
  for (const auto model :
       {RegressionKind::kLinear5, RegressionKind::kMars, RegressionKind::kHiddenPattern}) {
    const int p = RegressionFn{model}.relevant_count();
    for (const auto law : {CovariateKind::kIidStandardNormal, CovariateKind::kIidUniform01}) {
      out.push_back(make_config(model, law, p, kExtensionN, snr, true, MtryRule::ThirdOfP()));
    }
  }
  return out;
}

std::vector<ExperimentConfig> irrelevant_table(double snr) {
  struct Column {
    RegressionKind model;
    CovariateKind law;
    int p;
  };
  const Column columns[] = {
      {RegressionKind::kLinear5, CovariateKind::kIidStandardNormal, 6},
      {RegressionKind::kLinear5, CovariateKind::kIidStandardNormal, 30},
      {RegressionKind::kMars, CovariateKind::kIidUniform01, 6},
      {RegressionKind::kMars, CovariateKind::kIidUniform01, 30},
      {RegressionKind::kHiddenPattern, CovariateKind::kIidUniform01, 3},
      {RegressionKind::kHiddenPattern, CovariateKind::kIidUniform01, 15},
  };
  std::vector<ExperimentConfig> out;
  for (const Column& c : columns) {
    out.push_back(make_config(c.model, c.law, c.p, kExtensionN, snr, true, MtryRule::ThirdOfP()));
  }
  return out;
}

std::vector<ExperimentConfig> rho_table(double snr) {
  std::vector<ExperimentConfig> out;
  for (const auto model :
       {RegressionKind::kLinear5, RegressionKind::kMars, RegressionKind::kHiddenPattern}) {
    const int p = RegressionFn{model}.relevant_count();
    for (const double rho : {0.0, 0.5}) {
      out.push_back(make_config(model, CovariateKind::kEquicorrelatedNormal, p, kExtensionN, snr,
                                true, MtryRule::ThirdOfP(), rho));
    }
  }
  return out;
}

std::vector<ExperimentConfig> joint_table() {
  struct Row {
    RegressionKind model;
    int p;
  };
  const Row rows[] = {
      {RegressionKind::kLinear5, 6},       {RegressionKind::kLinear5, 30},
      {RegressionKind::kLinear5, 60},      {RegressionKind::kMars, 6},
      {RegressionKind::kMars, 30},         {RegressionKind::kMars, 60},
      {RegressionKind::kHiddenPattern, 3}, {RegressionKind::kHiddenPattern, 15},
      {RegressionKind::kHiddenPattern, 30},
  };
  std::vector<ExperimentConfig> out;
  for (const Row& r : rows) {
    for (const double rho : {0.0, 0.5, 0.9}) {
      out.push_back(make_config(r.model, CovariateKind::kEquicorrelatedNormal, r.p, kExtensionN,
                                1.0, true, MtryRule::ThirdOfP(), rho));
    }
  }
  return out;
}

std::vector<ExperimentConfig> appendix(double snr) {
  std::vector<ExperimentConfig> out = distribution_table(snr);
  for (auto&& v : {irrelevant_table(snr), rho_table(snr)}) out.insert(out.end(), v.begin(), v.end());
  return out;
}

}  // namespace

std::span<const std::string_view> preset_names() { return kPresetNames; }

std::vector<ExperimentConfig> preset_configs(std::string_view name,
                                             const PresetOverrides& overrides) {
  std::vector<ExperimentConfig> configs;
  if (name == "table1") {
    configs = snr_grid(RegressionKind::kLinear5, CovariateKind::kIidStandardNormal, 5, 100,
                          MtryRule::ThirdOfP());
  } else if (name == "table2") {
    configs = snr_grid(RegressionKind::kMars, CovariateKind::kIidUniform01, 5, 200,
                          MtryRule::ThirdOfP());
  } else if (name == "table3") {
    configs = snr_grid(RegressionKind::kHiddenPattern, CovariateKind::kIidUniform01, 2, 500,
                          MtryRule::HalfOfP());
  } else if (name == "table4_dist") {
    configs = distribution_table(1.0);
  } else if (name == "table5_irrelevant") {
    configs = irrelevant_table(1.0);
  } else if (name == "table6_rho") {
    configs = rho_table(1.0);
  } else if (name == "table7_joint") {
    configs = joint_table();
  } else if (name == "appendixC_low") {
    configs = appendix(0.05);
  } else if (name == "appendixC_high") {
    configs = appendix(6.0);
  } else {
    std::string valid;
    for (const auto n : kPresetNames) valid += (valid.empty() ? "" : ", ") + std::string(n);
    throw InputError("unknown preset '" + std::string(name) + "' (valid: " + valid + ")");
  }
  for (ExperimentConfig& c : configs) {
    if (overrides.W) c.W = *overrides.W;
    if (overrides.B) c.B = *overrides.B;
    if (overrides.test_size) c.test_size = *overrides.test_size;
    if (overrides.master_seed) c.master_seed = *overrides.master_seed;
    if (overrides.workers) c.workers = *overrides.workers;
    c.label = default_label(c);
  }
  return configs;
}

std::vector<ReportRow> run_table_preset(std::string_view name, const PresetOverrides& overrides) {
  std::vector<ReportRow> rows;
  for (const ExperimentConfig& c : preset_configs(name, overrides)) {
    rows.push_back(run_experiment(c).row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Sweeps and figure data

SweepKind parse_sweep_kind(std::string_view token) {
  if (token == "irrelevant") return SweepKind::kIrrelevant;
  if (token == "rho") return SweepKind::kRho;
  throw InputError("kind: expected 'irrelevant' or 'rho', got '" + std::string(token) + "'");
}

std::vector<SweepPoint> run_sweep(SweepKind kind, const ExperimentConfig& base,
                                  std::span<const double> grid) {
  if (grid.empty()) throw InputError("grid: must contain at least one value");
  const int relevant = RegressionFn{base.model}.relevant_count();
  std::vector<ExperimentConfig> configs;
  for (const double v : grid) {
    ExperimentConfig c = base;
    if (kind == SweepKind::kIrrelevant) {
      if (!(v >= 0.0) || v != std::floor(v)) {
        throw InputError("grid: irrelevant counts must be non-negative integers");
      }
      c.p_total = relevant + static_cast<int>(v);
    } else {
      if (!(v >= 0.0 && v <= 1.0)) throw InputError("grid: rho values must lie in [0, 1]");
      c.law = CovariateKind::kEquicorrelatedNormal;
      c.rho = v;
    }
    c.label = default_label(c);
    c.validate();
    configs.push_back(std::move(c));
  }
  std::vector<SweepPoint> out;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    out.push_back({grid[i], run_experiment(configs[i]).row});
  }
  return out;
}

std::vector<SliceBin> figure_data(const ExperimentResult& result, int covariate, int bins) {
  if (covariate < 1 || static_cast<std::size_t>(covariate) > result.test_x.cols()) {
    throw InputError("covariate: must lie in [1, " + std::to_string(result.test_x.cols()) +
                     "], got " + std::to_string(covariate));
  }
  const std::vector<double> values = result.test_x.column(static_cast<std::size_t>(covariate - 1));
  return conditional_slice(result.bagging_points, result.forest_points, values, bins);
}

}  // namespace forestlab
