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

// forestlab: batch CLI for the bagging versus random forest experiments.
//
//   forestlab run    [--config FILE] [--<key> VALUE ...]
//   forestlab table  <preset> [--W N] [--B N] [--test_size N] [--master_seed S]
//                    [--workers N] [--format csv|json|md] [--output PATH]
//   forestlab sweep  --kind irrelevant|rho --grid V1,V2,... [--curves PATH] [config flags]
//   forestlab figure --covariate K --bins N [config flags]
//   forestlab presets
//
// Exit codes: 0 success, 1 input error, 2 runtime or numeric error.
// FORESTLAB_WORKERS overrides the worker count.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "forestlab/error.h"
#include "forestlab/harness.h"
#include "forestlab/report_io.h"

namespace {

using forestlab::ExperimentConfig;
using forestlab::InputError;

// --config plus one --<key> flag per config key; flags win over the file.
struct ConfigFlags {
  std::string config_path;
  std::vector<std::optional<std::string>> values;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
    const auto keys = forestlab::config_keys();
    values.resize(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
      app->add_option("--" + std::string(keys[i]), values[i]);
    }
  }

  ExperimentConfig resolve() const {
    ExperimentConfig config;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw InputError("config: cannot open " + config_path);
      config = forestlab::parse_config(in);
    }
    const auto keys = forestlab::config_keys();
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (values[i]) forestlab::set_config_field(config, keys[i], *values[i]);
    }
    return config;
  }
};

std::optional<int> env_workers() {
  const char* env = std::getenv("FORESTLAB_WORKERS");
  if (env == nullptr || *env == '\0') return std::nullopt;
  ExperimentConfig scratch;
  forestlab::set_config_field(scratch, "workers", env);
  return scratch.workers;
}

// Writes through `fn` to `path`, or to stdout when the path is empty.
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("output: cannot open " + path);
  fn(out);
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, comma - start);
    if (!item.empty()) {
      try {
        std::size_t used = 0;
        grid.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw InputError("grid: cannot parse '" + item + "'");
      }
    }
    start = comma + 1;
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bagging versus random forest simulation laboratory"};
  app.require_subcommand(1);

  ConfigFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "Run one paired experiment");
  run_flags.attach(run);

  std::string preset;
  forestlab::PresetOverrides overrides;
  std::string table_format = "csv";
  std::string table_output;
  CLI::App* table = app.add_subcommand("table", "Run every column of a table preset");
  table->add_option("preset", preset, "Preset name")->required();
  table->add_option("--W", overrides.W, "Training sets per experiment");
  table->add_option("--B", overrides.B, "Trees per ensemble");
  table->add_option("--test_size", overrides.test_size, "Test set size");
  table->add_option("--master_seed", overrides.master_seed, "Master seed");
  table->add_option("--workers", overrides.workers, "Worker threads");
  table->add_option("--format", table_format, "csv, json or md");
  table->add_option("--output", table_output, "Output path (default stdout)");

  ConfigFlags sweep_flags;
  std::string sweep_kind;
  std::string sweep_grid;
  std::string curves_path;
  CLI::App* sweep = app.add_subcommand("sweep", "Sweep irrelevant-covariate counts or rho");
  sweep->add_option("--kind", sweep_kind, "irrelevant or rho")->required();
  sweep->add_option("--grid", sweep_grid, "Comma-separated values")->required();
  sweep->add_option("--curves", curves_path, "Also write plot curves as CSV to this path");
  sweep_flags.attach(sweep);

  ConfigFlags figure_flags;
  int covariate = 0;
  int bins = 20;
  CLI::App* figure = app.add_subcommand("figure", "Binned conditional differences for plotting");
  figure->add_option("--covariate", covariate, "1-based covariate index")->required();
  figure->add_option("--bins", bins, "Number of equal-count bins");
  figure_flags.attach(figure);

  CLI::App* presets = app.add_subcommand("presets", "List table presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const std::optional<int> workers = env_workers();
    if (*run) {
      ExperimentConfig config = run_flags.resolve();
      if (workers) config.workers = *workers;
      const forestlab::ExperimentResult result = forestlab::run_experiment(config);
      with_output(config.output, [&](std::ostream& os) {
        forestlab::write_rows(os, std::span(&result.row, 1), config.format);
      });
    } else if (*table) {
      if (workers) overrides.workers = *workers;
      // Validate the format before spending time on the experiments.
      ExperimentConfig probe;
      probe.format = table_format;
      probe.validate();
      const auto rows = forestlab::run_table_preset(preset, overrides);
      with_output(table_output, [&](std::ostream& os) {
        forestlab::write_rows(os, rows, table_format);
      });
    } else if (*sweep) {
      ExperimentConfig base = sweep_flags.resolve();
      if (workers) base.workers = *workers;
      const auto kind = forestlab::parse_sweep_kind(sweep_kind);
      const auto points = forestlab::run_sweep(kind, base, parse_grid(sweep_grid));
      std::vector<forestlab::ReportRow> rows;
      for (const auto& pt : points) rows.push_back(pt.row);
      with_output(base.output, [&](std::ostream& os) { forestlab::write_rows(os, rows, base.format); });
      if (!curves_path.empty()) {
        with_output(curves_path, [&](std::ostream& os) { forestlab::write_sweep_csv(os, points); });
      }
    } else if (*figure) {
      ExperimentConfig config = figure_flags.resolve();
      if (workers) config.workers = *workers;
      config.validate();
      if (covariate < 1 || covariate > config.resolved_p()) {
        throw InputError("covariate: must lie in [1, " + std::to_string(config.resolved_p()) + "]");
      }
      const forestlab::ExperimentResult result = forestlab::run_experiment(config);
      const auto data = forestlab::figure_data(result, covariate, bins);
      with_output(config.output, [&](std::ostream& os) { forestlab::write_figure_csv(os, data); });
    } else if (*presets) {
      for (const auto name : forestlab::preset_names()) std::cout << name << '\n';
    }
  } catch (const forestlab::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
