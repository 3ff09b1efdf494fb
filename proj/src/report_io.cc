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

#include "forestlab/report_io.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "forestlab/error.h"
#include "json.hpp"

namespace forestlab {

namespace {

constexpr std::string_view kRowFields[] = {
    "label",          "sigma_f",         "sigma_eps",  "bias_sq_bag", "bias_sq_forest",
    "var_bag",        "var_forest",      "tree_var_bag", "tree_var_forest", "corr_bag",
    "corr_forest",    "irreducible",     "mse_bag",    "mse_forest",  "t_statistic",
    "delta_r_percent"};

constexpr std::string_view kConfigKeys[] = {
    "label", "model", "law",           "rho",       "p_total",     "snr",     "normalized",
    "n",     "W",     "B",             "mtry_forest", "min_node_size", "test_size",
    "master_seed", "workers", "output", "format"};

// Numeric fields of a row, in column order after the label.
std::vector<double> numeric_fields(const ReportRow& r) {
  return {r.sigma_f,      r.sigma_eps,      r.bias_sq_bag, r.bias_sq_forest, r.var_bag,
          r.var_forest,   r.tree_var_bag,   r.tree_var_forest, r.corr_bag,   r.corr_forest,
          r.irreducible,  r.mse_bag,        r.mse_forest,  r.t_statistic,    r.delta_r_percent};
}

std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw InputError(std::string(key) + ": cannot parse '" + std::string(value) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw InputError(std::string(key) + ": expected true or false, got '" + std::string(value) + "'");
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::span<const std::string_view> report_row_fields() { return kRowFields; }

void write_csv(std::ostream& os, std::span<const ReportRow> rows) {
  for (std::size_t i = 0; i < std::size(kRowFields); ++i) {
    os << (i ? "," : "") << kRowFields[i];
  }
  os << '\n';
  for (const ReportRow& r : rows) {
    os << csv_escape(r.label);
    for (const double v : numeric_fields(r)) os << ',' << format_double(v);
    os << '\n';
  }
}

void write_json(std::ostream& os, std::span<const ReportRow> rows) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const ReportRow& r : rows) {
    nlohmann::ordered_json obj;
    obj["label"] = r.label;
    const std::vector<double> values = numeric_fields(r);
    for (std::size_t i = 0; i < values.size(); ++i) {
      const std::string key(kRowFields[i + 1]);
      if (std::isfinite(values[i])) {
        obj[key] = values[i];
      } else {
        obj[key] = nullptr;
      }
    }
    out.push_back(std::move(obj));
  }
  os << out.dump(2) << '\n';
}

void write_markdown(std::ostream& os, std::span<const ReportRow> rows) {
  constexpr std::string_view kRowTitles[] = {
      "sigma_f",           "sigma_eps",           "Bias^2 bagging",     "Bias^2 forest",
      "Variance bagging",  "Variance forest",     "Tree variance bagging",
      "Tree variance forest", "Correlation bagging", "Correlation forest", "Irreducible",
      "MSE bagging",       "MSE forest",          "test statistic",     "relative difference (%)"};
  os << "| |";
  for (const ReportRow& r : rows) os << ' ' << r.label << " |";
  os << "\n|---|";
  for (std::size_t i = 0; i < rows.size(); ++i) os << "---:|";
  os << '\n';
  for (std::size_t f = 0; f < std::size(kRowTitles); ++f) {
    os << "| " << kRowTitles[f] << " |";
    for (const ReportRow& r : rows) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.2f", numeric_fields(r)[f]);
      os << ' ' << buf << " |";
    }
    os << '\n';
  }
}

void write_rows(std::ostream& os, std::span<const ReportRow> rows, std::string_view format) {
  if (format == "csv") {
    write_csv(os, rows);
  } else if (format == "json") {
    write_json(os, rows);
  } else if (format == "md") {
    write_markdown(os, rows);
  } else {
    throw InputError("format: expected csv, json or md, got '" + std::string(format) + "'");
  }
}

void write_figure_csv(std::ostream& os, std::span<const SliceBin> bins) {
  os << kFigureHeader << '\n';
  for (const SliceBin& b : bins) {
    os << format_double(b.low) << ',' << format_double(b.high) << ',' << format_double(b.mid)
       << ',' << format_double(b.d_mse) << ',' << format_double(b.d_bias_sq) << ','
       << format_double(b.d_var) << ',' << b.count << '\n';
  }
}

void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> points) {
  os << kSweepHeader << '\n';
  for (const SweepPoint& pt : points) {
    const ReportRow& r = pt.row;
    os << format_double(pt.value) << ',' << format_double(r.delta_r_percent) << ','
       << format_double(r.bias_sq_bag) << ',' << format_double(r.var_bag) << ','
       << format_double(r.bias_sq_forest) << ',' << format_double(r.var_forest) << ','
       << format_double(r.t_statistic) << '\n';
  }
}

std::span<const std::string_view> config_keys() { return kConfigKeys; }

void set_config_field(ExperimentConfig& c, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "label") {
    c.label = std::string(value);
  } else if (key == "model") {
    c.model = parse_regression_kind(value);
  } else if (key == "law") {
    c.law = parse_covariate_kind(value);
  } else if (key == "rho") {
    c.rho = parse_number<double>(key, value);
  } else if (key == "p_total") {
    c.p_total = parse_number<int>(key, value);
  } else if (key == "snr") {
    c.snr = parse_number<double>(key, value);
  } else if (key == "normalized") {
    c.normalized = parse_bool(key, value);
  } else if (key == "n") {
    c.n = parse_number<int>(key, value);
  } else if (key == "W") {
    c.W = parse_number<int>(key, value);
  } else if (key == "B") {
    c.B = parse_number<int>(key, value);
  } else if (key == "mtry_forest") {
    c.mtry_forest = MtryRule::parse(value);
  } else if (key == "min_node_size") {
    c.min_node_size = parse_number<int>(key, value);
  } else if (key == "test_size") {
    c.test_size = parse_number<int>(key, value);
  } else if (key == "master_seed") {
    c.master_seed = parse_number<Seed>(key, value);
  } else if (key == "workers") {
    c.workers = parse_number<int>(key, value);
  } else if (key == "output") {
    c.output = std::string(value);
  } else if (key == "format") {
    c.format = std::string(value);
  } else {
    throw InputError("unknown config key '" + std::string(key) + "'");
  }
}

ExperimentConfig parse_config(std::istream& is, ExperimentConfig base) {
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    set_config_field(base, trim(text.substr(0, eq)), text.substr(eq + 1));
  }
  return base;
}

}  // namespace forestlab
