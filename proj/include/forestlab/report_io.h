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

#ifndef FORESTLAB_REPORT_IO_H_
#define FORESTLAB_REPORT_IO_H_

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forestlab/harness.h"
#include "forestlab/metrics.h"

namespace forestlab {

// ReportRow field names in CSV column order.
std::span<const std::string_view> report_row_fields();

// Full-precision (shortest round-trip) CSV with a report_row_fields() header.
void write_csv(std::ostream& os, std::span<const ReportRow> rows);
// Array of objects keyed by report_row_fields(); NaN is written as null.
void write_json(std::ostream& os, std::span<const ReportRow> rows);
// Transposed table: one column per row, values rounded to 2 decimals.
void write_markdown(std::ostream& os, std::span<const ReportRow> rows);
void write_rows(std::ostream& os, std::span<const ReportRow> rows, std::string_view format);

inline constexpr std::string_view kFigureHeader =
    "bin_low,bin_high,bin_mid,d_mse,d_bias_sq,d_var,count";
void write_figure_csv(std::ostream& os, std::span<const SliceBin> bins);

// Curves for plotting: value, delta_r_percent, bias_sq/var per method, t.
inline constexpr std::string_view kSweepHeader =
    "value,delta_r_percent,bias_sq_bag,var_bag,bias_sq_forest,var_forest,t_statistic";
void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> points);

// Config keys are ExperimentConfig field names. Unknown keys and malformed
// values throw InputError naming the key.
std::span<const std::string_view> config_keys();
void set_config_field(ExperimentConfig& config, std::string_view key, std::string_view value);

// Plain text, one `key = value` per line; blank lines and lines starting
// with '#' are skipped.
ExperimentConfig parse_config(std::istream& is, ExperimentConfig base = {});

// Shortest representation that round-trips; "nan"/"inf" for non-finite.
std::string format_double(double v);

}  // namespace forestlab

#endif  // FORESTLAB_REPORT_IO_H_
