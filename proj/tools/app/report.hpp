/*
 * Copyright 2026 The idioprobe Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// JSON encoding of results and the CSV tables derived from report.json.

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "idioprobe/analyses.hpp"
#include "idioprobe/sweep.hpp"

namespace idioprobe::app {

inline constexpr int kReportVersion = 1;

nlohmann::json to_json(const ProbeResult& r);
nlohmann::json to_json(const Comparison& c);
nlohmann::json to_json(const stats::TTest& t);
nlohmann::json to_json(const CellKey& key);
nlohmann::json to_json(const SweepReport& report);
nlohmann::json to_json(const TransferMatrix& m);
nlohmann::json to_json(const WeightGeometry& g);
nlohmann::json to_json(const SplitHalfSummary& s);
nlohmann::json to_json(const ResidualSummary& s);
nlohmann::json to_json(const ConfoundControl& c);
nlohmann::json to_json(const ControlOutcome& c);
nlohmann::json to_json(const CrossDatasetResult& r);

/// Serialized probes of one cell: every fold probe plus the fold average.
nlohmann::json probes_to_json(const SweepCell& cell);

/// Stable text form: two-space indent, trailing newline.
std::string dump(const nlohmann::json& doc);
void write_json(const nlohmann::json& doc, const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

/// Writes tables/*.csv from a report document alone. Returns the file names.
std::vector<std::string> write_tables(const nlohmann::json& report,
                                      const std::filesystem::path& tables_dir);

}  // namespace idioprobe::app
