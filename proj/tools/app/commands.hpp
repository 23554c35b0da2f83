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

#include <filesystem>
#include <ostream>
#include <string>

#include "idioprobe/synth.hpp"
#include "run_config.hpp"

namespace idioprobe::app {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitRuntime = 2 };

/// Analysis commands. Each runs the sweep over the configured cells, then
/// its analysis per cell, and writes the report directory.
enum class Command { Probe, Sweep, Transfer, SplitHalf, Residual, Confounds, Controls, CrossDataset };

std::string_view command_name(Command cmd) noexcept;

/// Runs a command end to end; returns the report document it wrote.
nlohmann::json run_command(Command cmd, const RunConfig& config, std::ostream& log);

/// Writes emb_L<layer>.emb1, targets.csv, synth.json and a ready-to-run
/// config.json into `dir`.
void write_synth(const SynthConfig& synth, const std::filesystem::path& dir);

/// Regenerates tables/*.csv from `dir`/report.json.
void regenerate_tables(const std::filesystem::path& dir, std::ostream& log);

/// Full CLI: parses argv, dispatches, maps failures to exit codes.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace idioprobe::app
