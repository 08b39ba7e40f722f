// Copyright 2026 The transduce Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Subcommand implementations behind the transduce executable.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>

#include "transduce/config.hpp"

namespace transduce {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitConvergence = 2 };

struct CommandContext {
  RunConfig config;
  std::string out_dir;  ///< empty: config.output.dir
  std::size_t threads = 1;
  std::ostream* out = nullptr;  ///< human-readable report, defaults to std::cout

  std::string output_path(const std::string& file) const;
  std::ostream& stream() const;
};

/// trajectory.csv, summary.json and populations.svg.
int cmd_simulate(const CommandContext& ctx);
/// sweep.csv, sweep.json and sweep.svg; exits 0 when at least 90% of the
/// points succeed.
int cmd_sweep(const CommandContext& ctx);
/// optimize.json.
int cmd_optimize(const CommandContext& ctx);
/// task: volumes, mass, gmap, piezo or wavelengths. Empty grid_path falls
/// back to the config's fields.grid.
int cmd_fields(const CommandContext& ctx, const std::string& grid_path, const std::string& task);
/// Modulation-window verdict and derived rates; check.json.
int cmd_check(const CommandContext& ctx, const std::string& grid_path);
/// kind: auto, populations, line or heatmap.
int cmd_plot(const std::string& csv_path, const std::string& kind, const std::string& out_path);

/// Runs `body` and maps library exceptions to exit codes, printing the
/// message to `err`.
int run_guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace transduce
