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

// CSV and JSON serialization of runs, sweeps and optimizations.

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "transduce/config.hpp"
#include "transduce/efficiency.hpp"
#include "transduce/evolve.hpp"
#include "transduce/sweep.hpp"

namespace transduce {

/// %.17g, or "nan"/"inf" for non-finite values.
std::string format_number(double v);

/// Columns time_s, p_mw, p_m, p_e, p_opt, wg_cum, eta_pop_cum, eta_coh_cum.
/// wg_cum is the raw photon number emitted into the waveguide; the
/// efficiency columns are running versions of the final efficiencies.
void write_trajectory_csv(std::ostream& out, const ConvergedRun& run, const TransducerParams& p);

nlohmann::json efficiency_json(const EfficiencyResult& r);

/// Efficiencies plus the resolved config and tool version.
nlohmann::json summary_json(const EfficiencyResult& r, const RunConfig& config);

/// Long format: one column per axis, then eta_pop, eta_coh, status.
void write_sweep_csv(std::ostream& out, const SweepResult& result);
nlohmann::json sweep_json(const SweepResult& result, const RunConfig& config);

nlohmann::json optimize_json(const OptimizeResult& result, const OptimizeConfig& spec,
                             const RunConfig& config);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  ///< throws if absent
  bool has(const std::string& name) const;
  std::vector<double> numbers(std::size_t column) const;
};

CsvTable read_csv(const std::string& path);

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::string& path, const std::string& text);

}  // namespace transduce
