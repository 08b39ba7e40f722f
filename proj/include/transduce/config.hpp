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

// JSON run configuration. Frequencies, couplings and rates are ordinary
// frequencies in Hz (nu = omega / 2 pi); they become angular once, here.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "transduce/efficiency.hpp"
#include "transduce/fields.hpp"
#include "transduce/model.hpp"
#include "transduce/sweep.hpp"

namespace transduce {

struct SweepConfig {
  std::vector<SweepAxis> axes;
  std::size_t threads = 1;
};

struct OptimizeConfig {
  std::vector<std::string> knobs;
  OptimizeObjective objective = OptimizeObjective::Asymptotic;
  NelderMeadOptions nelder_mead{};
  bool verify = true;
};

struct FieldsConfig {
  std::string grid;                  ///< path, relative to the config file
  double chi_hz = kDefaultChi / kTwoPi;
  double phi_deg = 0.0;
  PiezoTensor piezo = aln_piezo_tensor();
  std::size_t profile_axis = 0;
};

struct CheckConfig {
  std::optional<double> drive_hz;  ///< default: nu_opt - nu_m / 2
};

struct OutputConfig {
  std::string dir = "out";
  bool svg = true;
};

struct RunConfig {
  TransducerParams params = default_params();
  ConversionOptions conversion{};
  std::optional<SweepConfig> sweep;
  std::optional<OptimizeConfig> optimize;
  std::optional<FieldsConfig> fields;
  CheckConfig check{};
  OutputConfig output{};
  std::string source;  ///< path the config came from, empty for in-memory
};

/// Parses and validates a configuration; throws ParseError naming the key.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Fully resolved configuration. parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const RunConfig& config);

/// Comma-separated truncations, e.g. "3,4,2,3".
std::array<std::size_t, kSubsystemCount> parse_dims(const std::string& text);

}  // namespace transduce
