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

// Parameter sweeps and Nelder-Mead optimization over transducer knobs.
//
// A knob is either a TransducerParams field (angular units, e.g. g_m_e), a
// Hz-level configuration key (e.g. g_m_e_hz, mapped through 2 pi), or a
// derived knob: Q_MW, Q_m and Q_opt set the matching loss rate to omega / Q
// (Q_opt also keeps gamma_wg = gamma_opt), T2_star sets the dephasing rate
// to 1 / T2_star. An optional "parameters." prefix is ignored.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "transduce/efficiency.hpp"
#include "transduce/model.hpp"

namespace transduce {

bool is_knob(const std::string& name);
void apply_knob(TransducerParams& p, const std::string& name, double value);
double knob_value(const TransducerParams& p, const std::string& name);
/// Every accepted knob name (without prefix).
std::vector<std::string> knob_names();

enum class GridScale { Linear, Log };

std::vector<double> linear_grid(double lo, double hi, std::size_t n);
std::vector<double> log_grid(double lo, double hi, std::size_t n);

struct SweepAxis {
  std::string name;
  std::vector<double> values;
  GridScale scale = GridScale::Linear;
};

struct SweepSpec {
  std::vector<SweepAxis> axes;  ///< one or two; the last axis varies fastest
  TransducerParams base;
  ConversionOptions options;

  /// Throws InvalidArgument on unknown knobs, empty or non-monotone grids.
  void validate() const;
  std::size_t point_count() const;
};

struct SweepPoint {
  std::vector<double> coordinates;
  bool ok = false;
  EfficiencyResult result;
  std::string error;
};

struct SweepResult {
  std::vector<std::string> axis_names;
  std::vector<std::size_t> shape;
  std::vector<SweepPoint> points;  ///< row-major over the axes

  std::size_t failures() const;
  double success_fraction() const;
};

/// Parameters of grid point `index` (row-major).
TransducerParams sweep_point_params(const SweepSpec& spec, std::size_t index,
                                    std::vector<double>* coordinates = nullptr);

/// Runs every grid point on `threads` workers. Point failures are recorded,
/// never thrown; ordering follows the grid regardless of scheduling.
SweepResult sweep(const SweepSpec& spec, std::size_t threads = 1);

struct NelderMeadOptions {
  double xtol = 1e-10;
  double ftol = 1e-14;
  std::size_t max_iterations = 2000;
  std::size_t max_evaluations = 5000;
  /// Per-coordinate initial simplex offsets; empty means 5% of |x0_i|
  /// (0.00025 for zero coordinates).
  std::vector<double> initial_step;
};

struct SimplexRecord {
  std::size_t iteration = 0;
  std::string operation;
  std::vector<double> best;
  double f_best = 0.0;
  double diameter = 0.0;
};

struct NelderMeadResult {
  std::vector<double> x_best;
  double f_best = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
  std::string reason;
  std::vector<SimplexRecord> trace;
};

using Objective = std::function<double(const std::vector<double>&)>;

/// Minimizes `f` with reflection 1, expansion 2, contraction 0.5, shrink 0.5.
NelderMeadResult nelder_mead(const Objective& f, const std::vector<double>& x0,
                             const NelderMeadOptions& options = {});

enum class OptimizeObjective {
  Asymptotic,  ///< Laplace-domain eta_pop, cheap
  Simulation   ///< full time-domain run_conversion
};

struct OptimizeSpec {
  std::vector<std::string> knobs;
  TransducerParams base;
  ConversionOptions options;
  OptimizeObjective objective = OptimizeObjective::Asymptotic;
  NelderMeadOptions nelder_mead{};
  bool verify = true;  ///< rerun baseline and optimum with run_conversion
};

struct OptimizeResult {
  NelderMeadResult search;  ///< in units of the starting knob values
  std::vector<double> knob_values;
  TransducerParams best;
  double objective_baseline = 0.0;
  double objective_best = 0.0;
  bool verified = false;
  EfficiencyResult baseline_result;
  EfficiencyResult best_result;
};

/// Maximizes eta_pop over the given knobs starting from the base point.
/// Knobs are scaled by their starting values, which must be nonzero.
OptimizeResult optimize(const OptimizeSpec& spec);

}  // namespace transduce
