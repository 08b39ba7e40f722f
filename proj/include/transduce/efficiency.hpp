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

// Conversion efficiencies from the optical output flux.
//
// The waveguide field is d_out = -i sqrt(gamma_wg) c_opt with the input
// operator dropped, so the photon flux into the waveguide is
// gamma_wg <c^dagger c>. Summing the flux over all waveguide positions is the
// same as integrating it over emission time because a wave packet emitted at
// time t sits at position r = t_now - t. Efficiencies are that integral
// normalized by the initial microwave occupation (population) or by the
// squared initial microwave amplitude (coherent part, using |<c>|^2).

#include <array>
#include <cstddef>
#include <string>

#include "transduce/evolve.hpp"
#include "transduce/model.hpp"

namespace transduce {

/// gamma_wg * integral <c^dagger c> dt / <a^dagger a>_0, taken literally.
double eta_pop(const Trajectory& traj, const TransducerParams& p);
/// Same with the vacuum background flux removed.
double eta_pop(const Trajectory& signal, const Trajectory& reference, const TransducerParams& p);
/// gamma_wg * integral |<c>|^2 dt / |<a>_0|^2.
double eta_coh(const Trajectory& traj, const TransducerParams& p);

/// Infinite-time population efficiency from the Laplace-domain response.
double eta_pop_asymptotic(const TransducerParams& p);

/// Truncations used by the truncation check: every bosonic mode doubled.
std::array<std::size_t, kSubsystemCount> enlarged_dims(
    const std::array<std::size_t, kSubsystemCount>& dims);

struct ConversionOptions {
  ConvergenceOptions run{};
  bool check_truncation = true;
  bool check_sampling = false;
  double truncation_tol = 1e-3;
  double sampling_tol = 1e-3;
};

struct EfficiencyResult {
  double eta_pop = 0.0;      ///< background-subtracted
  double eta_coh = 0.0;
  double eta_pop_raw = 0.0;  ///< without background subtraction
  double t_f = 0.0;
  double n0 = 0.0;           ///< <a^dagger a>_0
  double coherence0 = 0.0;   ///< |<a>_0|^2
  ConvergenceStatus convergence{};
  std::string engine;
  StateDiagnostics worst{};  ///< over all samples of the signal run

  bool truncation_checked = false;
  std::array<std::size_t, kSubsystemCount> truncation_dims{};
  double eta_pop_asymptotic = 0.0;
  double eta_pop_asymptotic_enlarged = 0.0;
  double truncation_shift = 0.0;  ///< relative
  bool truncation_ok = true;

  bool sampling_checked = false;
  double eta_pop_half_dt = 0.0;
  double eta_coh_half_dt = 0.0;
  double sampling_shift_pop = 0.0;  ///< relative
  double sampling_shift_coh = 0.0;  ///< relative
  bool sampling_ok = true;
};

/// Efficiencies of one converged run (signal index `signal`).
EfficiencyResult efficiencies(const ConvergedRun& run, const TransducerParams& p,
                              std::size_t signal = 0);

/// Model, propagation, efficiencies and the optional convergence checks.
/// When `run_out` is given it receives the trajectories of the main run.
EfficiencyResult run_conversion(const TransducerParams& p, const ConversionOptions& options = {},
                                ConvergedRun* run_out = nullptr);

}  // namespace transduce
