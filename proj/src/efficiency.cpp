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

#include "transduce/efficiency.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "transduce/errors.hpp"

namespace transduce {

namespace {

double initial_occupation(const Trajectory& traj) {
  const double n0 = traj.series("p_mw").at(0).real();
  if (!(n0 > 0.0)) {
    throw UndefinedEfficiency("efficiency undefined: initial microwave occupation is zero "
                              "(alpha = 0)");
  }
  return n0;
}

double relative_shift(double a, double b) {
  const double diff = std::abs(a - b);
  if (diff == 0.0) return 0.0;
  return diff / std::max(std::abs(a), 1e-300);
}

// Below this both values are solver noise (the resolvent solve leaves ~1e-10
// when the true flux is zero), and a relative shift means nothing.
constexpr double kNegligibleEfficiency = 1e-9;

bool agrees(double a, double b, double rel_tol) {
  return relative_shift(a, b) < rel_tol || std::abs(a - b) < kNegligibleEfficiency;
}

}  // namespace

double eta_pop(const Trajectory& traj, const TransducerParams& p) {
  if (traj.occupation_integral.empty()) {
    throw InvalidArgument("eta_pop: trajectory carries no occupation integral");
  }
  return p.gamma_wg * traj.occupation_integral.back() / initial_occupation(traj);
}

double eta_pop(const Trajectory& signal, const Trajectory& reference, const TransducerParams& p) {
  if (signal.occupation_integral.empty() ||
      signal.occupation_integral.size() != reference.occupation_integral.size()) {
    throw InvalidArgument("eta_pop: signal and reference trajectories do not match");
  }
  const double flux = signal.occupation_integral.back() - reference.occupation_integral.back();
  return p.gamma_wg * flux / initial_occupation(signal);
}

double eta_coh(const Trajectory& traj, const TransducerParams& p) {
  if (traj.amplitude_integral.empty()) {
    throw InvalidArgument("eta_coh: trajectory carries no amplitude integral");
  }
  const double a0 = std::norm(traj.series("a_mw").at(0));
  if (!(a0 > 0.0)) {
    throw UndefinedEfficiency("efficiency undefined: initial microwave amplitude is zero "
                              "(alpha = 0)");
  }
  return p.gamma_wg * traj.amplitude_integral.back() / a0;
}

double eta_pop_asymptotic(const TransducerParams& p) {
  if (std::norm(p.alpha) == 0.0) {
    throw UndefinedEfficiency("efficiency undefined: alpha = 0");
  }
  const ResponseIntegral response = response_integral(p, p.alpha);
  const HilbertLayout layout = p.layout();
  const auto numbers = number_operators(layout);
  const double flux = (response.integral.transpose().cwiseProduct(numbers[3].matrix())).sum().real();
  const double n0 = std::norm(p.alpha) / (1.0 + std::norm(p.alpha));
  return p.gamma_wg * flux / n0;
}

std::array<std::size_t, kSubsystemCount> enlarged_dims(
    const std::array<std::size_t, kSubsystemCount>& dims) {
  auto out = dims;
  for (std::size_t k = 0; k < kSubsystemCount; ++k) {
    if (k == static_cast<std::size_t>(Subsystem::Electron)) continue;
    out[k] = 2 * dims[k];
  }
  return out;
}

EfficiencyResult efficiencies(const ConvergedRun& run, const TransducerParams& p,
                              std::size_t signal) {
  const Trajectory& traj = run.signals.at(signal);
  EfficiencyResult r;
  r.n0 = initial_occupation(traj);
  r.coherence0 = std::norm(traj.series("a_mw").at(0));
  r.eta_pop = eta_pop(traj, run.reference, p);
  r.eta_pop_raw = eta_pop(traj, p);
  r.eta_coh = eta_coh(traj, p);
  r.t_f = run.status.t_f;
  r.convergence = run.status;
  r.engine = run.engine;
  r.worst = traj.worst_diagnostics();
  return r;
}

EfficiencyResult run_conversion(const TransducerParams& p, const ConversionOptions& options,
                                ConvergedRun* run_out) {
  p.validate();
  if (std::norm(p.alpha) == 0.0) {
    throw UndefinedEfficiency("efficiency undefined: alpha = 0 gives zero initial microwave "
                              "occupation");
  }
  ConvergedRun run = run_until_converged(p, options.run);
  EfficiencyResult r = efficiencies(run, p);

  if (options.check_truncation) {
    r.truncation_checked = true;
    r.eta_pop_asymptotic = eta_pop_asymptotic(p);
    TransducerParams bigger = p;
    bigger.dims = enlarged_dims(p.dims);
    r.truncation_dims = bigger.dims;
    r.eta_pop_asymptotic_enlarged = eta_pop_asymptotic(bigger);
    r.truncation_shift = relative_shift(r.eta_pop_asymptotic, r.eta_pop_asymptotic_enlarged);
    r.truncation_ok = agrees(r.eta_pop_asymptotic, r.eta_pop_asymptotic_enlarged,
                             options.truncation_tol);
  }

  if (options.check_sampling) {
    r.sampling_checked = true;
    ConvergenceOptions fine = options.run;
    fine.dt_sample *= 0.5;
    fine.diagnostics = false;
    fine.extra_alphas.clear();
    const ConvergedRun half = run_until_converged(p, fine);
    r.eta_pop_half_dt = eta_pop(half.signals[0], half.reference, p);
    r.eta_coh_half_dt = eta_coh(half.signals[0], p);
    r.sampling_shift_pop = relative_shift(r.eta_pop, r.eta_pop_half_dt);
    r.sampling_shift_coh = relative_shift(r.eta_coh, r.eta_coh_half_dt);
    r.sampling_ok = agrees(r.eta_pop, r.eta_pop_half_dt, options.sampling_tol) &&
                    agrees(r.eta_coh, r.eta_coh_half_dt, options.sampling_tol);
  }

  if (run_out != nullptr) *run_out = std::move(run);
  return r;
}

}  // namespace transduce
