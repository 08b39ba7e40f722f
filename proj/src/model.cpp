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

#include "transduce/model.hpp"

#include <cmath>
#include <string>

#include "transduce/errors.hpp"

namespace transduce {

namespace {

void require_rate(const char* name, double value) {
  if (!std::isfinite(value) || value < 0.0) {
    throw InvalidArgument(std::string("TransducerParams: ") + name +
                          " must be finite and non-negative, got " + std::to_string(value));
  }
}

}  // namespace

void TransducerParams::validate() const {
  require_rate("omega_mw", omega_mw);
  require_rate("omega_m", omega_m);
  require_rate("delta_e", delta_e);
  require_rate("delta_opt", delta_opt);
  require_rate("omega_rabi", omega_rabi);
  require_rate("g_mw_m", g_mw_m);
  require_rate("g_m_e", g_m_e);
  require_rate("g_e_opt", g_e_opt);
  require_rate("gamma_mw", gamma_mw);
  require_rate("gamma_m", gamma_m);
  require_rate("gamma_e", gamma_e);
  require_rate("gamma_opt", gamma_opt);
  require_rate("gamma_wg", gamma_wg);
  require_rate("gamma_dephasing", gamma_dephasing);
  require_rate("omega_opt", omega_opt);
  if (!(omega_m > 0.0)) {
    throw InvalidArgument("TransducerParams: omega_m must be positive");
  }
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()) || std::norm(alpha) >= 0.25) {
    throw InvalidArgument("TransducerParams: |alpha|^2 must be below 0.25 for the weak coherent "
                          "truncation, got alpha = (" +
                          std::to_string(alpha.real()) + ", " + std::to_string(alpha.imag()) + ")");
  }
  for (std::size_t k = 0; k < kSubsystemCount; ++k) {
    if (dims[k] < 2) {
      throw InvalidArgument("TransducerParams: every truncation must be at least 2");
    }
  }
  if (dims[2] != 2) {
    throw InvalidArgument("TransducerParams: electron truncation must be 2");
  }
}

const char* channel_label(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::MicrowaveDecay: return "microwave-decay";
    case ChannelKind::PhononDecay: return "phonon-decay";
    case ChannelKind::ElectronDecay: return "electron-decay";
    case ChannelKind::OpticalDecay: return "optical-decay";
    case ChannelKind::ElectronDephasing: return "electron-dephasing";
  }
  return "unknown";
}

double quality_to_rate(double omega, double q) {
  if (!(omega > 0.0) || !(q > 0.0)) {
    throw InvalidArgument("quality_to_rate: frequency and quality factor must be positive");
  }
  return omega / q;
}

TransducerParams default_params() {
  TransducerParams p;
  p.omega_mw = kTwoPi * 12.5e9;
  p.omega_m = kTwoPi * 12.5e9;
  p.delta_e = p.omega_m;
  p.delta_opt = kTwoPi * 12.5e9;
  p.omega_rabi = kTwoPi * 5e9;
  p.g_mw_m = kTwoPi * 0.3e6;
  p.g_m_e = kTwoPi * 16.4e6;
  p.g_e_opt = kTwoPi * 1e9;
  p.gamma_mw = quality_to_rate(p.omega_mw, 1e5);
  p.gamma_m = quality_to_rate(p.omega_m, 22000.0);
  p.gamma_e = kTwoPi * 10e6;
  p.omega_opt = kTwoPi * 470e12;
  p.gamma_opt = quality_to_rate(p.omega_opt, 12000.0);
  p.gamma_wg = p.gamma_opt;
  p.gamma_dephasing = 0.0;
  p.alpha = Complex(0.1, 0.0);
  return p;
}

std::array<Operator, kSubsystemCount> number_operators(const HilbertLayout& layout) {
  return {embed(number(layout.dim(0)), Subsystem::Microwave, layout),
          embed(number(layout.dim(1)), Subsystem::Mechanical, layout),
          embed(number(2), Subsystem::Electron, layout),
          embed(number(layout.dim(3)), Subsystem::Optical, layout)};
}

Operator optical_annihilation(const HilbertLayout& layout) {
  return embed(destroy(layout.dim(3)), Subsystem::Optical, layout);
}

Operator build_hamiltonian(const TransducerParams& p) {
  p.validate();
  const HilbertLayout layout = p.layout();
  const Operator a = embed(destroy(layout.dim(0)), Subsystem::Microwave, layout);
  const Operator b = embed(destroy(layout.dim(1)), Subsystem::Mechanical, layout);
  const Operator sm = embed(sigma_minus(), Subsystem::Electron, layout);
  const Operator c = embed(destroy(layout.dim(3)), Subsystem::Optical, layout);
  const Operator ad = a.adjoint();
  const Operator bd = b.adjoint();
  const Operator sp = sm.adjoint();
  const Operator cd = c.adjoint();
  const Operator one = identity(layout);

  Operator h = p.omega_mw * (ad * a);
  h += p.omega_m * (bd * b);
  h += p.delta_e * (sp * sm);
  h += p.delta_opt * (cd * c);

  h += p.g_mw_m * (ad * b + a * bd);

  const double phonon_electron = p.omega_rabi * p.g_m_e / (2.0 * p.omega_m);
  h += phonon_electron * ((bd - b) * sp + (b - bd) * sm);

  const double sideband = p.g_m_e / p.omega_m;
  h += p.g_e_opt * ((one + sideband * (bd - b)) * sp * c + (one + sideband * (b - bd)) * sm * cd);
  return h;
}

std::vector<CollapseChannel> build_collapse_channels(const TransducerParams& p) {
  p.validate();
  const HilbertLayout layout = p.layout();
  const Operator sm = embed(sigma_minus(), Subsystem::Electron, layout);
  std::vector<CollapseChannel> channels;
  channels.push_back({embed(destroy(layout.dim(0)), Subsystem::Microwave, layout), p.gamma_mw,
                      ChannelKind::MicrowaveDecay});
  channels.push_back({embed(destroy(layout.dim(1)), Subsystem::Mechanical, layout), p.gamma_m,
                      ChannelKind::PhononDecay});
  channels.push_back({sm, p.gamma_e, ChannelKind::ElectronDecay});
  channels.push_back({optical_annihilation(layout), p.gamma_tot(), ChannelKind::OpticalDecay});
  channels.push_back({sm.adjoint() * sm, p.gamma_dephasing, ChannelKind::ElectronDephasing});
  return channels;
}

DensityMatrix initial_state(const TransducerParams& p) {
  p.validate();
  return initial_state(p, p.alpha);
}

DensityMatrix initial_state(const TransducerParams& p, Complex alpha) {
  if (std::norm(alpha) >= 0.25) {
    throw InvalidArgument("initial_state: |alpha|^2 must be below 0.25");
  }
  const HilbertLayout layout = p.layout();
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
  psi(static_cast<Eigen::Index>(layout.index_of({0, 0, 0, 0}))) = 1.0;
  psi(static_cast<Eigen::Index>(layout.index_of({1, 0, 0, 0}))) = alpha;
  return DensityMatrix::pure(layout, psi);
}

DensityMatrix ground_state(const TransducerParams& p) {
  return DensityMatrix::basis_state(p.layout(), {0, 0, 0, 0});
}

bool check_modulation_window(double omega_opt, double gamma_opt, double omega_d, double omega_m) {
  if (!(gamma_opt > 0.0)) {
    throw InvalidArgument("check_modulation_window: gamma_opt must be positive");
  }
  const double lo = omega_opt - 0.5 * gamma_opt;
  const double hi = omega_opt + 0.5 * gamma_opt;
  const auto inside = [&](double w) { return w > lo && w < hi; };
  return inside(omega_d) && inside(omega_d + omega_m);
}

}  // namespace transduce
