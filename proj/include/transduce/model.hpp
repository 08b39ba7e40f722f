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

// Transducer model: Hamiltonian, dissipation channels and initial states.
//
// Every quantity in TransducerParams is angular (rad/s). Hz-level inputs are
// converted once, at the configuration boundary.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "transduce/density_matrix.hpp"
#include "transduce/operators.hpp"

namespace transduce {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct TransducerParams {
  double omega_mw = 0.0;    ///< microwave cavity frequency
  double omega_m = 0.0;     ///< mechanical mode frequency
  double delta_e = 0.0;     ///< electron detuning in the drive frame
  double delta_opt = 0.0;   ///< optical cavity detuning in the drive frame
  double omega_rabi = 0.0;  ///< drive Rabi frequency
  double g_mw_m = 0.0;      ///< piezoelectric photon-phonon coupling
  double g_m_e = 0.0;       ///< strain coupling of phonon to electron
  double g_e_opt = 0.0;     ///< electron-optical cavity coupling
  double gamma_mw = 0.0;
  double gamma_m = 0.0;
  double gamma_e = 0.0;
  double gamma_opt = 0.0;        ///< internal optical loss
  double gamma_wg = 0.0;         ///< waveguide extraction
  double gamma_dephasing = 0.0;  ///< pure dephasing, 1/T2*
  Complex alpha{0.1, 0.0};       ///< weak coherent microwave amplitude
  double omega_opt = 0.0;        ///< absolute optical frequency (for Q_opt and the window check)
  std::array<std::size_t, kSubsystemCount> dims{3, 4, 2, 3};

  double gamma_tot() const noexcept { return gamma_wg + gamma_opt; }
  HilbertLayout layout() const { return HilbertLayout::transducer(dims); }
  /// Throws InvalidArgument naming the first offending field.
  void validate() const;
};

enum class ChannelKind { MicrowaveDecay, PhononDecay, ElectronDecay, OpticalDecay, ElectronDephasing };

const char* channel_label(ChannelKind kind);

struct CollapseChannel {
  Operator op;
  double rate = 0.0;
  ChannelKind kind = ChannelKind::MicrowaveDecay;
};

/// Baseline device: 12.5 GHz microwave/mechanics, 470 THz optics, Q_opt 12000
/// at critical coupling, no pure dephasing, alpha = 0.1, dims (3, 4, 2, 3).
TransducerParams default_params();

/// omega / Q.
double quality_to_rate(double omega, double q);

/// H / hbar in rad/s.
Operator build_hamiltonian(const TransducerParams& p);

/// Channels in the order microwave, phonon, electron, optical, dephasing.
/// The optical channel carries gamma_wg + gamma_opt. The dephasing channel is
/// always present, possibly with rate zero.
std::vector<CollapseChannel> build_collapse_channels(const TransducerParams& p);

/// Microwave in (|0> + alpha|1>)/sqrt(1 + |alpha|^2), everything else in ground.
DensityMatrix initial_state(const TransducerParams& p);
/// Same state with an explicit amplitude (alpha may be zero).
DensityMatrix initial_state(const TransducerParams& p, Complex alpha);
/// |0, 0, g, 0>.
DensityMatrix ground_state(const TransducerParams& p);

/// True iff omega_d and omega_d + omega_m both lie strictly inside the optical
/// linewidth window (omega_opt - gamma_opt/2, omega_opt + gamma_opt/2).
bool check_modulation_window(double omega_opt, double gamma_opt, double omega_d, double omega_m);

/// Number operators of the four subsystems (sigma+ sigma- for the electron).
std::array<Operator, kSubsystemCount> number_operators(const HilbertLayout& layout);
/// Optical annihilation operator embedded in the composite space.
Operator optical_annihilation(const HilbertLayout& layout);

}  // namespace transduce
