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

// Post-processing of exported cavity field grids.
//
// Samples sit at cell centers of a uniform rectilinear grid. Volume integrals
// use the midpoint rule (sum of sample times cell volume) and every max() is
// taken over the same samples, so ratios such as mode volumes are consistent.
//
// Voigt order is (xx, yy, zz, yz, xz, xy). Strain vectors store engineering
// shear components (gamma_ij = 2 eps_ij); stress vectors store plain
// components, so sigma : T reduces to a plain six-term dot product.

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace transduce {

using Vector3c = Eigen::Vector3cd;
using Vector6c = Eigen::Matrix<std::complex<double>, 6, 1>;
using PiezoTensor = Eigen::Matrix<double, 3, 6>;

inline constexpr double kHbar = 1.054571817e-34;
/// Strain susceptibility of the electron transition, rad/s per unit strain.
inline constexpr double kDefaultChi = -6.283185307179586476925286766559 * 0.85e15;

struct FieldGrid {
  std::array<std::size_t, 3> shape{0, 0, 0};
  std::array<double, 3> spacing{0.0, 0.0, 0.0};
  std::array<double, 3> origin{0.0, 0.0, 0.0};  ///< position of sample (0, 0, 0)

  std::vector<Vector3c> displacement;  ///< m
  std::vector<Vector6c> stress;        ///< Pa
  std::vector<Vector6c> strain;        ///< dimensionless, engineering shear
  std::vector<Vector3c> efield;        ///< V/m
  std::vector<double> permittivity;    ///< F/m
  std::vector<double> density;         ///< kg/m^3

  double omega_m = 0.0;     ///< rad/s
  double youngs = 0.0;      ///< Pa
  double poisson = 0.0;
  double wavelength = 0.0;  ///< optical vacuum wavelength, m
  double n_refr = 0.0;
  std::optional<double> rho_ref;  ///< material density for wavelengths; default max sample

  /// Allocates every field with zeros.
  static FieldGrid zeros(const std::array<std::size_t, 3>& shape,
                         const std::array<double, 3>& spacing);

  std::size_t size() const noexcept { return shape[0] * shape[1] * shape[2]; }
  /// z varies fastest.
  std::size_t index(std::size_t ix, std::size_t iy, std::size_t iz) const noexcept {
    return (ix * shape[1] + iy) * shape[2] + iz;
  }
  std::array<double, 3> position(std::size_t index) const;
  double cell_volume() const noexcept { return spacing[0] * spacing[1] * spacing[2]; }
  double reference_density() const;

  /// Shape, spacing and physical-sign checks; throws InvalidArgument.
  void validate() const;
};

struct CrystalFrame {
  double phi = 0.0;  ///< rotation about z, radians

  explicit CrystalFrame(double angle = 0.0);
  /// Rotation matrix of the frame.
  Eigen::Matrix3d rotation() const;
};

/// h = (1/4) [Re(sigma : conj(T)) + rho omega_m^2 |u|^2], J/m^3.
std::vector<double> energy_density(const FieldGrid& grid);

struct AcousticWavelengths {
  double longitudinal = 0.0;  ///< Lambda_p
  double shear = 0.0;         ///< Lambda_s
};

AcousticWavelengths acoustic_wavelengths(double youngs, double poisson, double rho,
                                         double omega_m);

struct MechanicalVolume {
  double volume = 0.0;                ///< m^3
  std::optional<double> in_lambda_p3;  ///< volume / Lambda_p^3, when E is known
  std::optional<double> in_lambda_s3;
  std::optional<AcousticWavelengths> wavelengths;
};

/// Integral of h over max(h).
MechanicalVolume mech_mode_volume(const FieldGrid& grid);

struct OpticalVolume {
  double volume = 0.0;                  ///< m^3
  std::optional<double> in_lambda_n3;  ///< volume / (lambda / n)^3, when both are known
  std::size_t argmax = 0;
};

/// Integral of eps |e|^2 over eps(r_max) max |e|^2.
OpticalVolume opt_mode_volume(const FieldGrid& grid);

/// Integral of rho |u|^2 over max |u|^2, kg.
double effective_mass(const FieldGrid& grid);
/// sqrt(hbar / (2 m omega)), m.
double x_zpf(double m_eff, double omega_m);

/// Engineering-shear Voigt strain to the symmetric 3x3 tensor and back.
Eigen::Matrix3cd strain_tensor(const Vector6c& t);
Vector6c strain_voigt(const Eigen::Matrix3cd& tensor);

/// R T R^T with T converted to a tensor and back (engineering shear kept).
Vector6c rotate_strain(const Vector6c& t, const CrystalFrame& frame);

struct CouplingMap {
  std::vector<std::complex<double>> values;  ///< rad/s per sample
  double max_abs = 0.0;                      ///< rad/s
  std::size_t argmax = 0;
};

/// chi (t_xx - t_yy) / max|u| * x_zpf on the rotated strain.
CouplingMap g_m_e_map(const FieldGrid& grid, double chi, const CrystalFrame& frame, double zpf);

struct ProfileSample {
  double coordinate = 0.0;  ///< position along the line, m
  std::complex<double> value;
};

/// Values along grid axis `axis` (0, 1, 2) through the sample at `through`.
std::vector<ProfileSample> line_profile(const FieldGrid& grid,
                                        const std::vector<std::complex<double>>& values,
                                        std::size_t axis, std::size_t through);

/// (1 / 2 hbar) integral of (T^dagger D^T e + e^dagger D T), rad/s. Inputs
/// must already be zero-point normalized. The imaginary part is returned for
/// inspection and vanishes up to rounding.
std::complex<double> piezo_coupling(const FieldGrid& grid, const PiezoTensor& d);

/// Wurtzite AlN with the c axis along z: e31 = -0.58, e33 = 1.55, e15 = -0.48 C/m^2.
PiezoTensor aln_piezo_tensor();

FieldGrid load_grid(const std::string& path);
void save_grid(const FieldGrid& grid, const std::string& path);

}  // namespace transduce
