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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "transduce/errors.hpp"
#include "transduce/fields.hpp"

namespace {

using namespace transduce;
using C = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Cubic grid of n cells over [center - half, center + half) per axis.
FieldGrid cube(std::size_t n, double half, double center = 0.0) {
  const double h = 2.0 * half / double(n);
  FieldGrid g = FieldGrid::zeros({n, n, n}, {h, h, h});
  g.origin = {center - half + 0.5 * h, center - half + 0.5 * h, center - half + 0.5 * h};
  g.omega_m = kTwoPi * 12.5e9;
  return g;
}

// Mechanical and optical Gaussians with std s centered at c in every axis.
void fill_gaussian(FieldGrid& g, double s, double c) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto r = g.position(i);
    double r2 = 0.0;
    for (double x : r) r2 += (x - c) * (x - c);
    g.displacement[i] = Vector3c(std::exp(-r2 / (4 * s * s)), 0.0, 0.0);
    g.efield[i] = Vector3c(0.0, std::exp(-r2 / (4 * s * s)), 0.0);
    g.permittivity[i] = 8.854e-12;
    g.density[i] = 3255.0;
  }
}

double gaussian_volume(double s) { return std::pow(2.0 * kPi, 1.5) * s * s * s; }

TEST(Fields, EnergyDensityKineticOnly) {
  FieldGrid g = cube(2, 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.displacement[i] = Vector3c(C(0.0, 2e-12), 0.0, 0.0);
    g.density[i] = 2000.0;
  }
  const double expect = 2000.0 * g.omega_m * g.omega_m * 4e-24 / 4.0;
  for (double h : energy_density(g)) EXPECT_NEAR(h, expect, 1e-12 * expect);
  for (auto& u : g.displacement) u *= 2.0;
  for (double h : energy_density(g)) EXPECT_NEAR(h, 4.0 * expect, 4e-12 * expect);
}

TEST(Fields, EnergyDensityUniaxialStress) {
  FieldGrid g = cube(2, 1.0);
  const double e = 300e9;
  const double t1 = 1e-4;
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.strain[i](0) = t1;
    g.stress[i](0) = e * t1;
  }
  for (double h : energy_density(g)) EXPECT_NEAR(h, e * t1 * t1 / 4.0, 1e-9);
}

TEST(Fields, UniformBoxVolumes) {
  FieldGrid g = cube(4, 1e-6);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.displacement[i] = Vector3c(1e-12, 0.0, 0.0);
    g.efield[i] = Vector3c(0.0, 0.0, 5.0);
    g.permittivity[i] = 1e-11;
    g.density[i] = 3000.0;
  }
  const double v0 = 8e-18;
  EXPECT_NEAR(mech_mode_volume(g).volume, v0, 1e-12 * v0);
  EXPECT_NEAR(opt_mode_volume(g).volume, v0, 1e-12 * v0);
  EXPECT_NEAR(effective_mass(g), 3000.0 * v0, 1e-12 * 3000.0 * v0);
  // Mass is invariant under field rescaling.
  for (auto& u : g.displacement) u *= C(0.0, -7.0);
  EXPECT_NEAR(effective_mass(g), 3000.0 * v0, 1e-12 * 3000.0 * v0);
}

TEST(Fields, GaussianVolumesOnSampledPeak) {
  const double s = 1e-6;
  const std::size_t n = 64;
  const double half = 6.0 * s;
  // Shift by half a cell so that one sample sits exactly on the peak.
  FieldGrid g = cube(n, half, 0.5 * 2.0 * half / double(n));
  fill_gaussian(g, s, 0.0);
  const double v = gaussian_volume(s);
  EXPECT_NEAR(mech_mode_volume(g).volume, v, 0.005 * v);
  EXPECT_NEAR(opt_mode_volume(g).volume, v, 0.005 * v);
}

TEST(Fields, GaussianVolumesBetweenSamplesConverge) {
  // Peak on a cell corner: the sampled maximum misses the peak by half a
  // cell in every axis, the worst alignment.
  const double s = 1e-6;
  const double v = gaussian_volume(s);
  double err_prev = 0.0;
  for (std::size_t n : {32, 64, 128}) {
    FieldGrid g = cube(n, 3.5 * s);
    fill_gaussian(g, s, 0.0);
    const double mech = std::abs(mech_mode_volume(g).volume - v) / v;
    const double opt = std::abs(opt_mode_volume(g).volume - v) / v;
    EXPECT_NEAR(mech, opt, 1e-12);
    if (n == 64) {
      EXPECT_LT(mech, 0.005);
    }
    if (err_prev > 0.0) {
      EXPECT_GE(err_prev / mech, 3.0) << n;
    }
    err_prev = mech;
  }
}

TEST(Fields, ZeroPointFluctuation) {
  EXPECT_NEAR(x_zpf(1e-18, kTwoPi * 12.5e9), 2.5910640094058014e-14, 1e-26);
  EXPECT_THROW(x_zpf(0.0, 1.0), InvalidArgument);
}

TEST(Fields, AcousticWavelengths) {
  const double e = 345e9;
  const double rho = 3255.0;
  const double w = kTwoPi * 12.5e9;
  EXPECT_NEAR(acoustic_wavelengths(e, 0.0, rho, w).longitudinal,
              kTwoPi * std::sqrt(e / rho) / w, 1e-18);
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> nu(0.0, 0.49);
  for (int k = 0; k < 20; ++k) {
    const double v = nu(gen);
    const auto a = acoustic_wavelengths(e * (1 + k), v, rho / (1 + k), w * (2 + k));
    EXPECT_NEAR(a.longitudinal / a.shear, std::sqrt(2 * (1 - v) / (1 - 2 * v)), 1e-12);
  }
  // Incompressible limit: the ratio grows like 1 / sqrt(1 - 2 nu).
  const double at03 = acoustic_wavelengths(e, 0.3, rho, w).longitudinal;
  EXPECT_NEAR(acoustic_wavelengths(e, 0.49, rho, w).longitudinal / at03,
              std::sqrt((0.51 / (1.49 * 0.02)) / (0.7 / (1.3 * 0.4))), 1e-12);
  EXPECT_GT(acoustic_wavelengths(e, 0.499, rho, w).longitudinal, 5.0 * at03);
  EXPECT_GT(acoustic_wavelengths(e, 0.49999, rho, w).longitudinal, 50.0 * at03);
  EXPECT_THROW(acoustic_wavelengths(e, 0.5, rho, w), InvalidArgument);
}

Vector6c random_strain(std::mt19937& gen) {
  std::normal_distribution<double> g;
  Vector6c t;
  for (int k = 0; k < 6; ++k) t(k) = C(g(gen), g(gen));
  return t;
}

TEST(Fields, RotateStrain) {
  std::mt19937 gen(17);
  for (int k = 0; k < 10; ++k) {
    const Vector6c t = random_strain(gen);
    EXPECT_LT((rotate_strain(t, CrystalFrame(0.0)) - t).norm(), 1e-15);
    EXPECT_LT((strain_voigt(strain_tensor(t)) - t).norm(), 1e-15);
    const Eigen::Matrix3cd m = strain_tensor(t);
    for (double phi : {0.3, 1.1, 2.5, 4.0}) {
      const Eigen::Matrix3cd r = strain_tensor(rotate_strain(t, CrystalFrame(phi)));
      EXPECT_NEAR(std::abs(r.trace() - m.trace()), 0.0, 1e-12);
      EXPECT_NEAR(r.norm(), m.norm(), 1e-12 * m.norm());
    }
    const Vector6c q = rotate_strain(t, CrystalFrame(kPi / 2));
    EXPECT_NEAR(std::abs((q(0) - q(1)) + (t(0) - t(1))), 0.0, 1e-12);
  }
  Vector6c shear = Vector6c::Zero();
  shear(5) = 2.0 * 0.01;  // engineering gamma_xy for eps_xy = 0.01
  const Vector6c r = rotate_strain(shear, CrystalFrame(kPi / 4));
  EXPECT_NEAR(std::abs(r(0) - r(1)), 2.0 * 0.01, 1e-15);
}

TEST(Fields, CouplingMapFourfold) {
  FieldGrid g = cube(4, 1e-6);
  std::mt19937 gen(23);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.strain[i] = random_strain(gen);
    g.displacement[i] = Vector3c(C(double(i % 5) + 1.0, 0.5), 0.0, 0.0);
  }
  for (double phi : {0.0, 0.4, 1.3}) {
    const auto a = g_m_e_map(g, kDefaultChi, CrystalFrame(phi), 1e-14);
    const auto b = g_m_e_map(g, kDefaultChi, CrystalFrame(phi + kPi / 2), 1e-14);
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_NEAR(std::abs(a.values[i]), std::abs(b.values[i]), 1e-9 * std::abs(a.values[i]));
    }
  }
}

TEST(Fields, CouplingMapUniformUniaxial) {
  FieldGrid g = cube(3, 1e-6);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.strain[i](0) = 1e-5;
    g.displacement[i] = Vector3c(0.0, 0.0, 1.0);
  }
  const double zpf = 3e-15;
  const auto m = g_m_e_map(g, kDefaultChi, CrystalFrame(0.0), zpf);
  for (const auto& v : m.values) EXPECT_NEAR(std::abs(v), std::abs(kDefaultChi) * 1e-5 * zpf, 1e-12);
  EXPECT_NEAR(m.max_abs, std::abs(kDefaultChi) * 1e-5 * zpf, 1e-12);
  const auto prof = line_profile(g, m.values, 2, g.index(1, 1, 0));
  ASSERT_EQ(prof.size(), 3u);
  EXPECT_NEAR(prof[1].coordinate - prof[0].coordinate, g.spacing[2], 1e-20);
}

TEST(Fields, PiezoCoupling) {
  FieldGrid g = cube(4, 1e-6);
  const PiezoTensor d = aln_piezo_tensor();
  EXPECT_DOUBLE_EQ(d(2, 2), 1.55);
  EXPECT_DOUBLE_EQ(d(2, 0), -0.58);
  EXPECT_DOUBLE_EQ(d(0, 4), -0.48);
  std::mt19937 gen(31);
  std::normal_distribution<double> n;
  for (std::size_t i = 0; i < g.size(); ++i) g.strain[i] = random_strain(gen) * 1e-8;
  EXPECT_EQ(piezo_coupling(g, d), C(0.0));
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.efield[i] = Vector3c(C(n(gen), n(gen)), C(n(gen), n(gen)), C(n(gen), n(gen))) * 1e3;
  }
  const C k = piezo_coupling(g, d);
  EXPECT_GT(std::abs(k.real()), 0.0);
  EXPECT_LT(std::abs(k.imag()), 1e-9 * std::abs(k.real()));
  FieldGrid conj = g;
  for (std::size_t i = 0; i < g.size(); ++i) {
    conj.strain[i] = g.strain[i].conjugate();
    conj.efield[i] = g.efield[i].conjugate();
  }
  EXPECT_NEAR(std::abs(piezo_coupling(conj, d) - k), 0.0, 1e-12 * std::abs(k));
}

TEST(Fields, GridRoundTrip) {
  FieldGrid g = cube(3, 2e-6);
  g.origin = {1e-7, -2e-7, 3e-7};
  std::mt19937 gen(41);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.strain[i] = random_strain(gen);
    g.stress[i] = random_strain(gen) * 1e9;
    g.displacement[i] = Vector3c(C(1e-12 * double(i), 2e-13), 0.0, C(0.0, -1e-12));
    g.efield[i] = Vector3c(1.0, C(0.0, 2.0), 3.0);
    g.permittivity[i] = 9e-11;
    g.density[i] = 3255.0;
  }
  g.youngs = 345e9;
  g.poisson = 0.24;
  g.wavelength = 637e-9;
  g.n_refr = 2.4;
  g.rho_ref = 3300.0;
  const auto path = std::filesystem::temp_directory_path() / "transduce_grid_roundtrip.txt";
  save_grid(g, path.string());
  const FieldGrid r = load_grid(path.string());
  EXPECT_EQ(r.shape, g.shape);
  EXPECT_EQ(r.origin, g.origin);
  EXPECT_EQ(r.spacing, g.spacing);
  EXPECT_EQ(*r.rho_ref, 3300.0);
  EXPECT_EQ(r.omega_m, g.omega_m);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(r.strain[i], g.strain[i]);
    EXPECT_EQ(r.stress[i], g.stress[i]);
    EXPECT_EQ(r.displacement[i], g.displacement[i]);
    EXPECT_EQ(r.efield[i], g.efield[i]);
  }
  std::filesystem::remove(path);
}

TEST(Fields, GridParseErrorsCarryLine) {
  const auto path = std::filesystem::temp_directory_path() / "transduce_grid_bad.txt";
  {
    std::ofstream out(path);
    out << "# comment\n#shape 1 1 1\n#spacing 1 1 1\n#voigt engineering\n1 2 3\n";
  }
  try {
    load_grid(path.string());
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos) << e.what();
  }
  {
    std::ofstream out(path);
    out << "#shape 1 1 1\n#colour blue\n";
  }
  EXPECT_THROW(load_grid(path.string()), ParseError);
  std::filesystem::remove(path);
}

}  // namespace
