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

#include "transduce/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "transduce/errors.hpp"

namespace transduce {

namespace {

constexpr double kTwoPiF = 6.283185307179586476925286766559;

void require_field(bool present, const char* what) {
  if (!present) throw InvalidArgument(std::string("field grid is missing ") + what);
}

template <typename T>
void require_size(const std::vector<T>& v, std::size_t n, const char* what) {
  require_field(!v.empty(), what);
  if (v.size() != n) {
    throw InvalidArgument(std::string("field grid: ") + what + " has " +
                          std::to_string(v.size()) + " samples, shape needs " +
                          std::to_string(n));
  }
}

}  // namespace

FieldGrid FieldGrid::zeros(const std::array<std::size_t, 3>& shape,
                           const std::array<double, 3>& spacing) {
  FieldGrid g;
  g.shape = shape;
  g.spacing = spacing;
  const std::size_t n = g.size();
  g.displacement.assign(n, Vector3c::Zero());
  g.stress.assign(n, Vector6c::Zero());
  g.strain.assign(n, Vector6c::Zero());
  g.efield.assign(n, Vector3c::Zero());
  g.permittivity.assign(n, 0.0);
  g.density.assign(n, 0.0);
  return g;
}

std::array<double, 3> FieldGrid::position(std::size_t index) const {
  const std::size_t iz = index % shape[2];
  const std::size_t iy = (index / shape[2]) % shape[1];
  const std::size_t ix = index / (shape[2] * shape[1]);
  return {origin[0] + static_cast<double>(ix) * spacing[0],
          origin[1] + static_cast<double>(iy) * spacing[1],
          origin[2] + static_cast<double>(iz) * spacing[2]};
}

double FieldGrid::reference_density() const {
  if (rho_ref) return *rho_ref;
  require_field(!density.empty(), "density");
  return *std::max_element(density.begin(), density.end());
}

void FieldGrid::validate() const {
  for (std::size_t k = 0; k < 3; ++k) {
    if (shape[k] == 0) throw InvalidArgument("field grid: shape entries must be positive");
    if (!(spacing[k] > 0.0) || !std::isfinite(spacing[k])) {
      throw InvalidArgument("field grid: spacing must be positive and finite");
    }
  }
  const std::size_t n = size();
  const auto check = [n](std::size_t got, const char* what) {
    if (got != 0 && got != n) {
      throw InvalidArgument(std::string("field grid: ") + what + " does not match the shape");
    }
  };
  check(displacement.size(), "displacement");
  check(stress.size(), "stress");
  check(strain.size(), "strain");
  check(efield.size(), "electric field");
  check(permittivity.size(), "permittivity");
  check(density.size(), "density");
  for (std::size_t i = 0; i < n; ++i) {
    if (!displacement.empty() && !density.empty() && displacement[i].norm() > 0.0 &&
        !(density[i] > 0.0)) {
      throw InvalidArgument("field grid: density must be positive where the displacement is "
                            "nonzero (sample " + std::to_string(i) + ")");
    }
    if (!efield.empty() && !permittivity.empty() && efield[i].norm() > 0.0 &&
        !(permittivity[i] > 0.0)) {
      throw InvalidArgument("field grid: permittivity must be positive where the field is "
                            "nonzero (sample " + std::to_string(i) + ")");
    }
  }
}

CrystalFrame::CrystalFrame(double angle) {
  phi = std::fmod(angle, kTwoPiF);
  if (phi < 0.0) phi += kTwoPiF;
}

Eigen::Matrix3d CrystalFrame::rotation() const {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  Eigen::Matrix3d r;
  r << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return r;
}

std::vector<double> energy_density(const FieldGrid& grid) {
  const std::size_t n = grid.size();
  require_size(grid.stress, n, "stress");
  require_size(grid.strain, n, "strain");
  require_size(grid.displacement, n, "displacement");
  require_size(grid.density, n, "density");
  if (!(grid.omega_m > 0.0)) throw InvalidArgument("energy_density: omega_m must be positive");
  const double w2 = grid.omega_m * grid.omega_m;
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double elastic = grid.stress[i].dot(grid.strain[i]).real();
    // Eigen's dot conjugates its first argument; sigma : conj(T) is the conjugate of that.
    h[i] = 0.25 * (elastic + grid.density[i] * w2 * grid.displacement[i].squaredNorm());
  }
  return h;
}

AcousticWavelengths acoustic_wavelengths(double youngs, double poisson, double rho,
                                         double omega_m) {
  if (!(poisson >= 0.0) || !(poisson < 0.5)) {
    throw InvalidArgument("acoustic_wavelengths: Poisson ratio must lie in [0, 0.5)");
  }
  if (!(youngs > 0.0) || !(rho > 0.0) || !(omega_m > 0.0)) {
    throw InvalidArgument("acoustic_wavelengths: E, rho and omega_m must be positive");
  }
  AcousticWavelengths w;
  w.longitudinal = kTwoPiF *
                   std::sqrt(youngs * (1.0 - poisson) /
                             (rho * (1.0 + poisson) * (1.0 - 2.0 * poisson))) /
                   omega_m;
  w.shear = kTwoPiF * std::sqrt(youngs / (2.0 * rho * (1.0 + poisson))) / omega_m;
  return w;
}

MechanicalVolume mech_mode_volume(const FieldGrid& grid) {
  const std::vector<double> h = energy_density(grid);
  double total = 0.0;
  double peak = 0.0;
  for (double v : h) {
    total += v;
    peak = std::max(peak, v);
  }
  if (!(peak > 0.0)) throw InvalidArgument("mech_mode_volume: energy density vanishes");
  MechanicalVolume out;
  out.volume = total * grid.cell_volume() / peak;
  if (grid.youngs > 0.0) {
    const auto w = acoustic_wavelengths(grid.youngs, grid.poisson, grid.reference_density(),
                                        grid.omega_m);
    out.wavelengths = w;
    out.in_lambda_p3 = out.volume / std::pow(w.longitudinal, 3);
    out.in_lambda_s3 = out.volume / std::pow(w.shear, 3);
  }
  return out;
}

OpticalVolume opt_mode_volume(const FieldGrid& grid) {
  const std::size_t n = grid.size();
  require_size(grid.efield, n, "electric field");
  require_size(grid.permittivity, n, "permittivity");
  double total = 0.0;
  double peak = 0.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e2 = grid.efield[i].squaredNorm();
    total += grid.permittivity[i] * e2;
    if (e2 > peak) {
      peak = e2;
      arg = i;
    }
  }
  if (!(peak > 0.0)) throw InvalidArgument("opt_mode_volume: electric field vanishes");
  OpticalVolume out;
  out.argmax = arg;
  out.volume = total * grid.cell_volume() / (grid.permittivity[arg] * peak);
  if (grid.wavelength > 0.0 && grid.n_refr > 0.0) {
    out.in_lambda_n3 = out.volume / std::pow(grid.wavelength / grid.n_refr, 3);
  }
  return out;
}

double effective_mass(const FieldGrid& grid) {
  const std::size_t n = grid.size();
  require_size(grid.displacement, n, "displacement");
  require_size(grid.density, n, "density");
  double total = 0.0;
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u2 = grid.displacement[i].squaredNorm();
    total += grid.density[i] * u2;
    peak = std::max(peak, u2);
  }
  if (!(peak > 0.0)) throw InvalidArgument("effective_mass: displacement vanishes");
  return total * grid.cell_volume() / peak;
}

double x_zpf(double m_eff, double omega_m) {
  if (!(m_eff > 0.0) || !(omega_m > 0.0)) {
    throw InvalidArgument("x_zpf: mass and frequency must be positive");
  }
  return std::sqrt(kHbar / (2.0 * m_eff * omega_m));
}

Eigen::Matrix3cd strain_tensor(const Vector6c& t) {
  Eigen::Matrix3cd m;
  m(0, 0) = t(0);
  m(1, 1) = t(1);
  m(2, 2) = t(2);
  m(1, 2) = m(2, 1) = 0.5 * t(3);
  m(0, 2) = m(2, 0) = 0.5 * t(4);
  m(0, 1) = m(1, 0) = 0.5 * t(5);
  return m;
}

Vector6c strain_voigt(const Eigen::Matrix3cd& m) {
  Vector6c t;
  t << m(0, 0), m(1, 1), m(2, 2), m(1, 2) + m(2, 1), m(0, 2) + m(2, 0), m(0, 1) + m(1, 0);
  return t;
}

Vector6c rotate_strain(const Vector6c& t, const CrystalFrame& frame) {
  const Eigen::Matrix3cd r = frame.rotation().cast<std::complex<double>>();
  return strain_voigt(r * strain_tensor(t) * r.transpose());
}

CouplingMap g_m_e_map(const FieldGrid& grid, double chi, const CrystalFrame& frame, double zpf) {
  const std::size_t n = grid.size();
  require_size(grid.strain, n, "strain");
  require_size(grid.displacement, n, "displacement");
  double u_max = 0.0;
  for (const auto& u : grid.displacement) u_max = std::max(u_max, u.norm());
  if (!(u_max > 0.0)) throw InvalidArgument("g_m_e_map: displacement vanishes");
  CouplingMap map;
  map.values.resize(n);
  const double scale = chi * zpf / u_max;
  for (std::size_t i = 0; i < n; ++i) {
    const Vector6c t = rotate_strain(grid.strain[i], frame);
    map.values[i] = scale * (t(0) - t(1));
    const double a = std::abs(map.values[i]);
    if (a > map.max_abs) {
      map.max_abs = a;
      map.argmax = i;
    }
  }
  return map;
}

std::vector<ProfileSample> line_profile(const FieldGrid& grid,
                                        const std::vector<std::complex<double>>& values,
                                        std::size_t axis, std::size_t through) {
  if (axis > 2) throw InvalidArgument("line_profile: axis must be 0, 1 or 2");
  if (values.size() != grid.size() || through >= grid.size()) {
    throw InvalidArgument("line_profile: values or start index do not match the grid");
  }
  std::array<std::size_t, 3> idx{through / (grid.shape[1] * grid.shape[2]),
                                 (through / grid.shape[2]) % grid.shape[1],
                                 through % grid.shape[2]};
  std::vector<ProfileSample> out;
  for (std::size_t k = 0; k < grid.shape[axis]; ++k) {
    idx[axis] = k;
    const std::size_t i = grid.index(idx[0], idx[1], idx[2]);
    out.push_back({grid.position(i)[axis], values[i]});
  }
  return out;
}

std::complex<double> piezo_coupling(const FieldGrid& grid, const PiezoTensor& d) {
  const std::size_t n = grid.size();
  require_size(grid.strain, n, "strain");
  require_size(grid.efield, n, "electric field");
  const Eigen::Matrix<std::complex<double>, 3, 6> dc = d.cast<std::complex<double>>();
  std::complex<double> total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vector3c dt = dc * grid.strain[i];
    // T^dagger D^T e = conj(e^dagger D T); adding both keeps the sum real.
    const std::complex<double> forward = grid.efield[i].dot(dt);
    total += std::conj(forward) + forward;
  }
  return total * grid.cell_volume() / (2.0 * kHbar);
}

PiezoTensor aln_piezo_tensor() {
  PiezoTensor d = PiezoTensor::Zero();
  d(0, 4) = -0.48;
  d(1, 3) = -0.48;
  d(2, 0) = -0.58;
  d(2, 1) = -0.58;
  d(2, 2) = 1.55;
  return d;
}

namespace {

constexpr std::size_t kColumns = 3 + 6 + 12 + 12 + 6 + 2;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& token, std::size_t line) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw ParseError("invalid number '" + token + "'", line);
  }
  if (!std::isfinite(v)) throw ParseError("non-finite value '" + token + "'", line);
  return v;
}

std::vector<std::string> split(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

void save_grid(const FieldGrid& grid, const std::string& path) {
  grid.validate();
  const std::size_t n = grid.size();
  require_size(grid.displacement, n, "displacement");
  require_size(grid.stress, n, "stress");
  require_size(grid.strain, n, "strain");
  require_size(grid.efield, n, "electric field");
  require_size(grid.permittivity, n, "permittivity");
  require_size(grid.density, n, "density");
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  const auto f = format_double;
  out << "# transduce field grid\n";
  out << "#shape " << grid.shape[0] << ' ' << grid.shape[1] << ' ' << grid.shape[2] << '\n';
  out << "#spacing " << f(grid.spacing[0]) << ' ' << f(grid.spacing[1]) << ' '
      << f(grid.spacing[2]) << '\n';
  out << "#origin " << f(grid.origin[0]) << ' ' << f(grid.origin[1]) << ' ' << f(grid.origin[2])
      << '\n';
  out << "#omega_m " << f(grid.omega_m) << '\n';
  out << "#E " << f(grid.youngs) << '\n';
  out << "#nu " << f(grid.poisson) << '\n';
  out << "#lambda " << f(grid.wavelength) << '\n';
  out << "#n_refr " << f(grid.n_refr) << '\n';
  if (grid.rho_ref) out << "#rho_ref " << f(*grid.rho_ref) << '\n';
  out << "#voigt engineering\n";
  for (std::size_t ix = 0; ix < grid.shape[0]; ++ix) {
    for (std::size_t iy = 0; iy < grid.shape[1]; ++iy) {
      for (std::size_t iz = 0; iz < grid.shape[2]; ++iz) {
        const std::size_t i = grid.index(ix, iy, iz);
        out << ix << ' ' << iy << ' ' << iz;
        const auto put = [&](std::complex<double> c) { out << ' ' << f(c.real()) << ' ' << f(c.imag()); };
        for (int k = 0; k < 3; ++k) put(grid.displacement[i](k));
        for (int k = 0; k < 6; ++k) put(grid.stress[i](k));
        for (int k = 0; k < 6; ++k) put(grid.strain[i](k));
        for (int k = 0; k < 3; ++k) put(grid.efield[i](k));
        out << ' ' << f(grid.permittivity[i]) << ' ' << f(grid.density[i]) << '\n';
      }
    }
  }
  if (!out) throw Error("error while writing '" + path + "'");
}

FieldGrid load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open field grid '" + path + "'");
  FieldGrid grid;
  std::map<std::string, std::vector<std::string>> header;
  std::string line;
  std::size_t line_no = 0;
  std::size_t row = 0;
  bool body = false;
  std::size_t n = 0;

  const auto scalar = [&](const char* key, double fallback) {
    const auto it = header.find(key);
    if (it == header.end()) return fallback;
    return parse_double(it->second.at(0), 0);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line[0] == '#') {
      if (body) throw ParseError("header line after data rows", line_no);
      if (line.size() == 1 || line[1] == ' ' || line[1] == '\t') continue;
      std::vector<std::string> tok = split(line.substr(1));
      const std::string key = tok.front();
      tok.erase(tok.begin());
      static const std::map<std::string, std::size_t> arity = {
          {"shape", 3}, {"spacing", 3}, {"origin", 3}, {"omega_m", 1}, {"E", 1},
          {"nu", 1},    {"lambda", 1},  {"n_refr", 1}, {"rho_ref", 1}, {"voigt", 1}};
      const auto a = arity.find(key);
      if (a == arity.end()) throw ParseError("unknown header key '" + key + "'", line_no);
      if (tok.size() != a->second) {
        throw ParseError("header key '" + key + "' expects " + std::to_string(a->second) +
                             " value(s)",
                         line_no);
      }
      if (key == "voigt") {
        if (tok[0] != "engineering" && tok[0] != "voigt=engineering") {
          throw ParseError("unsupported Voigt convention '" + tok[0] + "'", line_no);
        }
      } else {
        for (const auto& t : tok) parse_double(t, line_no);
      }
      header[key] = tok;
      continue;
    }

    if (!body) {
      body = true;
      const auto shape = header.find("shape");
      const auto spacing = header.find("spacing");
      if (shape == header.end()) throw ParseError("missing #shape header", line_no);
      if (spacing == header.end()) throw ParseError("missing #spacing header", line_no);
      if (header.find("voigt") == header.end()) {
        throw ParseError("missing #voigt header (expected engineering)", line_no);
      }
      for (std::size_t k = 0; k < 3; ++k) {
        const double s = parse_double(shape->second[k], line_no);
        if (!(s >= 1.0) || s != std::floor(s)) throw ParseError("shape must be positive integers", line_no);
        grid.shape[k] = static_cast<std::size_t>(s);
        grid.spacing[k] = parse_double(spacing->second[k], line_no);
        if (!(grid.spacing[k] > 0.0)) throw ParseError("spacing must be positive", line_no);
      }
      if (const auto o = header.find("origin"); o != header.end()) {
        for (std::size_t k = 0; k < 3; ++k) grid.origin[k] = parse_double(o->second[k], line_no);
      }
      grid.omega_m = scalar("omega_m", 0.0);
      grid.youngs = scalar("E", 0.0);
      grid.poisson = scalar("nu", 0.0);
      grid.wavelength = scalar("lambda", 0.0);
      grid.n_refr = scalar("n_refr", 0.0);
      if (header.count("rho_ref") != 0) grid.rho_ref = scalar("rho_ref", 0.0);
      n = grid.size();
      grid.displacement.resize(n);
      grid.stress.resize(n);
      grid.strain.resize(n);
      grid.efield.resize(n);
      grid.permittivity.resize(n);
      grid.density.resize(n);
    }

    const std::vector<std::string> tok = split(line);
    if (tok.size() != kColumns) {
      throw ParseError("expected " + std::to_string(kColumns) + " columns, found " +
                           std::to_string(tok.size()),
                       line_no);
    }
    if (row >= n) throw ParseError("more data rows than the shape allows", line_no);
    const std::size_t expect_z = row % grid.shape[2];
    const std::size_t expect_y = (row / grid.shape[2]) % grid.shape[1];
    const std::size_t expect_x = row / (grid.shape[2] * grid.shape[1]);
    const std::size_t expected[3] = {expect_x, expect_y, expect_z};
    for (std::size_t k = 0; k < 3; ++k) {
      if (tok[k] != std::to_string(expected[k])) {
        throw ParseError("row index mismatch: expected (" + std::to_string(expect_x) + ", " +
                             std::to_string(expect_y) + ", " + std::to_string(expect_z) +
                             ") in z-fastest order",
                         line_no);
      }
    }
    std::size_t c = 3;
    const auto next = [&] {
      const double re = parse_double(tok[c], line_no);
      const double im = parse_double(tok[c + 1], line_no);
      c += 2;
      return std::complex<double>(re, im);
    };
    for (int k = 0; k < 3; ++k) grid.displacement[row](k) = next();
    for (int k = 0; k < 6; ++k) grid.stress[row](k) = next();
    for (int k = 0; k < 6; ++k) grid.strain[row](k) = next();
    for (int k = 0; k < 3; ++k) grid.efield[row](k) = next();
    grid.permittivity[row] = parse_double(tok[c], line_no);
    grid.density[row] = parse_double(tok[c + 1], line_no);
    ++row;
  }
  if (!body) throw ParseError("field grid has no data rows", line_no);
  if (row != n) {
    throw ParseError("shape mismatch: header promises " + std::to_string(n) + " rows, found " +
                         std::to_string(row),
                     line_no);
  }
  try {
    grid.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), line_no);
  }
  return grid;
}

}  // namespace transduce
