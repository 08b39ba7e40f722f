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

#include "transduce/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "transduce/errors.hpp"
#include "transduce/fields.hpp"
#include "transduce/report.hpp"
#include "transduce/svg.hpp"

namespace transduce {

using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

bool looks_logarithmic(const std::vector<double>& v) {
  double lo = HUGE_VAL;
  double hi = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) continue;
    if (x <= 0.0) return false;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return hi > 0.0 && hi / lo >= 20.0;
}

std::string populations_svg(const CsvTable& t) {
  const std::vector<double> time = t.numbers(t.column("time_s"));
  std::vector<double> us(time.size());
  std::transform(time.begin(), time.end(), us.begin(), [](double s) { return s * 1e6; });
  std::vector<PlotSeries> series;
  for (const char* name : {"p_mw", "p_m", "p_e", "p_opt"}) {
    if (t.has(name)) series.push_back({name, us, t.numbers(t.column(name))});
  }
  if (t.has("eta_pop_cum")) {
    // Same scale as the populations: efficiency times the initial occupation.
    const std::vector<double> eta = t.numbers(t.column("eta_pop_cum"));
    const double n0 = t.numbers(t.column("p_mw")).front();
    std::vector<double> y(eta.size());
    std::transform(eta.begin(), eta.end(), y.begin(), [n0](double e) { return e * n0; });
    series.push_back({"emitted (bg-sub)", us, y});
  }
  PlotOptions o;
  o.title = "Populations";
  o.x_label = "time (us)";
  o.y_label = "<n>";
  return line_plot_svg(series, o);
}

std::string sweep_svg(const CsvTable& t, const std::vector<std::string>& axes) {
  const std::vector<double> pop = t.numbers(t.column("eta_pop"));
  if (axes.size() == 1) {
    const std::vector<double> x = t.numbers(t.column(axes[0]));
    PlotOptions o;
    o.title = "Efficiency vs " + axes[0];
    o.x_label = axes[0];
    o.y_label = "efficiency";
    o.log_x = looks_logarithmic(x);
    return line_plot_svg({{"eta_pop", x, pop}, {"eta_coh", x, t.numbers(t.column("eta_coh"))}}, o);
  }
  const std::vector<double> xs = t.numbers(t.column(axes[0]));
  const std::vector<double> ys = t.numbers(t.column(axes[1]));
  std::vector<double> ux(xs.begin(), xs.end());
  std::vector<double> uy(ys.begin(), ys.end());
  std::sort(ux.begin(), ux.end());
  ux.erase(std::unique(ux.begin(), ux.end()), ux.end());
  std::sort(uy.begin(), uy.end());
  uy.erase(std::unique(uy.begin(), uy.end()), uy.end());
  std::vector<double> z(ux.size() * uy.size(), std::nan(""));
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const auto i = static_cast<std::size_t>(std::lower_bound(ux.begin(), ux.end(), xs[k]) - ux.begin());
    const auto j = static_cast<std::size_t>(std::lower_bound(uy.begin(), uy.end(), ys[k]) - uy.begin());
    z[i * uy.size() + j] = pop[k];
  }
  PlotOptions o;
  o.title = "eta_pop";
  o.x_label = axes[0];
  o.y_label = axes[1];
  o.log_x = looks_logarithmic(ux);
  o.log_y = looks_logarithmic(uy);
  return heatmap_svg(ux, uy, z, o, "eta_pop");
}

std::vector<std::string> sweep_axes(const CsvTable& t) {
  std::vector<std::string> axes;
  for (const auto& h : t.header) {
    if (h == "eta_pop" || h == "eta_coh" || h == "status") continue;
    axes.push_back(h);
  }
  return axes;
}

bool write_svgs(const CommandContext& ctx) { return ctx.config.output.svg; }

std::string grid_path_for(const CommandContext& ctx, const std::string& explicit_path) {
  if (!explicit_path.empty()) return explicit_path;
  if (ctx.config.fields && !ctx.config.fields->grid.empty()) return ctx.config.fields->grid;
  return {};
}

FieldsConfig fields_config(const CommandContext& ctx) {
  return ctx.config.fields.value_or(FieldsConfig{});
}

}  // namespace

std::string CommandContext::output_path(const std::string& file) const {
  const std::string dir = out_dir.empty() ? config.output.dir : out_dir;
  return (std::filesystem::path(dir) / file).string();
}

std::ostream& CommandContext::stream() const { return out != nullptr ? *out : std::cout; }

int cmd_simulate(const CommandContext& ctx) {
  const RunConfig& c = ctx.config;
  ConvergedRun run;
  const EfficiencyResult r = run_conversion(c.params, c.conversion, &run);

  std::ostringstream csv;
  write_trajectory_csv(csv, run, c.params);
  write_text(ctx.output_path("trajectory.csv"), csv.str());
  write_text(ctx.output_path("summary.json"), summary_json(r, c).dump(2) + "\n");
  if (write_svgs(ctx)) {
    write_text(ctx.output_path("populations.svg"),
               populations_svg(read_csv(ctx.output_path("trajectory.csv"))));
  }

  std::ostream& out = ctx.stream();
  out << "eta_pop  " << format_number(r.eta_pop) << "\n";
  out << "eta_coh  " << format_number(r.eta_coh) << "\n";
  out << "t_f      " << format_number(r.t_f) << " s (" << r.engine << ")\n";
  if (r.truncation_checked) {
    out << "truncation shift " << format_number(r.truncation_shift)
        << (r.truncation_ok ? " ok" : " FAILED") << "\n";
  }
  if (r.sampling_checked) {
    out << "sampling shift pop " << format_number(r.sampling_shift_pop) << ", coh "
        << format_number(r.sampling_shift_coh) << (r.sampling_ok ? " ok" : " FAILED") << "\n";
  }
  out << "wrote " << ctx.output_path("summary.json") << "\n";
  return r.truncation_ok && r.sampling_ok ? kExitOk : kExitConvergence;
}

int cmd_sweep(const CommandContext& ctx) {
  const RunConfig& c = ctx.config;
  if (!c.sweep) throw ParseError("config has no sweep block");
  SweepSpec spec;
  spec.axes = c.sweep->axes;
  spec.base = c.params;
  spec.options = c.conversion;
  const SweepResult result = sweep(spec, ctx.threads);

  std::ostringstream csv;
  write_sweep_csv(csv, result);
  write_text(ctx.output_path("sweep.csv"), csv.str());
  write_text(ctx.output_path("sweep.json"), sweep_json(result, c).dump(2) + "\n");
  if (write_svgs(ctx)) {
    const CsvTable t = read_csv(ctx.output_path("sweep.csv"));
    write_text(ctx.output_path("sweep.svg"), sweep_svg(t, sweep_axes(t)));
  }
  std::ostream& out = ctx.stream();
  for (const auto& p : result.points) {
    for (std::size_t a = 0; a < p.coordinates.size(); ++a) {
      out << result.axis_names[a] << '=' << format_number(p.coordinates[a]) << ' ';
    }
    if (p.ok) {
      out << "eta_pop=" << format_number(p.result.eta_pop)
          << " eta_coh=" << format_number(p.result.eta_coh) << "\n";
    } else {
      out << "error: " << p.error << "\n";
    }
  }
  out << result.points.size() - result.failures() << "/" << result.points.size()
      << " points succeeded\n";
  return result.success_fraction() >= 0.9 ? kExitOk : kExitConvergence;
}

int cmd_optimize(const CommandContext& ctx) {
  const RunConfig& c = ctx.config;
  if (!c.optimize) throw ParseError("config has no optimize block");
  OptimizeSpec spec;
  spec.knobs = c.optimize->knobs;
  spec.base = c.params;
  spec.options = c.conversion;
  spec.objective = c.optimize->objective;
  spec.nelder_mead = c.optimize->nelder_mead;
  spec.verify = c.optimize->verify;
  const OptimizeResult r = optimize(spec);
  write_text(ctx.output_path("optimize.json"), optimize_json(r, *c.optimize, c).dump(2) + "\n");
  std::ostream& out = ctx.stream();
  for (std::size_t i = 0; i < spec.knobs.size(); ++i) {
    out << spec.knobs[i] << " = " << format_number(r.knob_values[i]) << "\n";
  }
  out << "objective " << format_number(r.objective_best) << " (baseline "
      << format_number(r.objective_baseline) << ", " << r.search.evaluations
      << " evaluations, " << r.search.reason << ")\n";
  if (r.verified) {
    out << "verified eta_pop " << format_number(r.best_result.eta_pop) << " vs baseline "
        << format_number(r.baseline_result.eta_pop) << "\n";
  }
  return kExitOk;
}

int cmd_fields(const CommandContext& ctx, const std::string& grid_path, const std::string& task) {
  static const std::set<std::string> tasks = {"volumes", "mass", "gmap", "piezo", "wavelengths"};
  if (tasks.count(task) == 0) {
    throw ParseError("unknown fields task '" + task +
                     "' (expected volumes, mass, gmap, piezo or wavelengths)");
  }
  const std::string path = grid_path_for(ctx, grid_path);
  if (path.empty()) throw ParseError("fields: no grid file given (--grid or fields.grid)");
  const FieldGrid grid = load_grid(path);
  const FieldsConfig fc = fields_config(ctx);
  std::ostream& out = ctx.stream();
  json j = {{"task", task}, {"grid", path}, {"version", TRANSDUCE_VERSION}};

  if (task == "volumes") {
    const MechanicalVolume m = mech_mode_volume(grid);
    j["mech_volume_m3"] = m.volume;
    out << "V_mech = " << format_number(m.volume) << " m^3\n";
    if (m.in_lambda_p3) {
      j["mech_volume_lambda_p3"] = *m.in_lambda_p3;
      j["mech_volume_lambda_s3"] = *m.in_lambda_s3;
      out << "       = " << format_number(*m.in_lambda_p3) << " Lambda_p^3 = "
          << format_number(*m.in_lambda_s3) << " Lambda_s^3\n";
    }
    const OpticalVolume o = opt_mode_volume(grid);
    j["opt_volume_m3"] = o.volume;
    out << "V_opt  = " << format_number(o.volume) << " m^3\n";
    if (o.in_lambda_n3) {
      j["opt_volume_lambda_n3"] = *o.in_lambda_n3;
      out << "       = " << format_number(*o.in_lambda_n3) << " (lambda/n)^3\n";
    }
  } else if (task == "mass") {
    const double m = effective_mass(grid);
    j["m_eff_kg"] = m;
    out << "m_eff = " << format_number(m) << " kg\n";
    if (grid.omega_m > 0.0) {
      j["x_zpf_m"] = x_zpf(m, grid.omega_m);
      out << "x_zpf = " << format_number(x_zpf(m, grid.omega_m)) << " m\n";
    }
  } else if (task == "gmap") {
    const double zpf = x_zpf(effective_mass(grid), grid.omega_m);
    const CrystalFrame frame(fc.phi_deg * kPi / 180.0);
    const CouplingMap map = g_m_e_map(grid, kTwoPi * fc.chi_hz, frame, zpf);
    const auto where = grid.position(map.argmax);
    j["x_zpf_m"] = zpf;
    j["phi_deg"] = fc.phi_deg;
    j["max_abs_g_hz"] = map.max_abs / kTwoPi;
    j["argmax_position_m"] = where;
    const auto profile = line_profile(grid, map.values, fc.profile_axis, map.argmax);
    std::ostringstream csv;
    csv << "coordinate_m,g_re_hz,g_im_hz,abs_g_hz\n";
    for (const auto& s : profile) {
      csv << format_number(s.coordinate) << ',' << format_number(s.value.real() / kTwoPi) << ','
          << format_number(s.value.imag() / kTwoPi) << ','
          << format_number(std::abs(s.value) / kTwoPi) << '\n';
    }
    write_text(ctx.output_path("gmap_profile.csv"), csv.str());
    out << "max |g_m-e|/2pi = " << format_number(map.max_abs / kTwoPi) << " Hz at ("
        << format_number(where[0]) << ", " << format_number(where[1]) << ", "
        << format_number(where[2]) << ") m\n";
  } else if (task == "piezo") {
    const std::complex<double> g = piezo_coupling(grid, fc.piezo);
    j["g_MW_m_hz"] = g.real() / kTwoPi;
    j["imag_part_hz"] = g.imag() / kTwoPi;
    out << "g_MW-m/2pi = " << format_number(g.real() / kTwoPi) << " Hz\n";
  } else {
    const AcousticWavelengths w = acoustic_wavelengths(grid.youngs, grid.poisson,
                                                       grid.reference_density(), grid.omega_m);
    j["lambda_p_m"] = w.longitudinal;
    j["lambda_s_m"] = w.shear;
    out << "Lambda_p = " << format_number(w.longitudinal) << " m\n";
    out << "Lambda_s = " << format_number(w.shear) << " m\n";
  }
  write_text(ctx.output_path("fields_" + task + ".json"), j.dump(2) + "\n");
  return kExitOk;
}

int cmd_check(const CommandContext& ctx, const std::string& grid_path) {
  const TransducerParams& p = ctx.config.params;
  const double drive_hz =
      ctx.config.check.drive_hz.value_or(p.omega_opt / kTwoPi - 0.5 * p.omega_m / kTwoPi);
  const bool window = check_modulation_window(p.omega_opt, p.gamma_opt, kTwoPi * drive_hz, p.omega_m);
  std::ostream& out = ctx.stream();
  const auto hz = [](double w) { return w / kTwoPi; };
  json rates = {
      {"gamma_MW_hz", hz(p.gamma_mw)},     {"gamma_m_hz", hz(p.gamma_m)},
      {"gamma_e_hz", hz(p.gamma_e)},       {"gamma_opt_hz", hz(p.gamma_opt)},
      {"gamma_wg_hz", hz(p.gamma_wg)},     {"gamma_tot_hz", hz(p.gamma_tot())},
      {"gamma_dephasing_per_s", p.gamma_dephasing},
      {"Q_MW", p.gamma_mw > 0 ? p.omega_mw / p.gamma_mw : HUGE_VAL},
      {"Q_m", p.gamma_m > 0 ? p.omega_m / p.gamma_m : HUGE_VAL},
      {"Q_opt", p.gamma_opt > 0 ? p.omega_opt / p.gamma_opt : HUGE_VAL},
  };
  for (auto it = rates.begin(); it != rates.end(); ++it) {
    if (it->is_number_float() && !std::isfinite(it->get<double>())) *it = nullptr;
  }
  json j = {{"drive_hz", drive_hz},
            {"window_lo_hz", hz(p.omega_opt - 0.5 * p.gamma_opt)},
            {"window_hi_hz", hz(p.omega_opt + 0.5 * p.gamma_opt)},
            {"modulation_window_ok", window},
            {"rates", rates},
            {"version", TRANSDUCE_VERSION},
            {"config", to_json(ctx.config)}};
  out << "modulation window (" << format_number(hz(p.omega_opt - 0.5 * p.gamma_opt)) << ", "
      << format_number(hz(p.omega_opt + 0.5 * p.gamma_opt)) << ") Hz, drive "
      << format_number(drive_hz) << " Hz: " << (window ? "OK" : "VIOLATED") << "\n";
  for (auto it = rates.begin(); it != rates.end(); ++it) {
    out << "  " << it.key() << " = " << (it->is_null() ? "inf" : format_number(it->get<double>()))
        << "\n";
  }
  const std::string path = grid_path_for(ctx, grid_path);
  if (!path.empty()) {
    const FieldGrid grid = load_grid(path);
    json g;
    if (grid.youngs > 0.0 && grid.omega_m > 0.0) {
      const auto w = acoustic_wavelengths(grid.youngs, grid.poisson, grid.reference_density(),
                                          grid.omega_m);
      g["lambda_p_m"] = w.longitudinal;
      g["lambda_s_m"] = w.shear;
      out << "  Lambda_p = " << format_number(w.longitudinal) << " m, Lambda_s = "
          << format_number(w.shear) << " m\n";
    }
    if (grid.omega_m > 0.0) {
      const double zpf = x_zpf(effective_mass(grid), grid.omega_m);
      g["x_zpf_m"] = zpf;
      out << "  x_zpf = " << format_number(zpf) << " m\n";
    }
    j["grid"] = g;
  }
  write_text(ctx.output_path("check.json"), j.dump(2) + "\n");
  return kExitOk;
}

int cmd_plot(const std::string& csv_path, const std::string& kind, const std::string& out_path) {
  const CsvTable t = read_csv(csv_path);
  std::string k = kind;
  if (k == "auto") {
    if (t.has("time_s")) {
      k = "populations";
    } else if (t.has("eta_pop")) {
      k = sweep_axes(t).size() == 2 ? "heatmap" : "line";
    } else {
      throw ParseError("plot: cannot infer the plot kind from the CSV header");
    }
  }
  std::string svg;
  if (k == "populations") {
    svg = populations_svg(t);
  } else if (k == "line" || k == "heatmap") {
    const auto axes = sweep_axes(t);
    if ((k == "line" && axes.size() != 1) || (k == "heatmap" && axes.size() != 2)) {
      throw ParseError("plot: " + k + " needs " + (k == "line" ? "one" : "two") + " axis columns");
    }
    svg = sweep_svg(t, axes);
  } else {
    throw ParseError("plot: unknown kind '" + kind + "' (auto, populations, line, heatmap)");
  }
  write_text(out_path, svg);
  return kExitOk;
}

int run_guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConvergenceError& e) {
    err << "convergence failure: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const UndefinedEfficiency& e) {
    err << "undefined efficiency: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace transduce
