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

#include "transduce/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "transduce/errors.hpp"

#ifndef TRANSDUCE_VERSION
#define TRANSDUCE_VERSION "0.0.0"
#endif

namespace transduce {

using nlohmann::json;

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json diagnostics_json(const StateDiagnostics& d) {
  return {{"max_trace_error", d.trace_error},
          {"max_hermiticity_defect", d.hermiticity_defect},
          {"min_eigenvalue", d.min_eigenvalue}};
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& out, const ConvergedRun& run, const TransducerParams& p) {
  const Trajectory& s = run.signals.at(0);
  const Trajectory& r = run.reference;
  const auto& p_mw = s.series("p_mw");
  const auto& p_m = s.series("p_m");
  const auto& p_e = s.series("p_e");
  const auto& p_opt = s.series("p_opt");
  const double n0 = p_mw.at(0).real();
  const double a0 = std::norm(s.series("a_mw").at(0));
  out << "time_s,p_mw,p_m,p_e,p_opt,wg_cum,eta_pop_cum,eta_coh_cum\n";
  for (std::size_t k = 0; k < s.samples(); ++k) {
    const double wg = p.gamma_wg * s.occupation_integral[k];
    const double eta_pop =
        n0 > 0.0 ? p.gamma_wg * (s.occupation_integral[k] - r.occupation_integral[k]) / n0 : 0.0;
    const double eta_coh = a0 > 0.0 ? p.gamma_wg * s.amplitude_integral[k] / a0 : 0.0;
    out << format_number(s.times[k]) << ',' << format_number(p_mw[k].real()) << ','
        << format_number(p_m[k].real()) << ',' << format_number(p_e[k].real()) << ','
        << format_number(p_opt[k].real()) << ',' << format_number(wg) << ','
        << format_number(eta_pop) << ',' << format_number(eta_coh) << '\n';
  }
}

json efficiency_json(const EfficiencyResult& r) {
  json j = {
      {"eta_pop", r.eta_pop},
      {"eta_coh", r.eta_coh},
      {"eta_pop_raw", r.eta_pop_raw},
      {"t_f", r.t_f},
      {"n0", r.n0},
      {"coherence0", r.coherence0},
      {"engine", r.engine},
      {"convergence",
       {{"converged", r.convergence.converged},
        {"remaining_excitation", r.convergence.remaining_excitation},
        {"last_increment", r.convergence.last_increment},
        {"truncation_checked", r.truncation_checked},
        {"truncation_ok", r.truncation_ok},
        {"sampling_checked", r.sampling_checked},
        {"sampling_ok", r.sampling_ok}}},
      {"diagnostics", diagnostics_json(r.worst)},
  };
  if (r.truncation_checked) {
    j["convergence"]["truncation"] = {{"dims", r.truncation_dims},
                                      {"eta_pop_asymptotic", r.eta_pop_asymptotic},
                                      {"eta_pop_asymptotic_enlarged", r.eta_pop_asymptotic_enlarged},
                                      {"relative_shift", r.truncation_shift}};
  }
  if (r.sampling_checked) {
    j["convergence"]["sampling"] = {{"eta_pop_half_dt", r.eta_pop_half_dt},
                                    {"eta_coh_half_dt", r.eta_coh_half_dt},
                                    {"relative_shift_pop", r.sampling_shift_pop},
                                    {"relative_shift_coh", r.sampling_shift_coh}};
  }
  return j;
}

json summary_json(const EfficiencyResult& r, const RunConfig& config) {
  json j = efficiency_json(r);
  j["dims"] = config.params.dims;
  j["version"] = TRANSDUCE_VERSION;
  j["config"] = to_json(config);
  return j;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  for (const auto& name : result.axis_names) out << name << ',';
  out << "eta_pop,eta_coh,status\n";
  for (const auto& p : result.points) {
    for (double c : p.coordinates) out << format_number(c) << ',';
    if (p.ok) {
      out << format_number(p.result.eta_pop) << ',' << format_number(p.result.eta_coh) << ",ok\n";
    } else {
      out << "nan,nan,error\n";
    }
  }
}

json sweep_json(const SweepResult& result, const RunConfig& config) {
  json points = json::array();
  for (const auto& p : result.points) {
    json c = json::array();
    for (double v : p.coordinates) c.push_back(finite_or_null(v));
    json entry = {{"coordinates", c}, {"status", p.ok ? "ok" : "error"}};
    if (p.ok) {
      entry["result"] = efficiency_json(p.result);
    } else {
      entry["error"] = p.error;
    }
    points.push_back(entry);
  }
  return {{"axes", result.axis_names},
          {"shape", result.shape},
          {"success_fraction", result.success_fraction()},
          {"points", points},
          {"version", TRANSDUCE_VERSION},
          {"config", to_json(config)}};
}

json optimize_json(const OptimizeResult& result, const OptimizeConfig& spec,
                   const RunConfig& config) {
  json trace = json::array();
  for (const auto& t : result.search.trace) {
    trace.push_back({{"iteration", t.iteration},
                     {"operation", t.operation},
                     {"x_best", t.best},
                     {"f_best", t.f_best},
                     {"diameter", t.diameter}});
  }
  json best_knobs = json::object();
  for (std::size_t i = 0; i < spec.knobs.size(); ++i) {
    best_knobs[spec.knobs[i]] = result.knob_values[i];
  }
  json j = {
      {"knobs", spec.knobs},
      {"objective", spec.objective == OptimizeObjective::Asymptotic ? "asymptotic" : "simulation"},
      {"x_best", best_knobs},
      {"x_best_scaled", result.search.x_best},
      {"f_best", result.objective_best},
      {"f_baseline", result.objective_baseline},
      {"iterations", result.search.iterations},
      {"evaluations", result.search.evaluations},
      {"converged", result.search.converged},
      {"reason", result.search.reason},
      {"trace", trace},
      {"verified", result.verified},
      {"version", TRANSDUCE_VERSION},
      {"config", to_json(config)},
  };
  if (result.verified) {
    j["baseline_result"] = efficiency_json(result.baseline_result);
    j["best_result"] = efficiency_json(result.best_result);
  }
  return j;
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ParseError("CSV has no column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

bool CsvTable::has(const std::string& name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

std::vector<double> CsvTable::numbers(std::size_t column) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    const std::string& s = row.at(column);
    if (s == "nan") {
      out.push_back(std::nan(""));
    } else if (s == "inf" || s == "-inf") {
      out.push_back(s[0] == '-' ? -HUGE_VAL : HUGE_VAL);
    } else {
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      out.push_back(end == s.c_str() ? std::nan("") : v);
    }
  }
  return out;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open CSV '" + path + "'");
  CsvTable t;
  std::string line;
  std::size_t line_no = 0;
  const auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item.erase(0, item.find_first_not_of(" \t"));
      item.erase(item.find_last_not_of(" \t\r") + 1);
      out.push_back(item);
    }
    return out;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (t.header.empty()) {
      t.header = split(line);
      continue;
    }
    auto row = split(line);
    if (row.size() != t.header.size()) {
      throw ParseError("expected " + std::to_string(t.header.size()) + " columns", line_no);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw ParseError("CSV '" + path + "' is empty");
  return t;
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error("error while writing '" + path + "'");
}

}  // namespace transduce
