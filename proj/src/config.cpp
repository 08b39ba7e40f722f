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

#include "transduce/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "transduce/errors.hpp"

namespace transduce {

namespace {

using nlohmann::json;

// Reads keys of one JSON object and rejects anything left unread.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw ParseError(where_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& key) {
    const json* v = find(key);
    if (v == nullptr) throw ParseError(path(key) + ": missing");
    return as_number(*v, key);
  }

  std::optional<double> optional_number(const std::string& key) {
    const json* v = find(key);
    if (v == nullptr) return std::nullopt;
    return as_number(*v, key);
  }

  std::optional<bool> optional_bool(const std::string& key) {
    const json* v = find(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_boolean()) throw ParseError(path(key) + ": expected true or false");
    return v->get<bool>();
  }

  std::optional<std::string> optional_string(const std::string& key) {
    const json* v = find(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_string()) throw ParseError(path(key) + ": expected a string");
    return v->get<std::string>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (seen_.count(it.key()) == 0) throw ParseError(path(it.key()) + ": unknown key");
    }
  }

  std::string path(const std::string& key) const { return where_ + "." + key; }

  double as_number(const json& v, const std::string& key) const {
    if (!v.is_number()) throw ParseError(path(key) + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ParseError(path(key) + ": must be finite");
    return d;
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

double nonnegative(double v, const std::string& where) {
  if (!(v >= 0.0)) throw ParseError(where + ": must be non-negative");
  return v;
}

double positive(double v, const std::string& where) {
  if (!(v > 0.0)) throw ParseError(where + ": must be positive");
  return v;
}

// Exactly one of a rate (Hz) or a quality factor, or neither (keep baseline).
void rate_or_q(ObjectReader& r, const std::string& rate_key, const std::string& q_key,
               double omega, double& rate) {
  const bool has_rate = r.has(rate_key);
  const bool has_q = r.has(q_key);
  if (has_rate && has_q) {
    throw ParseError(r.path(rate_key) + ": give either " + rate_key + " or " + q_key +
                     ", not both");
  }
  if (has_rate) {
    rate = kTwoPi * nonnegative(r.number(rate_key), r.path(rate_key));
  } else if (has_q) {
    rate = quality_to_rate(omega, positive(r.number(q_key), r.path(q_key)));
  }
  r.find(rate_key);
  r.find(q_key);
}

TransducerParams parse_parameters(const json& j, const TransducerParams& base) {
  TransducerParams p = base;
  ObjectReader r(j, "parameters");
  const auto hz = [&](const char* key, double& field) {
    if (const auto v = r.optional_number(key)) field = kTwoPi * nonnegative(*v, r.path(key));
  };
  hz("nu_MW_hz", p.omega_mw);
  hz("nu_m_hz", p.omega_m);
  if (r.has("nu_m_hz") && !r.has("delta_e_hz")) p.delta_e = p.omega_m;
  hz("delta_e_hz", p.delta_e);
  hz("delta_opt_hz", p.delta_opt);
  hz("rabi_hz", p.omega_rabi);
  hz("g_MW_m_hz", p.g_mw_m);
  hz("g_m_e_hz", p.g_m_e);
  hz("g_e_opt_hz", p.g_e_opt);
  hz("nu_opt_hz", p.omega_opt);
  rate_or_q(r, "gamma_MW_hz", "Q_MW", p.omega_mw, p.gamma_mw);
  rate_or_q(r, "gamma_m_hz", "Q_m", p.omega_m, p.gamma_m);
  hz("gamma_e_hz", p.gamma_e);
  const bool opt_given = r.has("gamma_opt_hz") || r.has("Q_opt");
  rate_or_q(r, "gamma_opt_hz", "Q_opt", p.omega_opt, p.gamma_opt);
  if (r.has("gamma_wg_hz")) {
    hz("gamma_wg_hz", p.gamma_wg);
  } else {
    r.find("gamma_wg_hz");
    if (opt_given) p.gamma_wg = p.gamma_opt;
  }
  if (const json* t2 = r.find("T2_star_s")) {
    if (t2->is_string()) {
      if (t2->get<std::string>() != "inf") {
        throw ParseError(r.path("T2_star_s") + ": expected a number of seconds or \"inf\"");
      }
      p.gamma_dephasing = 0.0;
    } else if (t2->is_null()) {
      p.gamma_dephasing = 0.0;
    } else {
      p.gamma_dephasing = 1.0 / positive(r.as_number(*t2, "T2_star_s"), r.path("T2_star_s"));
    }
  }
  if (const json* a = r.find("alpha")) {
    if (a->is_number()) {
      p.alpha = Complex(r.as_number(*a, "alpha"), 0.0);
    } else if (a->is_array() && a->size() == 2 && (*a)[0].is_number() && (*a)[1].is_number()) {
      p.alpha = Complex((*a)[0].get<double>(), (*a)[1].get<double>());
    } else {
      throw ParseError(r.path("alpha") + ": expected a number or [re, im]");
    }
  }
  r.finish();
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("parameters: ") + e.what());
  }
  return p;
}

std::array<std::size_t, kSubsystemCount> dims_from(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != kSubsystemCount) {
    throw ParseError(where + ": expected four truncations [mw, mech, electron, optical]");
  }
  std::array<std::size_t, kSubsystemCount> d{};
  for (std::size_t k = 0; k < kSubsystemCount; ++k) {
    if (!v[k].is_number_integer() || v[k].get<long long>() < 2) {
      throw ParseError(where + ": truncations must be integers >= 2");
    }
    d[k] = static_cast<std::size_t>(v[k].get<long long>());
  }
  if (d[2] != 2) throw ParseError(where + ": electron truncation must be 2");
  return d;
}

void parse_engine_block(const json& j, RunConfig& c) {
  ObjectReader r(j, "engine");
  if (const json* d = r.find("dims")) c.params.dims = dims_from(*d, r.path("dims"));
  ConvergenceOptions& o = c.conversion.run;
  if (const auto v = r.optional_number("dt_sample_s")) o.dt_sample = positive(*v, r.path("dt_sample_s"));
  if (const auto v = r.optional_number("tol")) o.tol = positive(*v, r.path("tol"));
  if (const auto v = r.optional_number("horizon_s")) o.horizon = positive(*v, r.path("horizon_s"));
  if (const auto v = r.optional_number("increment_tol")) {
    o.increment_tol = positive(*v, r.path("increment_tol"));
  }
  if (const json* m = r.find("substeps")) {
    // 0 selects the automatic count.
    if (!m->is_number_integer() || m->get<long long>() < 0 ||
        (m->get<long long>() & (m->get<long long>() - 1)) != 0) {
      throw ParseError(r.path("substeps") + ": expected 0 or a power of two");
    }
    o.substeps = static_cast<std::size_t>(m->get<long long>());
  }
  if (const auto v = r.optional_string("engine")) {
    try {
      o.engine = parse_engine(*v);
    } catch (const InvalidArgument& e) {
      throw ParseError(r.path("engine") + ": " + e.what());
    }
  }
  if (const auto v = r.optional_bool("check_sampling")) c.conversion.check_sampling = *v;
  if (const auto v = r.optional_bool("check_truncation")) c.conversion.check_truncation = *v;
  if (const auto v = r.optional_bool("diagnostics")) o.diagnostics = *v;
  if (const auto v = r.optional_number("rk_atol")) o.rk.atol = positive(*v, r.path("rk_atol"));
  if (const auto v = r.optional_number("rk_rtol")) o.rk.rtol = positive(*v, r.path("rk_rtol"));
  r.finish();
}

SweepConfig parse_sweep(const json& j) {
  ObjectReader r(j, "sweep");
  SweepConfig s;
  const json* axes = r.find("axes");
  if (axes == nullptr || !axes->is_array() || axes->empty() || axes->size() > 2) {
    throw ParseError("sweep.axes: expected one or two axis objects");
  }
  for (std::size_t i = 0; i < axes->size(); ++i) {
    ObjectReader a((*axes)[i], "sweep.axes[" + std::to_string(i) + "]");
    SweepAxis axis;
    const auto name = a.optional_string("name");
    if (!name) throw ParseError(a.path("name") + ": missing");
    if (!is_knob(*name)) throw ParseError(a.path("name") + ": unknown knob '" + *name + "'");
    axis.name = *name;
    const auto scale = a.optional_string("scale").value_or("linear");
    if (scale == "log") {
      axis.scale = GridScale::Log;
    } else if (scale != "linear") {
      throw ParseError(a.path("scale") + ": expected linear or log");
    }
    if (const json* values = a.find("values")) {
      if (a.has("min") || a.has("max") || a.has("points")) {
        throw ParseError(a.path("values") + ": give either values or min/max/points");
      }
      if (!values->is_array() || values->empty()) {
        throw ParseError(a.path("values") + ": expected a non-empty array");
      }
      for (const auto& v : *values) {
        if (v.is_string() && v.get<std::string>() == "inf") {
          axis.values.push_back(std::numeric_limits<double>::infinity());
        } else {
          axis.values.push_back(a.as_number(v, "values"));
        }
      }
    } else {
      const double lo = a.number("min");
      const double hi = a.number("max");
      const double n = a.number("points");
      if (!(n >= 1.0) || n != std::floor(n)) {
        throw ParseError(a.path("points") + ": expected a positive integer");
      }
      try {
        axis.values = axis.scale == GridScale::Log ? log_grid(lo, hi, static_cast<std::size_t>(n))
                                                   : linear_grid(lo, hi, static_cast<std::size_t>(n));
      } catch (const InvalidArgument& e) {
        throw ParseError(a.path("min") + ": " + e.what());
      }
    }
    a.finish();
    s.axes.push_back(std::move(axis));
  }
  if (const auto t = r.optional_number("threads")) {
    if (!(*t >= 1.0)) throw ParseError("sweep.threads: must be at least 1");
    s.threads = static_cast<std::size_t>(*t);
  }
  r.finish();
  SweepSpec check;
  check.axes = s.axes;
  try {
    check.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("sweep: ") + e.what());
  }
  return s;
}

OptimizeConfig parse_optimize(const json& j) {
  ObjectReader r(j, "optimize");
  OptimizeConfig o;
  const json* knobs = r.find("knobs");
  if (knobs == nullptr || !knobs->is_array() || knobs->empty()) {
    throw ParseError("optimize.knobs: expected a non-empty array of knob names");
  }
  for (const auto& k : *knobs) {
    if (!k.is_string() || !is_knob(k.get<std::string>())) {
      throw ParseError("optimize.knobs: unknown knob " + k.dump());
    }
    o.knobs.push_back(k.get<std::string>());
  }
  if (const auto v = r.optional_string("objective")) {
    if (*v == "asymptotic") {
      o.objective = OptimizeObjective::Asymptotic;
    } else if (*v == "simulation") {
      o.objective = OptimizeObjective::Simulation;
    } else {
      throw ParseError("optimize.objective: expected asymptotic or simulation");
    }
  }
  if (const auto v = r.optional_number("xtol")) o.nelder_mead.xtol = positive(*v, "optimize.xtol");
  if (const auto v = r.optional_number("ftol")) o.nelder_mead.ftol = positive(*v, "optimize.ftol");
  if (const auto v = r.optional_number("max_iterations")) {
    o.nelder_mead.max_iterations = static_cast<std::size_t>(positive(*v, "optimize.max_iterations"));
  }
  if (const auto v = r.optional_number("max_evaluations")) {
    o.nelder_mead.max_evaluations = static_cast<std::size_t>(positive(*v, "optimize.max_evaluations"));
  }
  if (const auto v = r.optional_bool("verify")) o.verify = *v;
  r.finish();
  return o;
}

FieldsConfig parse_fields(const json& j) {
  ObjectReader r(j, "fields");
  FieldsConfig f;
  if (const auto v = r.optional_string("grid")) f.grid = *v;
  if (const auto v = r.optional_number("chi_hz")) f.chi_hz = *v;
  if (const auto v = r.optional_number("phi_deg")) f.phi_deg = *v;
  if (const auto v = r.optional_number("profile_axis")) {
    if (*v != 0.0 && *v != 1.0 && *v != 2.0) throw ParseError("fields.profile_axis: expected 0, 1 or 2");
    f.profile_axis = static_cast<std::size_t>(*v);
  }
  if (const json* d = r.find("piezo_tensor")) {
    if (!d->is_array() || d->size() != 3) {
      throw ParseError("fields.piezo_tensor: expected a 3 x 6 array (C/m^2)");
    }
    for (std::size_t i = 0; i < 3; ++i) {
      const json& row = (*d)[i];
      if (!row.is_array() || row.size() != 6) {
        throw ParseError("fields.piezo_tensor: expected a 3 x 6 array (C/m^2)");
      }
      for (std::size_t k = 0; k < 6; ++k) {
        f.piezo(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
            r.as_number(row[k], "piezo_tensor");
      }
    }
  }
  r.finish();
  return f;
}

}  // namespace

RunConfig parse_config(const json& j) {
  ObjectReader r(j, "config");
  RunConfig c;
  // Engine first: dims belong to the parameters struct.
  if (const json* e = r.find("engine")) parse_engine_block(*e, c);
  if (const json* p = r.find("parameters")) {
    const auto dims = c.params.dims;
    c.params = parse_parameters(*p, default_params());
    c.params.dims = dims;
  }
  if (const json* s = r.find("sweep")) c.sweep = parse_sweep(*s);
  if (const json* o = r.find("optimize")) c.optimize = parse_optimize(*o);
  if (const json* f = r.find("fields")) c.fields = parse_fields(*f);
  if (const json* k = r.find("check")) {
    ObjectReader cr(*k, "check");
    c.check.drive_hz = cr.optional_number("drive_hz");
    cr.finish();
  }
  if (const json* o = r.find("output")) {
    ObjectReader orr(*o, "output");
    if (const auto v = orr.optional_string("dir")) c.output.dir = *v;
    if (const auto v = orr.optional_bool("svg")) c.output.svg = *v;
    orr.finish();
  }
  r.finish();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("config '" + path + "': " + e.what());
  }
  RunConfig c = parse_config(j);
  c.source = path;
  if (c.fields && !c.fields->grid.empty()) {
    const std::filesystem::path grid(c.fields->grid);
    if (grid.is_relative()) {
      c.fields->grid = (std::filesystem::path(path).parent_path() / grid).string();
    }
  }
  return c;
}

json to_json(const RunConfig& c) {
  const TransducerParams& p = c.params;
  json params = {
      {"nu_MW_hz", p.omega_mw / kTwoPi},
      {"nu_m_hz", p.omega_m / kTwoPi},
      {"delta_e_hz", p.delta_e / kTwoPi},
      {"delta_opt_hz", p.delta_opt / kTwoPi},
      {"rabi_hz", p.omega_rabi / kTwoPi},
      {"g_MW_m_hz", p.g_mw_m / kTwoPi},
      {"g_m_e_hz", p.g_m_e / kTwoPi},
      {"g_e_opt_hz", p.g_e_opt / kTwoPi},
      {"gamma_MW_hz", p.gamma_mw / kTwoPi},
      {"gamma_m_hz", p.gamma_m / kTwoPi},
      {"gamma_e_hz", p.gamma_e / kTwoPi},
      {"gamma_opt_hz", p.gamma_opt / kTwoPi},
      {"gamma_wg_hz", p.gamma_wg / kTwoPi},
      {"nu_opt_hz", p.omega_opt / kTwoPi},
      {"alpha", json::array({p.alpha.real(), p.alpha.imag()})},
  };
  if (p.gamma_dephasing == 0.0) {
    params["T2_star_s"] = "inf";
  } else {
    params["T2_star_s"] = 1.0 / p.gamma_dephasing;
  }
  const ConvergenceOptions& o = c.conversion.run;
  json engine = {
      {"dims", p.dims},
      {"dt_sample_s", o.dt_sample},
      {"tol", o.tol},
      {"horizon_s", o.horizon},
      {"increment_tol", o.increment_tol},
      {"substeps", o.substeps},
      {"engine", engine_name(o.engine)},
      {"check_sampling", c.conversion.check_sampling},
      {"check_truncation", c.conversion.check_truncation},
      {"diagnostics", o.diagnostics},
      {"rk_atol", o.rk.atol},
      {"rk_rtol", o.rk.rtol},
  };
  json out = {{"parameters", params},
              {"engine", engine},
              {"output", {{"dir", c.output.dir}, {"svg", c.output.svg}}}};
  if (c.check.drive_hz) out["check"] = {{"drive_hz", *c.check.drive_hz}};
  if (c.sweep) {
    json axes = json::array();
    for (const auto& a : c.sweep->axes) {
      json values = json::array();
      for (double v : a.values) {
        if (std::isinf(v)) {
          values.push_back("inf");
        } else {
          values.push_back(v);
        }
      }
      axes.push_back({{"name", a.name},
                      {"scale", a.scale == GridScale::Log ? "log" : "linear"},
                      {"values", values}});
    }
    out["sweep"] = {{"axes", axes}, {"threads", c.sweep->threads}};
  }
  if (c.optimize) {
    const auto& o2 = *c.optimize;
    out["optimize"] = {
        {"knobs", o2.knobs},
        {"objective", o2.objective == OptimizeObjective::Asymptotic ? "asymptotic" : "simulation"},
        {"xtol", o2.nelder_mead.xtol},
        {"ftol", o2.nelder_mead.ftol},
        {"max_iterations", o2.nelder_mead.max_iterations},
        {"max_evaluations", o2.nelder_mead.max_evaluations},
        {"verify", o2.verify},
    };
  }
  if (c.fields) {
    json d = json::array();
    for (Eigen::Index i = 0; i < 3; ++i) {
      json row = json::array();
      for (Eigen::Index k = 0; k < 6; ++k) row.push_back(c.fields->piezo(i, k));
      d.push_back(row);
    }
    out["fields"] = {{"grid", c.fields->grid},
                     {"chi_hz", c.fields->chi_hz},
                     {"phi_deg", c.fields->phi_deg},
                     {"profile_axis", c.fields->profile_axis},
                     {"piezo_tensor", d}};
  }
  return out;
}

std::array<std::size_t, kSubsystemCount> parse_dims(const std::string& text) {
  std::stringstream in(text);
  std::string item;
  json arr = json::array();
  while (std::getline(in, item, ',')) {
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      arr.push_back(v);
    } catch (const std::exception&) {
      throw ParseError("--dims: '" + item + "' is not an integer");
    }
  }
  return dims_from(arr, "--dims");
}

}  // namespace transduce
