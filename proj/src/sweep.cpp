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

#include "transduce/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "transduce/errors.hpp"

namespace transduce {

namespace {

struct Knob {
  const char* name;
  std::function<void(TransducerParams&, double)> set;
  std::function<double(const TransducerParams&)> get;
};

Knob angular(const char* name, double TransducerParams::*field) {
  return {name, [field](TransducerParams& p, double v) { p.*field = v; },
          [field](const TransducerParams& p) { return p.*field; }};
}

Knob hertz(const char* name, double TransducerParams::*field) {
  return {name, [field](TransducerParams& p, double v) { p.*field = kTwoPi * v; },
          [field](const TransducerParams& p) { return p.*field / kTwoPi; }};
}

const std::vector<Knob>& knob_table() {
  static const std::vector<Knob> table = [] {
    using P = TransducerParams;
    std::vector<Knob> t = {
        angular("omega_mw", &P::omega_mw),     angular("omega_m", &P::omega_m),
        angular("delta_e", &P::delta_e),       angular("delta_opt", &P::delta_opt),
        angular("omega_rabi", &P::omega_rabi), angular("g_mw_m", &P::g_mw_m),
        angular("g_m_e", &P::g_m_e),           angular("g_e_opt", &P::g_e_opt),
        angular("gamma_mw", &P::gamma_mw),     angular("gamma_m", &P::gamma_m),
        angular("gamma_e", &P::gamma_e),       angular("gamma_opt", &P::gamma_opt),
        angular("gamma_wg", &P::gamma_wg),     angular("gamma_dephasing", &P::gamma_dephasing),
        angular("omega_opt", &P::omega_opt),
        hertz("nu_MW_hz", &P::omega_mw),       hertz("nu_m_hz", &P::omega_m),
        hertz("delta_e_hz", &P::delta_e),      hertz("delta_opt_hz", &P::delta_opt),
        hertz("rabi_hz", &P::omega_rabi),      hertz("g_MW_m_hz", &P::g_mw_m),
        hertz("g_m_e_hz", &P::g_m_e),          hertz("g_e_opt_hz", &P::g_e_opt),
        hertz("gamma_MW_hz", &P::gamma_mw),    hertz("gamma_m_hz", &P::gamma_m),
        hertz("gamma_e_hz", &P::gamma_e),      hertz("gamma_opt_hz", &P::gamma_opt),
        hertz("gamma_wg_hz", &P::gamma_wg),    hertz("nu_opt_hz", &P::omega_opt),
    };
    t.push_back({"Q_MW",
                 [](P& p, double q) { p.gamma_mw = quality_to_rate(p.omega_mw, q); },
                 [](const P& p) { return p.omega_mw / p.gamma_mw; }});
    t.push_back({"Q_m", [](P& p, double q) { p.gamma_m = quality_to_rate(p.omega_m, q); },
                 [](const P& p) { return p.omega_m / p.gamma_m; }});
    t.push_back({"Q_opt",
                 [](P& p, double q) {
                   p.gamma_opt = quality_to_rate(p.omega_opt, q);
                   p.gamma_wg = p.gamma_opt;
                 },
                 [](const P& p) { return p.omega_opt / p.gamma_opt; }});
    const auto set_t2 = [](P& p, double t2) {
      if (!(t2 > 0.0)) throw InvalidArgument("T2_star must be positive");
      p.gamma_dephasing = std::isinf(t2) ? 0.0 : 1.0 / t2;
    };
    const auto get_t2 = [](const P& p) {
      return p.gamma_dephasing == 0.0 ? std::numeric_limits<double>::infinity()
                                      : 1.0 / p.gamma_dephasing;
    };
    t.push_back({"T2_star", set_t2, get_t2});
    t.push_back({"T2_star_s", set_t2, get_t2});
    t.push_back({"alpha", [](P& p, double a) { p.alpha = Complex(a, 0.0); },
                 [](const P& p) { return p.alpha.real(); }});
    return t;
  }();
  return table;
}

const Knob* find_knob(const std::string& raw) {
  const std::string prefix = "parameters.";
  const std::string name = raw.rfind(prefix, 0) == 0 ? raw.substr(prefix.size()) : raw;
  for (const auto& k : knob_table()) {
    if (name == k.name) return &k;
  }
  return nullptr;
}

const Knob& require_knob(const std::string& name) {
  const Knob* k = find_knob(name);
  if (k == nullptr) throw InvalidArgument("unknown sweep/optimize knob '" + name + "'");
  return *k;
}

void check_monotone(const SweepAxis& axis) {
  if (axis.values.empty()) {
    throw InvalidArgument("sweep axis '" + axis.name + "' has no grid points");
  }
  bool up = true;
  bool down = true;
  for (std::size_t i = 0; i < axis.values.size(); ++i) {
    if (!std::isfinite(axis.values[i]) && axis.name.find("T2_star") == std::string::npos) {
      throw InvalidArgument("sweep axis '" + axis.name + "' has a non-finite grid point");
    }
    if (i == 0) continue;
    up = up && axis.values[i] > axis.values[i - 1];
    down = down && axis.values[i] < axis.values[i - 1];
  }
  if (!up && !down) {
    throw InvalidArgument("sweep axis '" + axis.name + "' is not strictly monotone");
  }
}

}  // namespace

bool is_knob(const std::string& name) { return find_knob(name) != nullptr; }

void apply_knob(TransducerParams& p, const std::string& name, double value) {
  require_knob(name).set(p, value);
}

double knob_value(const TransducerParams& p, const std::string& name) {
  return require_knob(name).get(p);
}

std::vector<std::string> knob_names() {
  std::vector<std::string> out;
  for (const auto& k : knob_table()) out.emplace_back(k.name);
  return out;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  if (n == 0) throw InvalidArgument("linear_grid: need at least one point");
  if (n == 1) return {lo};
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back() = hi;
  return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > 0.0)) throw InvalidArgument("log_grid: bounds must be positive");
  std::vector<double> out = linear_grid(std::log10(lo), std::log10(hi), n);
  for (double& v : out) v = std::pow(10.0, v);
  out.front() = lo;
  if (n > 1) out.back() = hi;
  return out;
}

void SweepSpec::validate() const {
  if (axes.empty() || axes.size() > 2) {
    throw InvalidArgument("sweep: expected one or two axes, got " + std::to_string(axes.size()));
  }
  for (const auto& axis : axes) {
    require_knob(axis.name);
    check_monotone(axis);
  }
  if (axes.size() == 2 && require_knob(axes[0].name).name == require_knob(axes[1].name).name) {
    throw InvalidArgument("sweep: both axes name the same knob");
  }
}

std::size_t SweepSpec::point_count() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.values.size();
  return n;
}

std::size_t SweepResult::failures() const {
  return static_cast<std::size_t>(
      std::count_if(points.begin(), points.end(), [](const SweepPoint& p) { return !p.ok; }));
}

double SweepResult::success_fraction() const {
  if (points.empty()) return 0.0;
  return 1.0 - static_cast<double>(failures()) / static_cast<double>(points.size());
}

TransducerParams sweep_point_params(const SweepSpec& spec, std::size_t index,
                                    std::vector<double>* coordinates) {
  TransducerParams p = spec.base;
  std::vector<double> coords(spec.axes.size());
  std::size_t rest = index;
  for (std::size_t a = spec.axes.size(); a-- > 0;) {
    const auto& values = spec.axes[a].values;
    coords[a] = values[rest % values.size()];
    rest /= values.size();
  }
  for (std::size_t a = 0; a < spec.axes.size(); ++a) apply_knob(p, spec.axes[a].name, coords[a]);
  if (coordinates != nullptr) *coordinates = coords;
  return p;
}

SweepResult sweep(const SweepSpec& spec, std::size_t threads) {
  spec.validate();
  SweepResult result;
  for (const auto& a : spec.axes) {
    result.axis_names.push_back(a.name);
    result.shape.push_back(a.values.size());
  }
  const std::size_t n = spec.point_count();
  result.points.resize(n);

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      SweepPoint& point = result.points[i];
      try {
        const TransducerParams p = sweep_point_params(spec, i, &point.coordinates);
        point.result = run_conversion(p, spec.options);
        point.ok = true;
      } catch (const std::exception& e) {
        point.ok = false;
        point.error = e.what();
      }
      if (point.coordinates.empty()) {
        std::size_t rest = i;
        point.coordinates.resize(spec.axes.size());
        for (std::size_t a = spec.axes.size(); a-- > 0;) {
          point.coordinates[a] = spec.axes[a].values[rest % spec.axes[a].values.size()];
          rest /= spec.axes[a].values.size();
        }
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, n);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return result;
}

NelderMeadResult nelder_mead(const Objective& f, const std::vector<double>& x0,
                             const NelderMeadOptions& options) {
  const std::size_t n = x0.size();
  if (n == 0) throw InvalidArgument("nelder_mead: dimension must be at least 1");
  for (double v : x0) {
    if (!std::isfinite(v)) throw InvalidArgument("nelder_mead: x0 must be finite");
  }
  if (!options.initial_step.empty() && options.initial_step.size() != n) {
    throw InvalidArgument("nelder_mead: initial_step size does not match x0");
  }

  NelderMeadResult res;
  std::vector<double> best_x = x0;
  double best_f = std::numeric_limits<double>::infinity();
  struct BudgetExhausted {};
  const auto eval = [&](const std::vector<double>& x) {
    if (res.evaluations >= options.max_evaluations) throw BudgetExhausted{};
    ++res.evaluations;
    double v = f(x);
    if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
    if (v < best_f) {
      best_f = v;
      best_x = x;
    }
    return v;
  };

  if (options.max_evaluations < n + 1) {
    throw InvalidArgument("nelder_mead: max_evaluations cannot cover the initial simplex");
  }

  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    double step = options.initial_step.empty()
                      ? (x0[i] != 0.0 ? 0.05 * x0[i] : 0.00025)
                      : options.initial_step[i];
    if (step == 0.0) throw InvalidArgument("nelder_mead: zero initial step");
    simplex[i + 1][i] += step;
  }
  for (std::size_t i = 0; i <= n; ++i) {
    fv[i] = eval(simplex[i]);
    if (!std::isfinite(fv[i])) {
      throw InvalidArgument("nelder_mead: objective is not finite on the initial simplex");
    }
  }

  std::vector<std::size_t> order(n + 1);
  const auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> s(n + 1);
    std::vector<double> v(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      s[i] = simplex[order[i]];
      v[i] = fv[order[i]];
    }
    simplex.swap(s);
    fv.swap(v);
  };
  const auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        d = std::max(d, std::abs(simplex[i][j] - simplex[0][j]));
      }
    }
    return d;
  };
  const auto combine = [&](const std::vector<double>& a, const std::vector<double>& b, double t) {
    // a + t (b - a)
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = a[j] + t * (b[j] - a[j]);
    return out;
  };

  sort_simplex();
  std::string op = "init";
  while (true) {
    const double diam = diameter();
    const double spread = fv[n] - fv[0];
    res.trace.push_back({res.iterations, op, simplex[0], fv[0], diam});
    // Both tests must hold: two vertices straddling the minimum can tie in f
    // while the simplex is still wide.
    if (diam < options.xtol && spread < options.ftol) {
      res.converged = true;
      res.reason = "simplex diameter below xtol and spread below ftol";
      break;
    }
    if (res.iterations >= options.max_iterations) {
      res.reason = "maximum iterations reached";
      break;
    }
    if (res.evaluations >= options.max_evaluations) {
      res.reason = "maximum evaluations reached";
      break;
    }
    try {
      ++res.iterations;

      std::vector<double> centroid(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);
      }
      const std::vector<double> xr = combine(centroid, simplex[n], -1.0);
      const double fr = eval(xr);
      if (fr < fv[0]) {
        const std::vector<double> xe = combine(centroid, simplex[n], -2.0);
        const double fe = eval(xe);
        if (fe < fr) {
          simplex[n] = xe;
          fv[n] = fe;
          op = "expand";
        } else {
          simplex[n] = xr;
          fv[n] = fr;
          op = "reflect";
        }
      } else if (fr < fv[n - 1]) {
        simplex[n] = xr;
        fv[n] = fr;
        op = "reflect";
      } else {
        bool accepted = false;
        if (fr < fv[n]) {
          const std::vector<double> xc = combine(centroid, xr, 0.5);
          const double fc = eval(xc);
          if (fc <= fr) {
            simplex[n] = xc;
            fv[n] = fc;
            accepted = true;
            op = "contract-outside";
          }
        } else {
          const std::vector<double> xc = combine(centroid, simplex[n], 0.5);
          const double fc = eval(xc);
          if (fc < fv[n]) {
            simplex[n] = xc;
            fv[n] = fc;
            accepted = true;
            op = "contract-inside";
          }
        }
        if (!accepted) {
          for (std::size_t i = 1; i <= n; ++i) {
            simplex[i] = combine(simplex[0], simplex[i], 0.5);
            fv[i] = eval(simplex[i]);
          }
          op = "shrink";
        }
      }
    } catch (const BudgetExhausted&) {
      res.reason = "maximum evaluations reached";
      break;
    }
    sort_simplex();
  }

  res.x_best = best_x;
  res.f_best = best_f;
  return res;
}

OptimizeResult optimize(const OptimizeSpec& spec) {
  if (spec.knobs.empty()) throw InvalidArgument("optimize: no knobs given");
  spec.base.validate();
  std::vector<double> scale;
  for (const auto& k : spec.knobs) {
    const double v = knob_value(spec.base, k);
    if (!(v != 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("optimize: knob '" + k + "' must start at a finite nonzero value");
    }
    scale.push_back(v);
  }
  const auto params_at = [&](const std::vector<double>& y) {
    TransducerParams p = spec.base;
    for (std::size_t i = 0; i < y.size(); ++i) apply_knob(p, spec.knobs[i], y[i] * scale[i]);
    return p;
  };
  const auto efficiency_of = [&](const TransducerParams& p) {
    if (spec.objective == OptimizeObjective::Asymptotic) return eta_pop_asymptotic(p);
    ConversionOptions opts = spec.options;
    opts.check_truncation = false;
    opts.check_sampling = false;
    return run_conversion(p, opts).eta_pop;
  };
  const Objective objective = [&](const std::vector<double>& y) {
    try {
      const TransducerParams p = params_at(y);
      p.validate();
      return -efficiency_of(p);
    } catch (const InvalidArgument&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  OptimizeResult out;
  const std::vector<double> y0(spec.knobs.size(), 1.0);
  out.objective_baseline = efficiency_of(spec.base);
  out.search = nelder_mead(objective, y0, spec.nelder_mead);
  if (-out.search.f_best < out.objective_baseline) {
    out.search.x_best = y0;
    out.search.f_best = -out.objective_baseline;
  }
  out.best = params_at(out.search.x_best);
  out.objective_best = -out.search.f_best;
  for (std::size_t i = 0; i < scale.size(); ++i) {
    out.knob_values.push_back(out.search.x_best[i] * scale[i]);
  }
  if (spec.verify) {
    out.baseline_result = run_conversion(spec.base, spec.options);
    out.best_result = run_conversion(out.best, spec.options);
    out.verified = true;
  }
  return out;
}

}  // namespace transduce
