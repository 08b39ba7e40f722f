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

#include "transduce/errors.hpp"
#include "transduce/sweep.hpp"

namespace {

using namespace transduce;

TransducerParams small_params() {
  TransducerParams p = default_params();
  p.dims = {2, 2, 2, 2};
  return p;
}

SweepSpec small_spec() {
  SweepSpec s;
  s.base = small_params();
  s.options.check_truncation = false;
  return s;
}

TEST(Knobs, HzAndAngularAndDerived) {
  TransducerParams p = default_params();
  apply_knob(p, "g_m_e_hz", 10e6);
  EXPECT_NEAR(p.g_m_e, kTwoPi * 10e6, 1e-6);
  EXPECT_NEAR(knob_value(p, "parameters.g_m_e_hz"), 10e6, 1e-6);
  apply_knob(p, "g_m_e", 5.0);
  EXPECT_EQ(p.g_m_e, 5.0);
  apply_knob(p, "Q_m", 2.2e5);
  EXPECT_NEAR(p.gamma_m, p.omega_m / 2.2e5, 1e-9);
  apply_knob(p, "Q_opt", 6000);
  EXPECT_DOUBLE_EQ(p.gamma_wg, p.gamma_opt);
  apply_knob(p, "T2_star", 10e-9);
  EXPECT_DOUBLE_EQ(p.gamma_dephasing, 1e8);
  apply_knob(p, "T2_star_s", HUGE_VAL);
  EXPECT_EQ(p.gamma_dephasing, 0.0);
  EXPECT_FALSE(is_knob("warp_factor"));
  EXPECT_THROW(apply_knob(p, "warp_factor", 1.0), InvalidArgument);
  for (const auto& k : knob_names()) EXPECT_TRUE(is_knob(k)) << k;
}

TEST(Grids, LinearAndLog) {
  const auto lin = linear_grid(1.0, 2.0, 5);
  ASSERT_EQ(lin.size(), 5u);
  EXPECT_DOUBLE_EQ(lin[2], 1.5);
  EXPECT_DOUBLE_EQ(lin.back(), 2.0);
  const auto lg = log_grid(1e4, 1e6, 3);
  EXPECT_NEAR(lg[1], 1e5, 1e-6);
  EXPECT_NEAR(lg[2], 1e6, 1e-6);
  EXPECT_THROW(log_grid(0.0, 1.0, 3), InvalidArgument);
}

TEST(Sweep, SinglePointEqualsDirectRun) {
  SweepSpec s = small_spec();
  s.axes = {{"g_MW_m_hz", {0.3e6}}};
  const SweepResult r = sweep(s);
  ASSERT_EQ(r.points.size(), 1u);
  ASSERT_TRUE(r.points[0].ok);
  const EfficiencyResult direct = run_conversion(s.base, s.options);
  EXPECT_EQ(r.points[0].result.eta_pop, direct.eta_pop);
  EXPECT_EQ(r.points[0].result.eta_coh, direct.eta_coh);
}

TEST(Sweep, DephasingAxis) {
  SweepSpec s = small_spec();
  s.axes = {{"T2_star", {1e-9, 10e-9, 100e-9, 1000e-9}, GridScale::Log}};
  const SweepResult r = sweep(s);
  ASSERT_EQ(r.failures(), 0u);
  for (std::size_t i = 1; i < r.points.size(); ++i) {
    EXPECT_GT(r.points[i].result.eta_coh, r.points[i - 1].result.eta_coh);
    EXPECT_GE(r.points[i].result.eta_pop, r.points[i - 1].result.eta_pop);
  }
  for (const auto& pt : r.points) EXPECT_LE(pt.result.eta_coh, pt.result.eta_pop);
  // Past ~10 ns the electron linewidth is no longer dephasing-limited.
  EXPECT_NEAR(r.points[1].result.eta_pop, r.points[3].result.eta_pop,
              0.1 * r.points[3].result.eta_pop);
}

TEST(Sweep, QualityGridMonotone) {
  SweepSpec s = small_spec();
  s.axes = {{"Q_MW", log_grid(1e4, 1e6, 4), GridScale::Log},
            {"Q_m", log_grid(1e3, 1e5, 4), GridScale::Log}};
  const SweepResult r = sweep(s, 2);
  ASSERT_EQ(r.shape, (std::vector<std::size_t>{4, 4}));
  ASSERT_EQ(r.failures(), 0u);
  const auto at = [&](std::size_t i, std::size_t j) { return r.points[4 * i + j].result.eta_pop; };
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_DOUBLE_EQ(r.points[4 * i + j].coordinates[0], s.axes[0].values[i]);
      EXPECT_DOUBLE_EQ(r.points[4 * i + j].coordinates[1], s.axes[1].values[j]);
      if (i > 0) {
        EXPECT_GE(at(i, j), at(i - 1, j));
      }
      if (j > 0) {
        EXPECT_GE(at(i, j), at(i, j - 1));
      }
    }
  }
}

TEST(Sweep, ThreadCountDoesNotChangeResults) {
  SweepSpec s = small_spec();
  s.axes = {{"g_e_opt_hz", {0.5e9, 1e9, 2e9}}};
  const SweepResult one = sweep(s, 1);
  const SweepResult three = sweep(s, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(one.points[i].result.eta_pop, three.points[i].result.eta_pop);
  }
}

TEST(Sweep, FailuresAreRecorded) {
  SweepSpec s = small_spec();
  s.options.run.horizon = 2e-6;
  s.axes = {{"Q_MW", {1e3, 1e7}}};
  const SweepResult r = sweep(s);
  EXPECT_TRUE(r.points[0].ok);
  EXPECT_FALSE(r.points[1].ok);
  EXPECT_FALSE(r.points[1].error.empty());
  EXPECT_DOUBLE_EQ(r.success_fraction(), 0.5);
}

TEST(Sweep, ValidateRejects) {
  SweepSpec s = small_spec();
  s.axes = {{"bogus", {1.0}}};
  EXPECT_THROW(s.validate(), InvalidArgument);
  s.axes = {{"Q_m", {}}};
  EXPECT_THROW(s.validate(), InvalidArgument);
  s.axes = {{"Q_m", {1.0}}, {"Q_MW", {1.0}}, {"g_m_e", {1.0}}};
  EXPECT_THROW(s.validate(), InvalidArgument);
}

TEST(NelderMead, Quadratic) {
  const auto r = nelder_mead([](const std::vector<double>& x) { return (x[0] - 3) * (x[0] - 3); },
                             {0.0});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x_best[0], 3.0, 1e-6);
  EXPECT_FALSE(r.trace.empty());
}

TEST(NelderMead, Rosenbrock) {
  const auto f = [](const std::vector<double>& x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  const auto r = nelder_mead(f, {-1.2, 1.0});
  EXPECT_NEAR(r.x_best[0], 1.0, 1e-4);
  EXPECT_NEAR(r.x_best[1], 1.0, 1e-4);
  EXPECT_LT(r.f_best, 1e-8);
  EXPECT_LE(r.evaluations, NelderMeadOptions{}.max_evaluations);
}

TEST(NelderMead, NanIsTreatedAsWorst) {
  const auto f = [](const std::vector<double>& x) {
    return x[0] < 0.0 ? std::nan("") : (x[0] - 1) * (x[0] - 1);
  };
  const auto r = nelder_mead(f, {0.5});
  EXPECT_NEAR(r.x_best[0], 1.0, 1e-6);
}

TEST(NelderMead, EvaluationBudget) {
  NelderMeadOptions o;
  o.max_evaluations = 20;
  const auto r = nelder_mead(
      [](const std::vector<double>& x) { return std::pow(x[0] - 100.0, 2) + x[1] * x[1]; },
      {0.0, 1.0}, o);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.evaluations, 20u);
}

TEST(Optimize, ImprovesOnBaseline) {
  OptimizeSpec s;
  s.base = small_params();
  s.options.check_truncation = false;
  s.knobs = {"omega_rabi", "delta_opt"};
  s.nelder_mead.max_evaluations = 60;
  const OptimizeResult r = optimize(s);
  EXPECT_GE(r.objective_best, r.objective_baseline);
  ASSERT_TRUE(r.verified);
  EXPECT_GE(r.best_result.eta_pop, r.baseline_result.eta_pop);
  EXPECT_EQ(r.knob_values.size(), 2u);
}

}  // namespace
