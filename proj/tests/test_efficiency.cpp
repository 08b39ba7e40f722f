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

#include "transduce/efficiency.hpp"
#include "transduce/errors.hpp"

namespace {

using namespace transduce;

// Frozen from an independent dense Python implementation of the same master
// equation (scipy expm on the full Liouvillian, vacuum-subtracted flux).
constexpr double kSmallBaselineEtaPop = 0.1463;
constexpr double kAsymptoticEtaPop = 0.14631936533;  // dims (3,4,2,3) and (4,6,2,4)
constexpr double kSmallAsymptoticEtaPop = 0.14631884306;  // dims (2,2,2,2)

TransducerParams small_params() {
  TransducerParams p = default_params();
  p.dims = {2, 2, 2, 2};
  return p;
}

ConversionOptions fast_options() {
  ConversionOptions o;
  o.check_truncation = false;
  return o;
}

TEST(Efficiency, SmallBaseline) {
  const EfficiencyResult r = run_conversion(small_params(), fast_options());
  EXPECT_NEAR(r.eta_pop, kSmallBaselineEtaPop, 2e-4);
  EXPECT_GT(r.eta_pop, 0.12);
  EXPECT_LT(r.eta_pop, 0.18);
  EXPECT_NEAR(r.eta_coh, r.eta_pop, 0.01 * r.eta_pop);
  EXPECT_NEAR(r.n0, 0.01 / 1.01, 1e-15);
  EXPECT_NEAR(r.coherence0, 0.01 / (1.01 * 1.01), 1e-15);
  // The background correction is tiny but not zero.
  EXPECT_GT(r.eta_pop_raw, r.eta_pop);
  EXPECT_LT(r.eta_pop_raw - r.eta_pop, 1e-3);
}

TEST(Efficiency, AsymptoticMatchesOracle) {
  const TransducerParams p = default_params();
  EXPECT_NEAR(eta_pop_asymptotic(p), kAsymptoticEtaPop, 1e-8);
  TransducerParams q = p;
  EXPECT_EQ(enlarged_dims(p.dims), (std::array<std::size_t, 4>{6, 8, 2, 6}));
  q.dims = {4, 6, 2, 4};
  EXPECT_NEAR(eta_pop_asymptotic(q), kAsymptoticEtaPop, 1e-8);
}

TEST(Efficiency, AsymptoticMatchesTimeDomain) {
  const TransducerParams p = small_params();
  ConversionOptions o = fast_options();
  o.run.increment_tol = 1e-9;
  o.run.dt_sample = 0.25e-9;
  const EfficiencyResult r = run_conversion(p, o);
  EXPECT_NEAR(eta_pop_asymptotic(p), kSmallAsymptoticEtaPop, 1e-8);
  EXPECT_NEAR(eta_pop_asymptotic(p), r.eta_pop, 1e-7 * r.eta_pop);
}

TEST(Efficiency, NoPiezoCouplingNoOutput) {
  TransducerParams p = small_params();
  p.g_mw_m = 0.0;
  ConversionOptions o;
  const EfficiencyResult r = run_conversion(p, o);
  EXPECT_LT(std::abs(r.eta_pop), 1e-9);
  // The coherent measure carries no vacuum subtraction; the drive alone leaves
  // a ~5e-9 coherent optical response.
  EXPECT_LT(std::abs(r.eta_coh), 1e-7);
  EXPECT_LT(std::abs(r.eta_pop_asymptotic), 1e-9);
  EXPECT_TRUE(r.truncation_ok);
}

TEST(Efficiency, NoWaveguideNoOutput) {
  TransducerParams p = small_params();
  p.gamma_wg = 0.0;
  const EfficiencyResult r = run_conversion(p, fast_options());
  EXPECT_EQ(r.eta_pop, 0.0);
  EXPECT_EQ(r.eta_coh, 0.0);
}

TEST(Efficiency, DephasingSweepCoherent) {
  // Frozen at dims (2,2,2,2) from an independent dense propagation on a 3.9 ps grid over 8 us.
  const double t2[] = {1e-9, 3e-9, 10e-9, 30e-9, 100e-9, 1000e-9};
  const double coh[] = {0.020155, 0.059372, 0.106490, 0.130822, 0.141387, 0.145814};
  TransducerParams p = small_params();
  double last = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    p.gamma_dephasing = 1.0 / t2[i];
    const EfficiencyResult r = run_conversion(p, fast_options());
    EXPECT_NEAR(r.eta_coh, coh[i], 2e-4) << t2[i];
    EXPECT_GT(r.eta_coh, last);
    last = r.eta_coh;
  }
}

TEST(Efficiency, StrongDephasingKillsCoherence) {
  TransducerParams p = small_params();
  p.gamma_dephasing = 1e12;
  const EfficiencyResult r = run_conversion(p, fast_options());
  EXPECT_LT(r.eta_coh / r.eta_pop, 0.1);
  EXPECT_NEAR(r.eta_coh / r.eta_pop, 0.00941, 3e-4);
}

TEST(Efficiency, WeakDriveIndependence) {
  TransducerParams p = small_params();
  ConversionOptions o = fast_options();
  o.run.extra_alphas = {Complex(0.05, 0.0)};
  ConvergedRun run;
  const EfficiencyResult a = run_conversion(p, o, &run);
  const EfficiencyResult b = efficiencies(run, p, 1);
  EXPECT_NEAR(b.eta_pop, a.eta_pop, 0.01 * a.eta_pop);
  EXPECT_NEAR(b.eta_coh, a.eta_coh, 0.01 * a.eta_coh);
}

TEST(Efficiency, BetterMechanicsHelps) {
  TransducerParams p = small_params();
  const double base = run_conversion(p, fast_options()).eta_pop;
  p.gamma_m = quality_to_rate(p.omega_m, 2.2e5);
  EXPECT_GT(run_conversion(p, fast_options()).eta_pop, base);
}

TEST(Efficiency, ZeroAlphaIsUndefined) {
  TransducerParams p = small_params();
  p.alpha = Complex(0.0);
  EXPECT_THROW(run_conversion(p, fast_options()), UndefinedEfficiency);
  EXPECT_THROW(eta_pop_asymptotic(p), UndefinedEfficiency);
}

TEST(Efficiency, SamplingCheck) {
  ConversionOptions o = fast_options();
  o.check_sampling = true;
  const EfficiencyResult r = run_conversion(small_params(), o);
  EXPECT_TRUE(r.sampling_checked);
  EXPECT_TRUE(r.sampling_ok);
  EXPECT_LT(r.sampling_shift_pop, 1e-3);
}

TEST(Efficiency, TruncationCheckSmallDims) {
  const EfficiencyResult r = run_conversion(small_params());
  EXPECT_TRUE(r.truncation_checked);
  EXPECT_EQ(r.truncation_dims, (std::array<std::size_t, 4>{4, 4, 2, 4}));
  EXPECT_GT(r.eta_pop_asymptotic_enlarged, 0.14);
}

}  // namespace
