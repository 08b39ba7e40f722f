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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "transduce/commands.hpp"
#include "transduce/config.hpp"
#include "transduce/errors.hpp"
#include "transduce/report.hpp"

namespace {

using namespace transduce;
using nlohmann::json;
namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("transduce_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

json small_config() {
  return json::parse(R"({
    "parameters": {"nu_MW_hz": 12.5e9, "nu_m_hz": 12.5e9, "Q_MW": 1e5, "Q_m": 2.2e4,
                   "Q_opt": 1.2e4, "T2_star_s": "inf", "alpha": 0.1},
    "engine": {"dims": [2, 2, 2, 2], "check_truncation": false}
  })");
}

CommandContext context(const json& j, const fs::path& out) {
  CommandContext ctx;
  ctx.config = parse_config(j);
  ctx.out_dir = out.string();
  static std::ostringstream sink;
  ctx.out = &sink;
  return ctx;
}

TEST(Config, DefaultsAndUnits) {
  const RunConfig c = parse_config(small_config());
  const TransducerParams d = default_params();
  EXPECT_EQ(c.params.dims, (std::array<std::size_t, 4>{2, 2, 2, 2}));
  EXPECT_NEAR(c.params.gamma_mw / kTwoPi, 125e3, 1e-6);
  EXPECT_DOUBLE_EQ(c.params.gamma_wg, c.params.gamma_opt);
  EXPECT_DOUBLE_EQ(c.params.g_m_e, d.g_m_e);
  EXPECT_EQ(c.params.gamma_dephasing, 0.0);
  json j = small_config();
  j["parameters"]["T2_star_s"] = 10e-9;
  j["parameters"]["g_m_e_hz"] = 8e6;
  j["parameters"]["alpha"] = {0.05, 0.02};
  const RunConfig e = parse_config(j);
  EXPECT_DOUBLE_EQ(e.params.gamma_dephasing, 1e8);
  EXPECT_NEAR(e.params.g_m_e, kTwoPi * 8e6, 1e-6);
  EXPECT_EQ(e.params.alpha, Complex(0.05, 0.02));
}

TEST(Config, RejectsUnknownAndConflicting) {
  json j = small_config();
  j["parameters"]["warp"] = 1;
  EXPECT_THROW(parse_config(j), ParseError);
  j = small_config();
  j["parameters"]["gamma_m_hz"] = 1e5;
  EXPECT_THROW(parse_config(j), ParseError);
  j = small_config();
  j["engine"]["engine"] = "euler";
  EXPECT_ANY_THROW(parse_config(j));
  j = small_config();
  j["engine"]["dims"] = {2, 2, 3, 2};
  EXPECT_ANY_THROW(parse_config(j));
  j = small_config();
  j["surprise"] = {};
  EXPECT_THROW(parse_config(j), ParseError);
  j = small_config();
  j["engine"]["substeps"] = 6;
  EXPECT_THROW(parse_config(j), ParseError);
  j["engine"]["substeps"] = 64;
  EXPECT_EQ(parse_config(j).conversion.run.substeps, 64u);
  EXPECT_EQ(parse_dims("3,4,2,3"), (std::array<std::size_t, 4>{3, 4, 2, 3}));
  EXPECT_ANY_THROW(parse_dims("3,4,2"));
}

TEST(Config, RoundTrip) {
  json j = small_config();
  j["sweep"] = {{"axes", {{{"name", "T2_star_s"}, {"values", {1e-9, "inf"}}}}}};
  j["optimize"] = {{"knobs", {"rabi_hz", "delta_opt_hz"}}};
  const RunConfig a = parse_config(j);
  const json once = to_json(a);
  EXPECT_EQ(to_json(parse_config(once)), once);
}

TEST(Commands, SimulateWritesDeterministicOutputs) {
  const fs::path out = scratch("simulate");
  CommandContext ctx = context(small_config(), out / "a");
  EXPECT_EQ(cmd_simulate(ctx), kExitOk);
  ctx.out_dir = (out / "b").string();
  EXPECT_EQ(cmd_simulate(ctx), kExitOk);
  const std::string csv = slurp(out / "a" / "trajectory.csv");
  EXPECT_EQ(csv, slurp(out / "b" / "trajectory.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "time_s,p_mw,p_m,p_e,p_opt,wg_cum,eta_pop_cum,eta_coh_cum");
  const json summary = json::parse(slurp(out / "a" / "summary.json"));
  for (const char* key : {"eta_pop", "eta_coh", "t_f", "dims", "engine", "convergence", "config",
                          "version"}) {
    EXPECT_TRUE(summary.contains(key)) << key;
  }
  EXPECT_NEAR(summary["eta_pop"].get<double>(), 0.1463, 2e-4);
  // The summary alone reproduces the run.
  const RunConfig again = parse_config(summary["config"]);
  EXPECT_EQ(to_json(again), summary["config"]);
  const CsvTable t = read_csv((out / "a" / "trajectory.csv").string());
  EXPECT_NEAR(t.numbers(t.column("eta_pop_cum")).back(), summary["eta_pop"].get<double>(), 1e-15);
  EXPECT_TRUE(fs::exists(out / "a" / "populations.svg"));
}

TEST(Commands, ZeroAlphaExitsWithConfigError) {
  json j = small_config();
  j["parameters"]["alpha"] = 0.0;
  const fs::path out = scratch("alpha0");
  std::ostringstream err;
  const int code = run_guarded([&] { return cmd_simulate(context(j, out)); }, err);
  EXPECT_EQ(code, kExitConfig);
  EXPECT_NE(err.str().find("undefined"), std::string::npos) << err.str();
}

TEST(Commands, ConvergenceFailureExitsTwo) {
  json j = small_config();
  j["engine"]["horizon_s"] = 50e-9;
  std::ostringstream err;
  EXPECT_EQ(run_guarded([&] { return cmd_simulate(context(j, scratch("horizon"))); }, err),
            kExitConvergence);
}

TEST(Commands, SweepOneAndTwoAxes) {
  json j = small_config();
  j["sweep"] = {{"axes", {{{"name", "T2_star_s"}, {"values", {1e-9, 1e-8, "inf"}},
                           {"scale", "log"}}}}};
  const fs::path out = scratch("sweep1");
  EXPECT_EQ(cmd_sweep(context(j, out)), kExitOk);
  const CsvTable t = read_csv((out / "sweep.csv").string());
  EXPECT_EQ(t.header, (std::vector<std::string>{"T2_star_s", "eta_pop", "eta_coh", "status"}));
  EXPECT_EQ(t.rows.size(), 3u);
  EXPECT_NE(slurp(out / "sweep.svg").find("<svg"), std::string::npos);

  j["sweep"] = {{"axes",
                 {{{"name", "Q_MW"}, {"values", {1e5, 1e6}}, {"scale", "log"}},
                  {{"name", "Q_m"}, {"values", {2.2e4, 2.2e5}}, {"scale", "log"}}}}};
  const fs::path out2 = scratch("sweep2");
  EXPECT_EQ(cmd_sweep(context(j, out2)), kExitOk);
  EXPECT_EQ(read_csv((out2 / "sweep.csv").string()).rows.size(), 4u);
  EXPECT_NE(slurp(out2 / "sweep.svg").find("<rect"), std::string::npos);
}

TEST(Commands, SweepWithoutBlockIsConfigError) {
  std::ostringstream err;
  EXPECT_EQ(run_guarded([&] { return cmd_sweep(context(small_config(), scratch("nosweep"))); },
                        err),
            kExitConfig);
}

TEST(Commands, OptimizeReport) {
  json j = small_config();
  j["optimize"] = {{"knobs", {"rabi_hz", "delta_opt_hz"}}, {"max_evaluations", 40}};
  const fs::path out = scratch("optimize");
  EXPECT_EQ(cmd_optimize(context(j, out)), kExitOk);
  const json r = json::parse(slurp(out / "optimize.json"));
  for (const char* key : {"x_best", "f_best", "evaluations", "trace", "config", "version"}) {
    EXPECT_TRUE(r.contains(key)) << key;
  }
}

TEST(Commands, FieldsAndCheck) {
  const fs::path out = scratch("fields");
  FieldGrid g = FieldGrid::zeros({4, 4, 4}, {1e-7, 1e-7, 1e-7});
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.displacement[i] = Vector3c(1e-12 * double(1 + i % 3), 0.0, 0.0);
    g.strain[i](0) = 1e-6 * double(i % 7);
    g.efield[i] = Vector3c(0.0, 0.0, 1.0 + double(i % 2));
    g.permittivity[i] = 9e-11;
    g.density[i] = 3255.0;
  }
  g.omega_m = kTwoPi * 12.5e9;
  g.youngs = 345e9;
  g.poisson = 0.24;
  g.wavelength = 637e-9;
  g.n_refr = 2.4;
  save_grid(g, (out / "grid.txt").string());
  CommandContext ctx = context(small_config(), out);
  for (const char* task : {"volumes", "mass", "gmap", "piezo", "wavelengths"}) {
    EXPECT_EQ(cmd_fields(ctx, (out / "grid.txt").string(), task), kExitOk) << task;
    EXPECT_TRUE(fs::exists(out / (std::string("fields_") + task + ".json"))) << task;
  }
  EXPECT_TRUE(fs::exists(out / "gmap_profile.csv"));
  EXPECT_THROW(cmd_fields(ctx, (out / "grid.txt").string(), "colour"), ParseError);

  EXPECT_EQ(cmd_check(ctx, (out / "grid.txt").string()), kExitOk);
  const json c = json::parse(slurp(out / "check.json"));
  EXPECT_TRUE(c["modulation_window_ok"].get<bool>());
  EXPECT_NEAR(c["rates"]["gamma_MW_hz"].get<double>(), 125e3, 1e-6);
  EXPECT_TRUE(c["grid"].contains("x_zpf_m"));
  EXPECT_TRUE(c["grid"].contains("lambda_p_m"));
}

TEST(Commands, PlotKinds) {
  const fs::path out = scratch("plot");
  write_text((out / "line.csv").string(), "g_m_e_hz,eta_pop,eta_coh,status\n1,0.1,0.09,ok\n"
                                           "2,0.2,0.19,ok\n3,nan,nan,error\n");
  EXPECT_EQ(cmd_plot((out / "line.csv").string(), "auto", (out / "line.svg").string()), kExitOk);
  EXPECT_NE(slurp(out / "line.svg").find("<path"), std::string::npos);
  write_text((out / "map.csv").string(),
             "Q_MW,Q_m,eta_pop,eta_coh,status\n1,1,0.1,0.1,ok\n1,2,0.2,0.2,ok\n"
             "2,1,0.3,0.3,ok\n2,2,nan,nan,error\n");
  EXPECT_EQ(cmd_plot((out / "map.csv").string(), "heatmap", (out / "map.svg").string()), kExitOk);
  EXPECT_THROW(cmd_plot((out / "map.csv").string(), "line", (out / "x.svg").string()), ParseError);
  EXPECT_THROW(cmd_plot((out / "map.csv").string(), "pie", (out / "x.svg").string()), ParseError);
}

TEST(Executable, ExitCodes) {
  const fs::path out = scratch("exe");
  json j = small_config();
  j["parameters"]["alpha"] = 0.0;
  write_text((out / "zero.json").string(), j.dump());
  const std::string exe = TRANSDUCE_EXE;
  const auto run = [&](const std::string& args) {
    const int status = std::system((exe + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  EXPECT_EQ(run("simulate --config " + (out / "zero.json").string() + " --out " + out.string()), 1);
  EXPECT_EQ(run("simulate --config /nonexistent.json"), 1);
  EXPECT_EQ(run("simulate"), 1);
  EXPECT_EQ(run("--version"), 0);
  EXPECT_EQ(run("check --out " + out.string()), 0);
}

}  // namespace
