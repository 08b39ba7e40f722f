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

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "transduce/commands.hpp"
#include "transduce/config.hpp"
#include "transduce/errors.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::size_t> threads;
  std::string engine;
  std::string dims;
  std::optional<long long> seed;  // reserved: every engine is deterministic
};

void add_common(CLI::App* sub, CommonFlags& f, bool config_required) {
  auto* opt = sub->add_option("--config", f.config, "JSON configuration file");
  if (config_required) opt->required();
  sub->add_option("--out", f.out, "output directory (overrides output.dir)");
  sub->add_option("--threads", f.threads, "worker threads (fallback: TRANSDUCTION_THREADS)");
  sub->add_option("--engine", f.engine, "expm or rk");
  sub->add_option("--dims", f.dims, "truncation a,b,c,d (electron must be 2)");
  sub->add_option("--seed", f.seed, "reserved");
}

std::size_t resolve_threads(const CommonFlags& f, const transduce::RunConfig& c) {
  if (f.threads) return *f.threads == 0 ? 1 : *f.threads;
  if (const char* env = std::getenv("TRANSDUCTION_THREADS")) {
    try {
      const long n = std::stol(env);
      if (n > 0) return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
    }
    throw transduce::ParseError(std::string("TRANSDUCTION_THREADS must be a positive integer, got '") +
                                env + "'");
  }
  if (c.sweep && c.sweep->threads > 0) return c.sweep->threads;
  return 1;
}

transduce::CommandContext make_context(const CommonFlags& f) {
  transduce::CommandContext ctx;
  if (!f.config.empty()) ctx.config = transduce::load_config(f.config);
  if (!f.engine.empty()) ctx.config.conversion.run.engine = transduce::parse_engine(f.engine);
  if (!f.dims.empty()) {
    ctx.config.params.dims = transduce::parse_dims(f.dims);
    ctx.config.params.validate();
  }
  ctx.out_dir = f.out;
  ctx.threads = resolve_threads(f, ctx.config);
  return ctx;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Microwave-to-optical transduction simulator"};
  app.set_version_flag("--version", std::string(TRANSDUCE_VERSION));
  app.require_subcommand(1);

  CommonFlags flags;
  std::string grid;
  std::string task;
  std::string csv;
  std::string kind = "auto";
  std::string svg_out;

  auto* simulate = app.add_subcommand("simulate", "time-evolve the baseline and report efficiencies");
  add_common(simulate, flags, true);
  auto* sweep = app.add_subcommand("sweep", "efficiency over a parameter grid");
  add_common(sweep, flags, true);
  auto* optimize = app.add_subcommand("optimize", "Nelder-Mead search over parameter knobs");
  add_common(optimize, flags, true);
  auto* fields = app.add_subcommand("fields", "mode volumes, mass and couplings from a field grid");
  add_common(fields, flags, false);
  fields->add_option("task", task, "volumes | mass | gmap | piezo | wavelengths")->required();
  fields->add_option("--grid", grid, "field grid file (default: fields.grid)");
  auto* check = app.add_subcommand("check", "modulation window and derived rates");
  add_common(check, flags, false);
  check->add_option("--grid", grid, "field grid file for Lambda and x_zpf");
  auto* plot = app.add_subcommand("plot", "render a trajectory or sweep CSV as SVG");
  plot->add_option("csv", csv, "input CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--kind", kind, "auto | populations | line | heatmap");
  plot->add_option("-o,--output", svg_out, "output SVG (default: input with .svg)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : transduce::kExitConfig;
  }

  return transduce::run_guarded(
      [&]() -> int {
        if (plot->parsed()) {
          std::string target = svg_out;
          if (target.empty()) {
            const auto dot = csv.find_last_of('.');
            target = (dot == std::string::npos ? csv : csv.substr(0, dot)) + ".svg";
          }
          return transduce::cmd_plot(csv, kind, target);
        }
        const transduce::CommandContext ctx = make_context(flags);
        if (simulate->parsed()) return transduce::cmd_simulate(ctx);
        if (sweep->parsed()) return transduce::cmd_sweep(ctx);
        if (optimize->parsed()) return transduce::cmd_optimize(ctx);
        if (fields->parsed()) return transduce::cmd_fields(ctx, grid, task);
        return transduce::cmd_check(ctx, grid);
      },
      std::cerr);
}
