#include <CLI11.hpp>
#include <cstdio>

#include "experiments.hpp"
#include "scenario.hpp"
#include "svg_plot.hpp"

using namespace echolab;
using namespace echolab::cli;

int main(int argc, char** argv) {
  CLI::App app{"echo-lab: semiclassical Loschmidt echo, return probability and revival studies"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir, table_path, kind = "fidelity", plot_out;
  RunOptions ro;
  std::uint64_t seed = 1;
  int samples = 1000;

  auto* run = app.add_subcommand("run", "execute a scenario file");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--jobs", ro.jobs, "concurrent sweep items")->check(CLI::PositiveNumber);
  run->add_flag("--deterministic", ro.deterministic, "force serial reduction order");
  run->add_option("--out", ro.out_dir, "output directory");

  auto* plot = app.add_subcommand("plot", "render a table as SVG");
  plot->add_option("table", table_path, "CSV table produced by run")->required();
  plot->add_option("--kind", kind, "rho | fidelity | convergence")->required();
  plot->add_option("--out", plot_out, "output SVG path (default <table>.svg)");

  auto* check = app.add_subcommand("check", "run the symplectic property suites");
  check->add_option("--seed", seed, "generator seed");
  check->add_option("--samples", samples, "samples per suite")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const Scenario s = load_scenario(scenario_path);
      const int status = run_scenario(s, ro);
      if (status != 0) std::fprintf(stderr, "echo-lab: numerical failure (partial output kept)\n");
      return status;
    }
    if (*plot) {
      const Table t = read_table(table_path);
      const std::string out = plot_out.empty() ? table_path + ".svg" : plot_out;
      emit_plot(t, kind, out);
      std::printf("wrote %s\n", out.c_str());
      return 0;
    }
    if (*check) {
      Table t;
      t.title = "echo-lab property-check table";
      const bool ok = run_property_suites(t, seed, samples);
      for (const auto& row : t.rows)
        std::printf("suite %d: samples=%d max_defect=%.3e tol=%.1e %s\n",
                    static_cast<int>(row[0]), static_cast<int>(row[1]), row[2], row[3],
                    row[4] > 0.5 ? "pass" : "FAIL");
      return ok ? 0 : 1;
    }
  } catch (const Error& e) {
    const bool validation = e.code == ErrorCode::validation || e.code == ErrorCode::format;
    std::fprintf(stderr, "echo-lab: %s\n", e.what());
    return validation ? 2 : 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "echo-lab: %s\n", e.what());
    return 3;
  }
  return 0;
}
