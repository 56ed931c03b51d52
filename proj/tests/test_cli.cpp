#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "experiments.hpp"
#include "scenario.hpp"
#include "svg_plot.hpp"
#include "table.hpp"

using namespace echolab;
using namespace echolab::cli;
using nlohmann::json;

namespace {

json minimal_fidelity() {
  return json::parse(R"({
    "experiment": "fidelity",
    "model": {"name": "harmonic", "param": 1.0},
    "perturbation": {"name": "linear_q", "delta": 0.05},
    "z0": [1.0, 0.0],
    "hbar": 0.02,
    "times": {"t_max": 2.0, "n_samples": 8},
    "oracle": {"n_points": 1024, "q_min": -4.0, "q_max": 4.0, "dt": 2e-4},
    "output": {"table": "cli_test_fidelity.csv"}
  })");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("scenario parsing accepts a full document and resolves models") {
  const Scenario s = parse_scenario(minimal_fidelity());
  CHECK(s.experiment == ExperimentKind::fidelity);
  CHECK(s.hbars.size() == 1);
  CHECK(s.times.size() == 9);
  CHECK(s.model0().name == "harmonic");
  CHECK(s.model_delta().value(phase_point(1.0, 0.0)) ==
        doctest::Approx(0.5 + 0.05 * 1.0));
}

TEST_CASE("scenario validation: unknown keys are errors at every level") {
  auto doc = minimal_fidelity();
  doc["typo_field"] = 1;
  CHECK_THROWS_AS(static_cast<void>(parse_scenario(doc)), Error);

  doc = minimal_fidelity();
  doc["model"]["omega"] = 2.0;  // must be "param"
  try {
    static_cast<void>(parse_scenario(doc));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code == ErrorCode::validation);
    CHECK(std::string(e.what()).find("omega") != std::string::npos);
  }

  doc = minimal_fidelity();
  doc["oracle"]["dx"] = 0.1;
  CHECK_THROWS_AS(static_cast<void>(parse_scenario(doc)), Error);
}

TEST_CASE("scenario validation: numeric ranges checked before computation") {
  auto doc = minimal_fidelity();
  doc["hbar"] = -0.1;
  CHECK_THROWS_AS(static_cast<void>(parse_scenario(doc)), Error);

  doc = minimal_fidelity();
  doc["z0"] = {1.0};  // odd length
  CHECK_THROWS_AS(static_cast<void>(parse_scenario(doc)), Error);

  doc = minimal_fidelity();
  doc["times"] = {{"list", {0.0, 0.5, 0.5}}};  // not strictly increasing
  CHECK_THROWS_AS(static_cast<void>(parse_scenario(doc)), Error);

  doc = minimal_fidelity();
  doc["model"]["name"] = "no_such_model";
  CHECK_THROWS_AS(static_cast<void>(parse_scenario(doc)), Error);
}

TEST_CASE("table round trip with annotations and digest") {
  Table t;
  t.title = "echo-lab test table";
  t.columns = {"a", "b"};
  t.annotations.emplace_back("t_cl", "3.14");
  t.add_row({1.0, 2.0});
  t.add_row({0.25, -1e-9});
  write_table(t, "cli_test_roundtrip.csv", json{{"k", "v"}});

  const Table back = read_table("cli_test_roundtrip.csv");
  CHECK(back.columns == t.columns);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[1][1] == doctest::Approx(-1e-9).epsilon(1e-12));
  CHECK(back.annotation_number("t_cl") == doctest::Approx(3.14));

  // digest is deterministic for identical manifests
  CHECK(fnv1a_digest("echo") == fnv1a_digest("echo"));
  CHECK(fnv1a_digest("echo") != fnv1a_digest("echo2"));
}

TEST_CASE("run_scenario writes a deterministic table and manifest") {
  const Scenario s = parse_scenario(minimal_fidelity());
  RunOptions ro;
  CHECK(run_scenario(s, ro) == 0);
  const std::string first = slurp("cli_test_fidelity.csv");
  CHECK(run_scenario(s, ro) == 0);
  CHECK(first == slurp("cli_test_fidelity.csv"));  // bit-identical rerun

  const Table t = read_table("cli_test_fidelity.csv");
  CHECK(t.columns.size() == 6);
  CHECK(t.rows.size() == 9);
  for (const auto& row : t.rows) {
    CHECK(row[2] >= 0.0);
    CHECK(row[2] <= 1.0 + 1e-9);  // f_semi
    CHECK(std::abs(row[2] - row[3]) < 1e-6);  // quadratic pair: semi == exact
  }
  const std::string manifest = slurp("cli_test_fidelity.csv.manifest.json");
  CHECK(manifest.find("\"experiment\": \"fidelity\"") != std::string::npos);
  CHECK(manifest.find("\"version\": \"0.1.0\"") != std::string::npos);
}

TEST_CASE("run_scenario with an hbar sweep and jobs > 1 is order-stable") {
  auto doc = minimal_fidelity();
  doc["hbar"] = {0.05, 0.02};
  doc["output"]["table"] = "cli_test_sweep.csv";
  const Scenario s = parse_scenario(doc);
  RunOptions serial;
  CHECK(run_scenario(s, serial) == 0);
  const std::string one = slurp("cli_test_sweep.csv");
  RunOptions threaded;
  threaded.jobs = 2;
  CHECK(run_scenario(s, threaded) == 0);
  CHECK(one == slurp("cli_test_sweep.csv"));
}

TEST_CASE("convergence experiment fits a slope annotation") {
  auto doc = minimal_fidelity();
  doc["experiment"] = "convergence";
  doc["hbar"] = {0.08, 0.02};
  doc["times"] = {{"t_max", 1.0}, {"n_samples", 6}};
  doc["output"]["table"] = "cli_test_conv_run.csv";
  const Scenario s = parse_scenario(doc);
  CHECK(run_scenario(s, RunOptions{}) == 0);
  const Table t = read_table("cli_test_conv_run.csv");
  CHECK(t.rows.size() == 2);
  // quadratic pair: both errors at the oracle floor, slope annotation present
  for (const auto& [k, v] : t.annotations)
    if (k == "fitted-slope") CHECK(std::isfinite(std::stod(v)));
}

TEST_CASE("numerical failure keeps a marked partial table and returns 3") {
  auto doc = minimal_fidelity();
  // a domain far too small: the packet leaks and the oracle raises
  doc["oracle"]["q_min"] = -1.2;
  doc["oracle"]["q_max"] = 1.2;
  doc["oracle"]["n_points"] = 1024;
  doc["times"] = {{"t_max", 6.0}, {"n_samples", 12}};
  doc["z0"] = {0.0, 1.0};
  doc["output"]["table"] = "cli_test_fail.csv";
  const Scenario s = parse_scenario(doc);
  CHECK(run_scenario(s, RunOptions{}) == 3);
  const std::string text = slurp("cli_test_fail.csv");
  CHECK(text.find("# status: numerical-failure") != std::string::npos);
}

TEST_CASE("property suites pass and report five rows") {
  Table t;
  const bool ok = run_property_suites(t, 99, 120);
  CHECK(ok);
  CHECK(t.rows.size() == 5);
  for (const auto& row : t.rows) CHECK(row[4] == 1.0);
}

TEST_CASE("emit_plot smoke for the three kinds") {
  Table fidelity;
  fidelity.columns = {"hbar", "t", "f_semi", "f_exact", "abs_err", "ehrenfest_flag"};
  for (int k = 0; k <= 10; ++k) {
    const double t = 0.3 * k;
    fidelity.add_row({0.01, t, std::exp(-0.1 * t), std::exp(-0.1 * t) + 1e-3, 1e-3, 0.0});
  }
  emit_plot(fidelity, "fidelity", "cli_test_fid.svg");
  CHECK(slurp("cli_test_fid.svg").substr(0, 4) == "<svg");

  Table rho;
  rho.columns = {"t", "rho_exact", "rho_a2", "rho_poisson", "segment"};
  rho.annotations.emplace_back("t_cl", "1.0");
  rho.annotations.emplace_back("collapse-window", "2.0 3.0");
  rho.annotations.emplace_back("revival-peak-index", "4");
  for (int k = 0; k <= 10; ++k)
    rho.add_row({0.5 * k, 0.5 + 0.5 * std::cos(k), 0.5, 0.4, 0.0});
  emit_plot(rho, "rho", "cli_test_rho.svg");
  CHECK(slurp("cli_test_rho.svg").find("orange") != std::string::npos);
  CHECK(slurp("cli_test_rho.svg").find("revival") != std::string::npos);

  Table conv;
  conv.columns = {"hbar", "max_err"};
  for (double h : {0.1, 0.05, 0.025})
    conv.add_row({h, 0.3 * std::sqrt(h)});
  emit_plot(conv, "convergence", "cli_test_conv.svg");
  CHECK(slurp("cli_test_conv.svg").find("slope") != std::string::npos);

  CHECK_THROWS_AS(emit_plot(conv, "no_such_kind", "x.svg"), Error);
  try {
    emit_plot(conv, "rho", "x.svg");  // convergence table lacks rho columns
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code == ErrorCode::format);
  }
}

TEST_CASE("offpeak sampler respects the window and avoids recurrences") {
  const auto ts = offpeak_window_samples(100.0, 160.0, 3.7, 20);
  CHECK(ts.size() == 20);
  for (double t : ts) {
    CHECK(t >= 100.0);
    CHECK(t <= 160.0);
    const double frac = t / 3.7 - std::floor(t / 3.7);
    CHECK(frac >= 0.34);
    CHECK(frac <= 0.66);
  }
}

TEST_SUITE_END();
