#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "echolab/flow.hpp"
#include "echolab/revivals.hpp"
#include "echolab/types.hpp"

namespace echolab::cli {

enum class ExperimentKind { fidelity, return_prob, revival, convergence, egorov, property_check };

struct OracleConfig {
  bool enabled = true;
  int n_points = 2048;
  std::optional<double> q_min, q_max;  // auto-sized when absent
  double dt = 1e-4;
};

struct RevivalConfig {
  double theta = 0.8;
  double theta_prime = 0.4;
  double center_energy = 1.0;
  std::string ladder = "grid";  // or "bohr_sommerfeld"
  std::pair<double, double> window{0.5, 1.5};
  CoeffForm coefficients = CoeffForm::index_gaussian;
  double delta1 = 0.1, delta2 = 0.1;
  int early_samples = 200;
  int collapse_samples = 20;
  int revival_samples = 201;
};

struct ObservableConfig {
  std::string name = "bump_q";
  double center = 0.5;
  double width = 1.5;
};

struct Scenario {
  ExperimentKind experiment = ExperimentKind::fidelity;
  std::string model_name = "harmonic";
  double model_param = 1.0;
  std::string perturbation_name = "linear_q";
  double delta = 0.0;
  PhaseVector z0 = phase_point(1.0, 0.0);
  std::vector<double> hbars{0.01};
  std::vector<double> times;  // resolved explicit list
  double t_max = 10.0;
  RevivalConfig revival;
  OracleConfig oracle;
  ObservableConfig observable;
  std::uint64_t seed = 1;
  std::string table_path = "table.csv";

  HamiltonianModel model0() const;
  HamiltonianModel model_delta() const;

  nlohmann::json resolved() const;  // full resolved configuration
};

/// Parses and validates a scenario JSON document. Unknown keys are errors.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);

}  // namespace echolab::cli
