#include "scenario.hpp"

#include <fstream>
#include <set>

namespace echolab::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      fail(ErrorCode::validation, "scenario: unknown key '" + it.key() + "' in " + where);
}

double need_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number())
    fail(ErrorCode::validation, "scenario: " + where + " needs numeric '" + key + "'");
  return obj[key].get<double>();
}

}  // namespace

HamiltonianModel Scenario::model0() const { return model_by_name(model_name, model_param); }

HamiltonianModel Scenario::model_delta() const {
  if (perturbation_name == "none" || delta == 0.0) return model0();
  return perturbed_model(model0(), perturbation_by_name(perturbation_name), delta);
}

Scenario parse_scenario(const json& doc) {
  if (!doc.is_object()) fail(ErrorCode::validation, "scenario: document must be a JSON object");
  reject_unknown(doc, {"experiment", "model", "perturbation", "z0", "hbar", "times", "revival",
                       "oracle", "observable", "seed", "output"},
                 "top level");
  Scenario s;

  const std::string exp = doc.value("experiment", "");
  if (exp == "fidelity") s.experiment = ExperimentKind::fidelity;
  else if (exp == "return") s.experiment = ExperimentKind::return_prob;
  else if (exp == "revival") s.experiment = ExperimentKind::revival;
  else if (exp == "convergence") s.experiment = ExperimentKind::convergence;
  else if (exp == "egorov") s.experiment = ExperimentKind::egorov;
  else if (exp == "property-check") s.experiment = ExperimentKind::property_check;
  else fail(ErrorCode::validation, "scenario: unknown experiment '" + exp + "'");

  if (doc.contains("model")) {
    const json& m = doc["model"];
    reject_unknown(m, {"name", "param"}, "model");
    s.model_name = m.value("name", "harmonic");
    s.model_param = m.value("param", 1.0);
    static_cast<void>(model_by_name(s.model_name, s.model_param));  // name must resolve
  }
  if (doc.contains("perturbation")) {
    const json& p = doc["perturbation"];
    reject_unknown(p, {"name", "delta"}, "perturbation");
    s.perturbation_name = p.value("name", "linear_q");
    s.delta = p.value("delta", 0.0);
    if (s.perturbation_name != "none")
      static_cast<void>(perturbation_by_name(s.perturbation_name));
  }
  if (doc.contains("z0")) {
    const json& z = doc["z0"];
    if (!z.is_array() || z.size() % 2 != 0 || z.empty())
      fail(ErrorCode::validation, "scenario: z0 must be an even-length numeric array");
    s.z0.resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (!z[i].is_number()) fail(ErrorCode::validation, "scenario: z0 entries must be numbers");
      s.z0(static_cast<Eigen::Index>(i)) = z[i].get<double>();
    }
  }
  if (doc.contains("hbar")) {
    const json& h = doc["hbar"];
    s.hbars.clear();
    if (h.is_number()) s.hbars.push_back(h.get<double>());
    else if (h.is_array())
      for (const auto& v : h) {
        if (!v.is_number()) fail(ErrorCode::validation, "scenario: hbar entries must be numbers");
        s.hbars.push_back(v.get<double>());
      }
    else fail(ErrorCode::validation, "scenario: hbar must be a number or array");
    for (double v : s.hbars)
      if (!(v > 0.0)) fail(ErrorCode::validation, "scenario: hbar values must be positive");
    if (s.hbars.empty()) fail(ErrorCode::validation, "scenario: hbar list is empty");
  }
  if (doc.contains("times")) {
    const json& t = doc["times"];
    if (t.contains("list")) {
      reject_unknown(t, {"list"}, "times");
      for (const auto& v : t["list"]) {
        if (!v.is_number()) fail(ErrorCode::validation, "scenario: times.list must be numeric");
        s.times.push_back(v.get<double>());
      }
      if (s.times.empty() || s.times.front() != 0.0)
        fail(ErrorCode::validation, "scenario: times.list must start at 0");
      for (std::size_t i = 1; i < s.times.size(); ++i)
        if (s.times[i] <= s.times[i - 1])
          fail(ErrorCode::validation, "scenario: times.list must be strictly increasing");
      s.t_max = s.times.back();
    } else {
      reject_unknown(t, {"t_max", "n_samples"}, "times");
      s.t_max = need_number(t, "t_max", "times");
      const int n = static_cast<int>(t.value("n_samples", 100));
      if (s.t_max <= 0.0 || n < 1)
        fail(ErrorCode::validation, "scenario: times needs t_max > 0 and n_samples >= 1");
      s.times = uniform_times(s.t_max, n);
    }
  } else {
    s.times = uniform_times(s.t_max, 100);
  }
  if (doc.contains("revival")) {
    const json& r = doc["revival"];
    reject_unknown(r,
                   {"theta", "theta_prime", "center_energy", "ladder", "window", "coefficients",
                    "delta1", "delta2", "early_samples", "collapse_samples", "revival_samples"},
                   "revival");
    s.revival.theta = r.value("theta", 0.8);
    s.revival.theta_prime = r.value("theta_prime", 0.4);
    s.revival.center_energy = r.value("center_energy", 1.0);
    s.revival.ladder = r.value("ladder", "grid");
    if (s.revival.ladder != "grid" && s.revival.ladder != "bohr_sommerfeld")
      fail(ErrorCode::validation, "scenario: revival.ladder must be grid or bohr_sommerfeld");
    if (r.contains("window")) {
      const json& w = r["window"];
      if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number())
        fail(ErrorCode::validation, "scenario: revival.window must be [lo, hi]");
      s.revival.window = {w[0].get<double>(), w[1].get<double>()};
    }
    const std::string form = r.value("coefficients", "index_gaussian");
    if (form == "index_gaussian") s.revival.coefficients = CoeffForm::index_gaussian;
    else if (form == "energy_cutoff") s.revival.coefficients = CoeffForm::energy_cutoff;
    else fail(ErrorCode::validation, "scenario: unknown revival.coefficients '" + form + "'");
    s.revival.delta1 = r.value("delta1", 0.1);
    s.revival.delta2 = r.value("delta2", 0.1);
    s.revival.early_samples = static_cast<int>(r.value("early_samples", 200));
    s.revival.collapse_samples = static_cast<int>(r.value("collapse_samples", 20));
    s.revival.revival_samples = static_cast<int>(r.value("revival_samples", 201));
  }
  if (doc.contains("oracle")) {
    const json& o = doc["oracle"];
    reject_unknown(o, {"enabled", "n_points", "q_min", "q_max", "dt"}, "oracle");
    s.oracle.enabled = o.value("enabled", true);
    s.oracle.n_points = static_cast<int>(o.value("n_points", 2048));
    if (o.contains("q_min")) s.oracle.q_min = need_number(o, "q_min", "oracle");
    if (o.contains("q_max")) s.oracle.q_max = need_number(o, "q_max", "oracle");
    s.oracle.dt = o.value("dt", 1e-4);
    if (!(s.oracle.dt > 0.0)) fail(ErrorCode::validation, "scenario: oracle.dt must be positive");
  }
  if (doc.contains("observable")) {
    const json& ob = doc["observable"];
    reject_unknown(ob, {"name", "center", "width"}, "observable");
    s.observable.name = ob.value("name", "bump_q");
    if (s.observable.name != "bump_q" && s.observable.name != "h0")
      fail(ErrorCode::validation, "scenario: observable must be bump_q or h0");
    s.observable.center = ob.value("center", 0.5);
    s.observable.width = ob.value("width", 1.5);
    if (!(s.observable.width > 0.0))
      fail(ErrorCode::validation, "scenario: observable.width must be positive");
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned())
      fail(ErrorCode::validation, "scenario: seed must be a non-negative integer");
    s.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("output")) {
    const json& out = doc["output"];
    reject_unknown(out, {"table"}, "output");
    s.table_path = out.value("table", "table.csv");
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::validation, "scenario: cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(ErrorCode::format, std::string("scenario: JSON parse error: ") + e.what());
  }
  return parse_scenario(doc);
}

nlohmann::json Scenario::resolved() const {
  json j;
  switch (experiment) {
    case ExperimentKind::fidelity: j["experiment"] = "fidelity"; break;
    case ExperimentKind::return_prob: j["experiment"] = "return"; break;
    case ExperimentKind::revival: j["experiment"] = "revival"; break;
    case ExperimentKind::convergence: j["experiment"] = "convergence"; break;
    case ExperimentKind::egorov: j["experiment"] = "egorov"; break;
    case ExperimentKind::property_check: j["experiment"] = "property-check"; break;
  }
  j["model"] = {{"name", model_name}, {"param", model_param}};
  j["perturbation"] = {{"name", perturbation_name}, {"delta", delta}};
  j["z0"] = std::vector<double>(z0.data(), z0.data() + z0.size());
  j["hbar"] = hbars;
  j["times"] = {{"t_max", t_max}, {"count", times.size()}};
  j["oracle"] = {{"enabled", oracle.enabled},
                 {"n_points", oracle.n_points},
                 {"dt", oracle.dt}};
  if (oracle.q_min) j["oracle"]["q_min"] = *oracle.q_min;
  if (oracle.q_max) j["oracle"]["q_max"] = *oracle.q_max;
  if (experiment == ExperimentKind::revival) {
    j["revival"] = {{"theta", revival.theta},
                    {"theta_prime", revival.theta_prime},
                    {"center_energy", revival.center_energy},
                    {"ladder", revival.ladder},
                    {"window", {revival.window.first, revival.window.second}},
                    {"coefficients", revival.coefficients == CoeffForm::index_gaussian
                                         ? "index_gaussian"
                                         : "energy_cutoff"},
                    {"delta1", revival.delta1},
                    {"delta2", revival.delta2}};
  }
  if (experiment == ExperimentKind::egorov)
    j["observable"] = {{"name", observable.name},
                       {"center", observable.center},
                       {"width", observable.width}};
  j["seed"] = seed;
  j["output"] = {{"table", table_path}};
  return j;
}

}  // namespace echolab::cli
