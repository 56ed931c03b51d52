#include "experiments.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <cmath>
#include <cstdio>
#include <random>
#include <thread>

#include "echolab/echo.hpp"
#include "echolab/oracle.hpp"

namespace echolab::cli {

namespace {

Grid1D scenario_grid(const Scenario& s, double hbar) {
  if (s.oracle.q_min && s.oracle.q_max) {
    Grid1D g;
    g.q_min = *s.oracle.q_min;
    g.q_max = *s.oracle.q_max;
    g.n_points = s.oracle.n_points;
    g.hbar = hbar;
    g.validate();
    return g;
  }
  Grid1D g0 = auto_grid(s.model0(), s.z0, s.times.back(), hbar, s.oracle.n_points);
  Grid1D gd = auto_grid(s.model_delta(), s.z0, s.times.back(), hbar, s.oracle.n_points);
  Grid1D g = g0;
  g.q_min = std::min(g0.q_min, gd.q_min);
  g.q_max = std::max(g0.q_max, gd.q_max);
  return g;
}

// Run fn(i) for i in [0, n) on up to `jobs` threads; exceptions are
// rethrown on the caller thread. Output ordering is the caller's concern
// (each item writes its own slot), so the tables stay bit-identical.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int k = 0; k < std::min(jobs, n); ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

double fitted_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(std::max(y[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void fidelity_like(const Scenario& s, const RunOptions& ro, Table& t, bool return_mode) {
  t.columns = {"hbar", "t", return_mode ? "r_semi" : "f_semi",
               return_mode ? "r_exact" : "f_exact", "abs_err", "ehrenfest_flag"};
  const auto h0 = s.model0();
  const auto hd = s.model_delta();
  const int nh = static_cast<int>(s.hbars.size());
  std::vector<EchoSeries> semi(nh), exact(nh);
  parallel_for(nh, ro.jobs, [&](int i) {
    const double hbar = s.hbars[i];
    semi[i] = return_mode ? return_amplitude(hd, s.z0, s.times, hbar)
                          : fidelity_leading(h0, hd, s.z0, s.times, hbar);
    if (s.oracle.enabled) {
      StepPolicy policy;
      policy.dt = s.oracle.dt;
      const Grid1D g = scenario_grid(s, hbar);
      if (return_mode) {
        const auto ov = return_overlap_series(hd, s.z0, s.times, hbar, g, policy);
        exact[i].values.resize(ov.size());
        for (std::size_t k = 0; k < ov.size(); ++k) exact[i].values[k] = std::abs(ov[k]);
      } else {
        exact[i] = exact_fidelity(h0, hd, s.z0, s.times, hbar, g, policy);
      }
    }
  });
  for (int i = 0; i < nh; ++i)
    for (std::size_t k = 0; k < s.times.size(); ++k) {
      const double ex = s.oracle.enabled ? exact[i].values[k]
                                         : std::numeric_limits<double>::quiet_NaN();
      const double err = s.oracle.enabled ? std::abs(semi[i].values[k] - ex)
                                          : std::numeric_limits<double>::quiet_NaN();
      t.add_row({s.hbars[i], s.times[k], semi[i].values[k], ex, err,
                 static_cast<double>(semi[i].flags[k] & flag_ehrenfest ? 1 : 0)});
    }
}

void convergence_experiment(const Scenario& s, const RunOptions& ro, Table& t) {
  t.columns = {"hbar", "max_err"};
  const auto h0 = s.model0();
  const auto hd = s.model_delta();
  const int nh = static_cast<int>(s.hbars.size());
  std::vector<double> errs(nh);
  parallel_for(nh, ro.jobs, [&](int i) {
    const double hbar = s.hbars[i];
    const auto semi = fidelity_leading(h0, hd, s.z0, s.times, hbar);
    StepPolicy policy;
    policy.dt = s.oracle.dt;
    const auto exact = exact_fidelity(h0, hd, s.z0, s.times, hbar, scenario_grid(s, hbar), policy);
    double m = 0.0;
    for (std::size_t k = 0; k < s.times.size(); ++k)
      m = std::max(m, std::abs(semi.values[k] - exact.values[k]));
    errs[i] = m;
  });
  for (int i = 0; i < nh; ++i) t.add_row({s.hbars[i], errs[i]});
  if (nh >= 2)
    t.annotations.emplace_back("fitted-slope", fmt(fitted_loglog_slope(s.hbars, errs)));
}

void egorov_experiment(const Scenario& s, const RunOptions& ro, Table& t) {
  t.columns = {"hbar", "defect"};
  const auto h0 = s.model0();
  const auto hd = s.model_delta();
  const Observable L = s.observable.name == "h0"
                           ? h0_observable(h0)
                           : bump_q_observable(s.observable.center, s.observable.width);
  const double t_eval = s.times.back();
  const int nh = static_cast<int>(s.hbars.size());
  std::vector<double> defects(nh);
  parallel_for(nh, ro.jobs, [&](int i) {
    const double hbar = s.hbars[i];
    StepPolicy policy;
    policy.dt = s.oracle.dt;
    const auto oracle = make_echo_expectation(scenario_grid(s, hbar), policy);
    defects[i] = egorov_defect(h0, hd, L, s.z0, t_eval, hbar, oracle);
  });
  for (int i = 0; i < nh; ++i) t.add_row({s.hbars[i], defects[i]});
  t.annotations.emplace_back("observable", s.observable.name);
  t.annotations.emplace_back("t", fmt(t_eval));
}

void revival_experiment(const Scenario& s, const RunOptions&, Table& t) {
  if (s.hbars.size() != 1)
    fail(ErrorCode::validation, "revival experiment expects a single hbar value");
  const double hbar = s.hbars.front();
  const auto model = s.model0();
  const auto& rc = s.revival;

  SpectralLadder ladder;
  if (rc.ladder == "bohr_sommerfeld") {
    ladder = bohr_sommerfeld_ladder(model, hbar, rc.window, rc.center_energy);
  } else {
    // level count: enough grid eigenvalues to cover the window top
    const double f_hi = action_and_period(model, rc.window.second).action / (2.0 * M_PI);
    const int k = static_cast<int>(std::ceil(f_hi / hbar)) + 2;
    Grid1D g;
    if (s.oracle.q_min && s.oracle.q_max) {
      g.q_min = *s.oracle.q_min;
      g.q_max = *s.oracle.q_max;
    } else {
      const auto ap = action_and_period(model, rc.window.second * 1.05);
      const double pad = 0.35 * (ap.q_plus - ap.q_minus);
      g.q_min = ap.q_minus - pad;
      g.q_max = ap.q_plus + pad;
    }
    g.n_points = s.oracle.n_points;
    g.hbar = hbar;
    ladder = eigensolve_1d(model, hbar, g, k, rc.center_energy);
  }

  WavepacketSpec spec;
  spec.theta = rc.theta;
  spec.theta_prime = rc.theta_prime;
  spec.center_energy = rc.center_energy;
  spec.form = rc.coefficients;
  const auto coeffs = wavepacket_coefficients(ladder, spec);
  const auto [t_cl, t_rev] = timescales(ladder);
  const double sigma = std::pow(hbar, rc.theta - 1.0);
  const auto [win_lo, win_hi] = collapse_window(hbar, rc.theta, rc.delta1, rc.delta2);

  // Sampling: early classical periods, the collapse window (between
  // recurrences), and the revival neighbourhood.
  std::vector<double> times = uniform_times(10.0 * t_cl, rc.early_samples);
  const auto collapse_ts = offpeak_window_samples(win_lo, win_hi, t_cl, rc.collapse_samples);
  times.insert(times.end(), collapse_ts.begin(), collapse_ts.end());
  long n_peak = 0;
  if (std::isfinite(t_rev)) {
    n_peak = static_cast<long>(std::llround(t_rev / t_cl));
    const double lo = n_peak * t_cl - 0.5 * t_cl, hi = n_peak * t_cl + 0.5 * t_cl;
    for (int k = 0; k < rc.revival_samples; ++k)
      times.push_back(lo + (hi - lo) * k / std::max(1, rc.revival_samples - 1));
  }

  const auto exact = autocorrelation(ladder, coeffs, times, hbar);
  const auto a2 = truncated_autocorr(2, ladder, coeffs, times, hbar);
  const auto pois = poisson_resummed_a2(times, sigma, t_rev, t_cl);

  t.columns = {"t", "rho_exact", "rho_a2", "rho_poisson", "segment"};
  const std::size_t n_early = static_cast<std::size_t>(rc.early_samples) + 1;
  const std::size_t n_coll = collapse_ts.size();
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double segment = k < n_early ? 0.0 : (k < n_early + n_coll ? 1.0 : 2.0);
    t.add_row({times[k], exact.rho[k], a2.rho[k], pois.rho[k], segment});
  }
  t.annotations.emplace_back("t_cl", fmt(t_cl));
  t.annotations.emplace_back("t_rev", fmt(t_rev));
  t.annotations.emplace_back("collapse-window", fmt(win_lo) + " " + fmt(win_hi));
  t.annotations.emplace_back("revival-peak-index", fmt(static_cast<double>(n_peak)));
  double coll_max = 0.0, rev_max = 0.0;
  for (std::size_t k = n_early; k < n_early + n_coll; ++k)
    coll_max = std::max(coll_max, exact.rho[k]);
  for (std::size_t k = n_early + n_coll; k < times.size(); ++k)
    rev_max = std::max(rev_max, exact.rho[k]);
  t.annotations.emplace_back("collapse-max", fmt(coll_max));
  t.annotations.emplace_back("revival-max", fmt(rev_max));
}

}  // namespace

bool run_property_suites(Table& table, std::uint64_t seed, int samples) {
  table.columns = {"suite", "samples", "max_defect", "tolerance", "pass"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  bool all_ok = true;
  auto emit = [&](int id, int n, double defect, double tol) {
    const bool ok = defect <= tol;
    all_ok = all_ok && ok;
    table.add_row({static_cast<double>(id), static_cast<double>(n), defect, tol, ok ? 1.0 : 0.0});
  };

  // 1: determinant lower bound |det V_F| >= 1, d in {1,2,3}
  {
    double worst = 0.0;
    int n = 0;
    for (int d : {1, 2, 3})
      for (int k = 0; k < (samples + 2) / 3; ++k, ++n)
        worst = std::max(worst, 1.0 - std::abs(build_VF(random_symplectic(d, rng(), 1.5).m)
                                                   .determinant()));
    emit(1, n, worst, 1e-10);
  }
  // 2: unitary case |det V| = 1
  {
    double worst = 0.0;
    const int n = std::max(100, samples / 10);
    for (int k = 0; k < n; ++k) {
      const int d = 1 + (k % 3);
      worst = std::max(worst, std::abs(std::abs(build_VF(random_orthosymplectic(d, rng()).m)
                                                    .determinant()) -
                                       1.0));
    }
    emit(2, n, worst, 1e-10);
  }
  // 3: Gamma_F quadratic-form bound
  {
    double worst = -1e300;
    int n = 0;
    for (int d : {1, 2, 3})
      for (int k = 0; k < (samples + 2) / 3; ++k, ++n) {
        const Mat F = random_symplectic(d, rng(), 1.2).m;
        const CMat G = build_GammaF(F);
        const double sF = largest_stretch(F);
        Vec X(2 * d);
        for (int i = 0; i < 2 * d; ++i) X(i) = uni(rng);
        const double viol =
            (0.25 * quad_form(G, X)).real() + X.squaredNorm() / (2.0 * (1.0 + sF));
        worst = std::max(worst, viol);
      }
    emit(3, n, std::max(worst, 0.0), 1e-10);
  }
  // 4: Gamma_F complex symmetry
  {
    double worst = 0.0;
    int n = 0;
    for (int d : {1, 2, 3})
      for (int k = 0; k < (samples + 2) / 3; ++k, ++n) {
        const CMat G = build_GammaF(random_symplectic(d, rng(), 1.2).m);
        worst = std::max(worst, (G - G.transpose()).cwiseAbs().maxCoeff());
      }
    emit(4, n, worst, 1e-10);
  }
  // 5: block-determinant identity
  {
    double worst = 0.0;
    int n = 0;
    for (int d : {1, 2, 3})
      for (int k = 0; k < (samples + 2) / 3; ++k, ++n) {
        const Mat F = random_symplectic(d, rng(), 1.2).m;
        worst = std::max(worst, std::abs(build_VF(F).determinant() - det_VF_block(F)));
      }
    emit(5, n, worst, 1e-10);
  }
  table.annotations.emplace_back(
      "suites", "1=det_v_lower_bound 2=det_v_unitary 3=gamma_form_bound 4=gamma_symmetry "
                "5=det_block_identity");
  return all_ok;
}

int run_scenario(const Scenario& s, const RunOptions& opts) {
  RunOptions ro = opts;
  if (ro.deterministic) ro.jobs = 1;
  const std::string path =
      ro.out_dir.empty() ? s.table_path : ro.out_dir + "/" + s.table_path;

  Table t;
  int status = 0;
  try {
    switch (s.experiment) {
      case ExperimentKind::fidelity:
        t.title = "echo-lab fidelity table";
        fidelity_like(s, ro, t, false);
        break;
      case ExperimentKind::return_prob:
        t.title = "echo-lab return-probability table";
        fidelity_like(s, ro, t, true);
        break;
      case ExperimentKind::revival:
        t.title = "echo-lab revival table";
        revival_experiment(s, ro, t);
        break;
      case ExperimentKind::convergence:
        t.title = "echo-lab convergence table";
        convergence_experiment(s, ro, t);
        break;
      case ExperimentKind::egorov:
        t.title = "echo-lab egorov table";
        egorov_experiment(s, ro, t);
        break;
      case ExperimentKind::property_check:
        t.title = "echo-lab property-check table";
        if (!run_property_suites(t, s.seed, 1000)) status = 3;
        break;
    }
  } catch (const Error& e) {
    if (e.code == ErrorCode::validation || e.code == ErrorCode::format) throw;
    // numerical failure: preserve whatever was computed, marked as partial
    t.annotations.emplace_back("status", std::string("numerical-failure: ") + e.what());
    status = 3;
  }
  if (status == 0 && s.experiment != ExperimentKind::property_check)
    t.annotations.emplace_back("status", "ok");
  write_table(t, path, s.resolved());
  return status;
}

}  // namespace echolab::cli
