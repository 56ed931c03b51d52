#include "echolab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace echolab {

// ---------------------------------------------------------------------------
// Built-in models

static HamiltonianModel one_dim_model(std::string name, std::function<double(double)> V,
                                      std::function<double(double)> Vp,
                                      std::function<double(double)> Vpp) {
  HamiltonianModel m;
  m.dim = 1;
  m.name = std::move(name);
  m.value = [V](const PhaseVector& z) { return 0.5 * z(1) * z(1) + V(z(0)); };
  m.grad = [Vp](const PhaseVector& z) {
    PhaseVector g(2);
    g << Vp(z(0)), z(1);
    return g;
  };
  m.hess = [Vpp](const PhaseVector& z) {
    Mat h = Mat::Zero(2, 2);
    h(0, 0) = Vpp(z(0));
    h(1, 1) = 1.0;
    return h;
  };
  m.has_kinetic_split = true;
  m.potential = V;
  m.potential_deriv = Vp;
  return m;
}

// Potential-only "models" used as perturbations; kinetic term absent.
static HamiltonianModel potential_only(std::string name, std::function<double(double)> V,
                                       std::function<double(double)> Vp,
                                       std::function<double(double)> Vpp) {
  HamiltonianModel m;
  m.dim = 1;
  m.name = std::move(name);
  m.value = [V](const PhaseVector& z) { return V(z(0)); };
  m.grad = [Vp](const PhaseVector& z) {
    PhaseVector g(2);
    g << Vp(z(0)), 0.0;
    return g;
  };
  m.hess = [Vpp](const PhaseVector& z) {
    Mat h = Mat::Zero(2, 2);
    h(0, 0) = Vpp(z(0));
    return h;
  };
  m.has_kinetic_split = true;  // adds only to V(q)
  m.potential = V;
  m.potential_deriv = Vp;
  return m;
}

HamiltonianModel harmonic_model(double omega) {
  const double w2 = omega * omega;
  return one_dim_model("harmonic", [w2](double q) { return 0.5 * w2 * q * q; },
                       [w2](double q) { return w2 * q; }, [w2](double) { return w2; });
}

HamiltonianModel quartic_model() {
  return one_dim_model("quartic", [](double q) { return q * q * q * q; },
                       [](double q) { return 4.0 * q * q * q; },
                       [](double q) { return 12.0 * q * q; });
}

HamiltonianModel anharmonic_model(double alpha) {
  return one_dim_model("anharmonic",
                       [alpha](double q) { return 0.5 * q * q + alpha * q * q * q * q; },
                       [alpha](double q) { return q + 4.0 * alpha * q * q * q; },
                       [alpha](double q) { return 1.0 + 12.0 * alpha * q * q; });
}

HamiltonianModel pendulum_model() {
  return one_dim_model("pendulum", [](double q) { return -std::cos(q); },
                       [](double q) { return std::sin(q); },
                       [](double q) { return std::cos(q); });
}

HamiltonianModel double_well_model() {
  return one_dim_model("double_well",
                       [](double q) { return 0.25 * (q * q - 1.0) * (q * q - 1.0); },
                       [](double q) { return q * (q * q - 1.0); },
                       [](double q) { return 3.0 * q * q - 1.0; });
}

HamiltonianModel linear_q_perturbation() {
  return potential_only("linear_q", [](double q) { return q; }, [](double) { return 1.0; },
                        [](double) { return 0.0; });
}

HamiltonianModel quadratic_q_perturbation() {
  return potential_only("quadratic_q", [](double q) { return q * q; },
                        [](double q) { return 2.0 * q; }, [](double) { return 2.0; });
}

HamiltonianModel cos_q_perturbation() {
  return potential_only("cos_q", [](double q) { return std::cos(q); },
                        [](double q) { return -std::sin(q); },
                        [](double q) { return -std::cos(q); });
}

HamiltonianModel perturbed_model(const HamiltonianModel& h0, const HamiltonianModel& v,
                                 double delta) {
  if (h0.dim != v.dim) fail(ErrorCode::invalid_dimension, "perturbed_model: mixed dimensions");
  HamiltonianModel m;
  m.dim = h0.dim;
  m.name = h0.name + (delta >= 0 ? "+" : "") + std::to_string(delta) + "*" + v.name;
  auto hv = h0.value, vv = v.value;
  auto hg = h0.grad, vg = v.grad;
  auto hh = h0.hess, vh = v.hess;
  m.value = [=](const PhaseVector& z) { return hv(z) + delta * vv(z); };
  m.grad = [=](const PhaseVector& z) -> PhaseVector { return hg(z) + delta * vg(z); };
  m.hess = [=](const PhaseVector& z) -> Mat { return hh(z) + delta * vh(z); };
  if (h0.has_kinetic_split && v.has_kinetic_split) {
    m.has_kinetic_split = true;
    auto hp = h0.potential, vp = v.potential;
    auto hpd = h0.potential_deriv, vpd = v.potential_deriv;
    m.potential = [=](double q) { return hp(q) + delta * vp(q); };
    m.potential_deriv = [=](double q) { return hpd(q) + delta * vpd(q); };
  }
  return m;
}

HamiltonianModel model_by_name(const std::string& name, double param) {
  if (name == "harmonic") return harmonic_model(param > 0 ? param : 1.0);
  if (name == "quartic") return quartic_model();
  if (name == "anharmonic") return anharmonic_model(param > 0 ? param : 1.0);
  if (name == "pendulum") return pendulum_model();
  if (name == "double_well") return double_well_model();
  fail(ErrorCode::validation, "unknown model name: " + name);
}

HamiltonianModel perturbation_by_name(const std::string& name) {
  if (name == "linear_q") return linear_q_perturbation();
  if (name == "quadratic_q") return quadratic_q_perturbation();
  if (name == "cos_q") return cos_q_perturbation();
  fail(ErrorCode::validation, "unknown perturbation name: " + name);
}

ModelConsistency check_model_consistency(const HamiltonianModel& model, int n_points,
                                         std::uint64_t seed, double box) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-box, box);
  ModelConsistency out;
  const int n = 2 * model.dim;
  const double h = 1e-5 * box;
  for (int k = 0; k < n_points; ++k) {
    PhaseVector z(n);
    for (int i = 0; i < n; ++i) z(i) = uni(rng);
    const Mat H = model.hess(z);
    out.max_hess_asymmetry =
        std::max(out.max_hess_asymmetry, (H - H.transpose()).cwiseAbs().maxCoeff());
    const PhaseVector g = model.grad(z);
    for (int i = 0; i < n; ++i) {
      PhaseVector zp = z, zm = z;
      zp(i) += h;
      zm(i) -= h;
      const double fd = (model.value(zp) - model.value(zm)) / (2.0 * h);
      const double rel = std::abs(fd - g(i)) / std::max(1.0, std::abs(g(i)));
      out.max_grad_rel_error = std::max(out.max_grad_rel_error, rel);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) on the packed state y = [z, vec(F), gamma]

namespace {

struct Dp54 {
  // Butcher tableau (standard DOPRI5 coefficients).
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // 4th-order embedded weights.
  static constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                          e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;
};

class PackedSystem {
public:
  PackedSystem(const HamiltonianModel& m, double e0) : model_(m), e0_(e0) {
    d_ = m.dim;
    n_ = 2 * d_ + 4 * d_ * d_ + 1;
  }

  int size() const { return n_; }

  Vec pack(const PhaseVector& z, const Mat& F, double gamma) const {
    Vec y(n_);
    y.head(2 * d_) = z;
    for (int j = 0; j < 2 * d_; ++j) y.segment(2 * d_ + j * 2 * d_, 2 * d_) = F.col(j);
    y(n_ - 1) = gamma;
    return y;
  }

  void unpack(const Vec& y, PhaseVector& z, Mat& F, double& gamma) const {
    z = y.head(2 * d_);
    F.resize(2 * d_, 2 * d_);
    for (int j = 0; j < 2 * d_; ++j) F.col(j) = y.segment(2 * d_ + j * 2 * d_, 2 * d_);
    gamma = y(n_ - 1);
  }

  Vec rhs(const Vec& y) const {
    PhaseVector z;
    Mat F;
    double gamma;
    unpack(y, z, F, gamma);
    const PhaseVector g = model_.grad(z);
    const Mat H = model_.hess(z);
    if (!g.allFinite() || !H.allFinite())
      fail(ErrorCode::model_evaluation, "evolve: non-finite model derivative");
    Vec dy(n_);
    // z' = J grad H
    dy.head(d_) = g.tail(d_);
    dy.segment(d_, d_) = -g.head(d_);
    // F' = J H'' F
    Mat JH(2 * d_, 2 * d_);
    JH.topRows(d_) = H.bottomRows(d_);
    JH.bottomRows(d_) = -H.topRows(d_);
    const Mat dF = JH * F;
    for (int j = 0; j < 2 * d_; ++j) dy.segment(2 * d_ + j * 2 * d_, 2 * d_) = dF.col(j);
    // gamma' = 1/2 z.grad H - H(z_0)
    dy(n_ - 1) = 0.5 * z.dot(g) - e0_;
    return dy;
  }

private:
  const HamiltonianModel& model_;
  double e0_;
  int d_ = 1;
  int n_ = 0;
};

// One adaptive integration from t0 to t1 (either direction); calls sink at t1.
void integrate_segment(const PackedSystem& sys, Vec& y, double t0, double t1,
                       const IntegratorOptions& opts, long& steps) {
  const double dir = (t1 >= t0) ? 1.0 : -1.0;
  double t = t0;
  double h = dir * std::min(opts.max_step, std::max(1e-8, std::abs(t1 - t0) / 16.0));
  Vec k1 = sys.rhs(y);
  while (dir * (t1 - t) > 1e-15 * std::max(1.0, std::abs(t1))) {
    if (dir * (t + h - t1) > 0.0) h = t1 - t;
    const Vec k2 = sys.rhs(y + h * (Dp54::a21 * k1));
    const Vec k3 = sys.rhs(y + h * (Dp54::a31 * k1 + Dp54::a32 * k2));
    const Vec k4 = sys.rhs(y + h * (Dp54::a41 * k1 + Dp54::a42 * k2 + Dp54::a43 * k3));
    const Vec k5 =
        sys.rhs(y + h * (Dp54::a51 * k1 + Dp54::a52 * k2 + Dp54::a53 * k3 + Dp54::a54 * k4));
    const Vec k6 = sys.rhs(y + h * (Dp54::a61 * k1 + Dp54::a62 * k2 + Dp54::a63 * k3 +
                                    Dp54::a64 * k4 + Dp54::a65 * k5));
    const Vec y5 = y + h * (Dp54::b1 * k1 + Dp54::b3 * k3 + Dp54::b4 * k4 + Dp54::b5 * k5 +
                            Dp54::b6 * k6);
    const Vec k7 = sys.rhs(y5);  // FSAL
    const Vec y4 = y + h * (Dp54::e1 * k1 + Dp54::e3 * k3 + Dp54::e4 * k4 + Dp54::e5 * k5 +
                            Dp54::e6 * k6 + Dp54::e7 * k7);
    // Scaled RMS error.
    double err2 = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      const double sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(y(i)), std::abs(y5(i)));
      const double e = (y5(i) - y4(i)) / sc;
      err2 += e * e;
    }
    const double err = std::sqrt(err2 / y.size());
    if (err <= 1.0) {
      t += h;
      y = y5;
      k1 = k7;
    }
    const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-12), -0.2), 0.2, 5.0);
    h *= fac;
    if (std::abs(h) > opts.max_step) h = dir * opts.max_step;
    if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t)))
      fail(ErrorCode::integration_failure, "evolve: step size underflow", t);
    if (++steps > opts.max_steps)
      fail(ErrorCode::integration_failure, "evolve: step budget exhausted", t);
  }
}

}  // namespace

std::vector<double> uniform_times(double t_max, int n) {
  std::vector<double> t(n + 1);
  for (int i = 0; i <= n; ++i) t[i] = t_max * static_cast<double>(i) / n;
  return t;
}

TrajectoryBundle evolve(const HamiltonianModel& model, const PhaseVector& z0,
                        const std::vector<double>& times, const IntegratorOptions& opts) {
  if (times.empty() || times.front() != 0.0)
    fail(ErrorCode::validation, "evolve: time grid must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (times[i] <= times[i - 1])
      fail(ErrorCode::validation, "evolve: time grid must be strictly increasing");
  if (z0.size() != 2 * model.dim)
    fail(ErrorCode::invalid_dimension, "evolve: z0 has wrong dimension");

  const double e0 = model.value(z0);
  PackedSystem sys(model, e0);
  Vec y = sys.pack(z0, Mat::Identity(2 * model.dim, 2 * model.dim), 0.0);

  TrajectoryBundle b;
  b.times = times;
  b.points.reserve(times.size());
  b.stability.reserve(times.size());
  b.action.reserve(times.size());
  b.energy.reserve(times.size());

  long steps = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0) integrate_segment(sys, y, times[i - 1], times[i], opts, steps);
    PhaseVector z;
    Mat F;
    double gamma;
    sys.unpack(y, z, F, gamma);
    b.points.push_back(z);
    b.stability.push_back(F);
    b.action.push_back(gamma);
    b.energy.push_back(model.value(z));
    b.max_symplectic_defect = std::max(b.max_symplectic_defect, symplectic_defect(F));
    b.max_energy_drift =
        std::max(b.max_energy_drift, std::abs(b.energy.back() - e0) / std::max(1.0, std::abs(e0)));
  }
  const double T = times.back();
  if (T > 0.0) {
    const double opnorm = std::sqrt(largest_stretch(b.stability.back()));
    b.lyapunov_estimate = std::log(std::max(opnorm, 1e-300)) / T;
  }
  if (opts.validate) {
    if (b.max_symplectic_defect > opts.symp_tol)
      fail(ErrorCode::assumption_violation, "evolve: symplectic defect of F_t exceeds tolerance",
           b.max_symplectic_defect);
    if (b.max_energy_drift > opts.energy_tol)
      fail(ErrorCode::assumption_violation, "evolve: energy drift exceeds tolerance",
           b.max_energy_drift);
  }
  return b;
}

// ---------------------------------------------------------------------------
// Action integral and period (1-D)

namespace {

double bisect_root(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) fail(ErrorCode::non_confining, "turning point bracket lost");
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if (fa * fm < 0.0) {
      b = m;
      fb = fm;
    } else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

// Composite Simpson with interval doubling until the relative change settles.
double simpson_refine(const std::function<double(double)>& f, double lo, double hi,
                      double rel_tol) {
  int n = 64;
  auto eval = [&](int m) {
    const double h = (hi - lo) / m;
    double s = f(lo) + f(hi);
    for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
    return s * h / 3.0;
  };
  double prev = eval(n);
  for (int it = 0; it < 14; ++it) {
    n *= 2;
    const double cur = eval(n);
    if (std::abs(cur - prev) <= rel_tol * std::max(1e-300, std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace

ActionPeriod action_and_period(const HamiltonianModel& model, double E,
                               std::optional<std::pair<double, double>> bracket) {
  if (model.dim != 1 || !model.has_kinetic_split)
    fail(ErrorCode::unsupported_model, "action_and_period: needs a 1-D p^2/2 + V(q) model");
  const auto& V = model.potential;
  const auto& Vp = model.potential_deriv;
  auto f = [&](double q) { return V(q) - E; };

  // Find an interior point with V < E.
  double q_in = 0.0;
  bool found = false;
  const double lo_lim = bracket ? bracket->first : -64.0;
  const double hi_lim = bracket ? bracket->second : 64.0;
  for (double probe : {0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 3.0, -3.0}) {
    if (probe < lo_lim || probe > hi_lim) continue;
    if (f(probe) < 0.0) {
      q_in = probe;
      found = true;
      break;
    }
  }
  if (!found) {
    // coarse scan of the bracket
    for (int i = 0; i <= 256 && !found; ++i) {
      const double q = lo_lim + (hi_lim - lo_lim) * i / 256.0;
      if (f(q) < 0.0) {
        q_in = q;
        found = true;
      }
    }
  }
  if (!found) fail(ErrorCode::non_confining, "action_and_period: no classically allowed region");

  // Expand outward until V > E on both sides.
  double ql = q_in, qr = q_in, step = 0.25;
  while (f(ql) < 0.0) {
    ql -= step;
    step *= 1.5;
    if (ql < lo_lim) fail(ErrorCode::non_confining, "action_and_period: no left turning point");
  }
  step = 0.25;
  while (f(qr) < 0.0) {
    qr += step;
    step *= 1.5;
    if (qr > hi_lim) fail(ErrorCode::non_confining, "action_and_period: no right turning point");
  }
  const double qm = bisect_root(f, ql, q_in);
  const double qp = bisect_root(f, q_in, qr);

  if (std::abs(Vp(qm)) < 1e-10 || std::abs(Vp(qp)) < 1e-10)
    fail(ErrorCode::singular_orbit, "action_and_period: E is a critical value");

  const double delta = qp - qm;
  // g(q) = (E - V)/((q-qm)(qp-q)) extended by l'Hopital at the endpoints;
  // the substitution q = qm + delta sin^2(phi/2) removes both square-root
  // endpoint singularities. g must stay bounded away from zero inside the
  // well; a vanishing interior value means the orbit runs through a critical
  // point (separatrix).
  const double g_floor = 1e-10 * (std::abs(Vp(qm)) + std::abs(Vp(qp))) / delta;
  auto g = [&](double q) {
    const double a = q - qm, bql = qp - q;
    const double eps = 1e-9 * delta;
    double val;
    if (a < eps) val = -Vp(qm) / delta;
    else if (bql < eps) val = Vp(qp) / delta;
    else val = (E - V(q)) / (a * bql);
    if (val < g_floor)
      fail(ErrorCode::singular_orbit, "action_and_period: orbit passes a critical point", q);
    return val;
  };
  auto q_of_phi = [&](double phi) {
    const double s = std::sin(0.5 * phi);
    return qm + delta * s * s;
  };

  ActionPeriod out;
  out.q_minus = qm;
  out.q_plus = qp;
  out.period = std::sqrt(2.0) *
               simpson_refine([&](double phi) { return 1.0 / std::sqrt(g(q_of_phi(phi))); }, 0.0,
                              M_PI, 1e-11);
  out.action = 0.5 * std::sqrt(2.0) * delta * delta *
               simpson_refine(
                   [&](double phi) {
                     const double s = std::sin(phi);
                     return std::sqrt(g(q_of_phi(phi))) * s * s;
                   },
                   0.0, M_PI, 1e-11);
  return out;
}

PhaseVector classical_echo(const HamiltonianModel& model0, const HamiltonianModel& model_delta,
                           const PhaseVector& X, double t, const IntegratorOptions& opts) {
  if (t == 0.0) return X;
  // forward under H_delta
  PackedSystem fwd(model_delta, model_delta.value(X));
  Vec y = fwd.pack(X, Mat::Identity(2 * model_delta.dim, 2 * model_delta.dim), 0.0);
  long steps = 0;
  integrate_segment(fwd, y, 0.0, t, opts, steps);
  PhaseVector z_mid;
  Mat F;
  double gamma;
  fwd.unpack(y, z_mid, F, gamma);
  // backward under H_0
  PackedSystem bwd(model0, model0.value(z_mid));
  Vec y2 = bwd.pack(z_mid, Mat::Identity(2 * model0.dim, 2 * model0.dim), 0.0);
  integrate_segment(bwd, y2, 0.0, -t, opts, steps);
  PhaseVector z_out;
  bwd.unpack(y2, z_out, F, gamma);
  return z_out;
}

// ---------------------------------------------------------------------------
// Observables and the Egorov defect

static double plateau_bump(double x) {
  const double ax = std::abs(x);
  if (ax <= 0.5) return 1.0;
  if (ax >= 1.0) return 0.0;
  const double u = 2.0 * ax - 1.0;  // in (0,1)
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

Observable bump_q_observable(double center, double width, double amp) {
  Observable L;
  L.name = "bump_q";
  L.value = [=](const PhaseVector& z) { return amp * plateau_bump((z(0) - center) / width); };
  L.symbol = [=](double q, double) { return Complex(amp * plateau_bump((q - center) / width), 0.0); };
  return L;
}

Observable h0_observable(const HamiltonianModel& model) {
  Observable L;
  L.name = "H(" + model.name + ")";
  L.value = model.value;
  auto val = model.value;
  L.symbol = [val](double q, double p) {
    PhaseVector z(2);
    z << q, p;
    return Complex(val(z), 0.0);
  };
  return L;
}

double egorov_defect(const HamiltonianModel& model0, const HamiltonianModel& model_delta,
                     const Observable& L, const PhaseVector& z, double t, double hbar,
                     const EchoExpectationFn& oracle, const IntegratorOptions& opts) {
  const PhaseVector z_echo = classical_echo(model0, model_delta, z, t, opts);
  const Complex quantum = oracle(model0, model_delta, z, t, hbar, L);
  return std::abs(quantum - Complex(L.value(z_echo), 0.0));
}

bool ehrenfest_exceeded(double hbar, const Mat& F, double t) {
  const double opnorm = std::sqrt(largest_stretch(F));
  return std::sqrt(hbar) * opnorm * opnorm * opnorm * (1.0 + std::abs(t)) > 1.0;
}

}  // namespace echolab
