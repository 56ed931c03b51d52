#include "echolab/revivals.hpp"

#include <algorithm>
#include <cmath>

namespace echolab {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double solve_action_equals(const HamiltonianModel& model, double target,
                           std::pair<double, double> window) {
  // J(E) is strictly increasing on a confining window; bisect.
  double lo = window.first, hi = window.second;
  auto act = [&](double e) { return action_and_period(model, e).action - target; };
  double flo = act(lo), fhi = act(hi);
  if (flo > 0.0 || fhi < 0.0)
    fail(ErrorCode::assumption_violation, "bohr_sommerfeld: target action outside window");
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = act(mid);
    if (std::abs(fm) < 1e-13 * std::max(1.0, target)) return mid;
    (fm < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SpectralLadder bohr_sommerfeld_ladder(const HamiltonianModel& model, double hbar,
                                      std::pair<double, double> window, double ref_energy) {
  if (hbar <= 0.0) fail(ErrorCode::validation, "bohr_sommerfeld_ladder: hbar must be positive");
  if (!(window.first < window.second))
    fail(ErrorCode::validation, "bohr_sommerfeld_ladder: empty energy window");

  const double f_lo = action_and_period(model, window.first).action / kTwoPi;
  const double f_hi = action_and_period(model, window.second).action / kTwoPi;
  if (!(f_lo < f_hi))
    fail(ErrorCode::assumption_violation, "bohr_sommerfeld_ladder: action not increasing");

  const long n_lo = static_cast<long>(std::ceil(f_lo / hbar - 0.5));
  const long n_hi = static_cast<long>(std::floor(f_hi / hbar - 0.5));
  if (n_hi - n_lo + 1 < 3)
    fail(ErrorCode::no_levels, "bohr_sommerfeld_ladder: window holds fewer than 3 levels",
         static_cast<double>(n_hi - n_lo + 1));

  SpectralLadder lad;
  lad.hbar = hbar;
  lad.n_first = std::max<long>(n_lo, 0);
  lad.source = LadderSource::bohr_sommerfeld;
  lad.energies.reserve(n_hi - lad.n_first + 1);
  for (long n = lad.n_first; n <= n_hi; ++n) {
    const double target = kTwoPi * (static_cast<double>(n) + 0.5) * hbar;
    lad.energies.push_back(solve_action_equals(model, target, window));
  }

  // Reference level: nearest to ref_energy.
  long best = lad.n_first;
  double bd = std::abs(lad.energies.front() - ref_energy);
  for (long n = lad.n_first; n <= lad.n_last(); ++n) {
    const double d = std::abs(lad.energy_of(n) - ref_energy);
    if (d < bd) {
      bd = d;
      best = n;
    }
  }
  lad.ref_index = best;

  // b0'(F) = 2 pi / T(E(F)). Differentiate in F by centered differences of
  // the quadrature values around F-bar (the fit is local and smooth). The
  // stencil stays inside the window's action range.
  const double f_bar = (static_cast<double>(lad.ref_index) + 0.5) * hbar;
  double h = std::max(1e-3 * f_bar, 4.0 * hbar);
  h = std::min({h, (f_bar - f_lo) / 2.5, (f_hi - f_bar) / 2.5});
  if (h <= 0.0)
    fail(ErrorCode::assumption_violation,
         "bohr_sommerfeld_ladder: reference level at the window edge");
  auto b0p_at = [&](double f) {
    const double e = solve_action_equals(model, kTwoPi * f, window);
    return kTwoPi / action_and_period(model, e).period;
  };
  const double bp_m2 = b0p_at(f_bar - 2 * h), bp_m1 = b0p_at(f_bar - h);
  const double bp_0 = b0p_at(f_bar);
  const double bp_p1 = b0p_at(f_bar + h), bp_p2 = b0p_at(f_bar + 2 * h);
  lad.b0p = bp_0;
  lad.b0pp = (bp_p1 - bp_m1) / (2.0 * h);
  lad.b0ppp = (bp_p2 - 2.0 * bp_0 + bp_m2) / (4.0 * h * h);
  return lad;
}

SpectralLadder ladder_from_energies(double hbar, long n_first, std::vector<double> energies,
                                    double ref_energy, LadderSource source, int stencil) {
  if (hbar <= 0.0) fail(ErrorCode::validation, "ladder_from_energies: hbar must be positive");
  if (energies.size() < 5) fail(ErrorCode::no_levels, "ladder_from_energies: need >= 5 levels");
  for (std::size_t i = 1; i < energies.size(); ++i)
    if (energies[i] <= energies[i - 1])
      fail(ErrorCode::assumption_violation, "ladder_from_energies: energies must increase",
           static_cast<double>(i));

  SpectralLadder lad;
  lad.hbar = hbar;
  lad.n_first = n_first;
  lad.energies = std::move(energies);
  lad.source = source;

  long best = lad.n_first;
  double bd = std::abs(lad.energies.front() - ref_energy);
  for (long n = lad.n_first; n <= lad.n_last(); ++n) {
    const double d = std::abs(lad.energy_of(n) - ref_energy);
    if (d < bd) {
      bd = d;
      best = n;
    }
  }
  lad.ref_index = best;

  // Centered differences in n with spacing K levels; E_n = b0((n+1/2)hbar)
  // up to O(hbar^2), so this estimates b0 derivatives at the reference level.
  long K = stencil;
  const long margin = std::min(lad.ref_index - lad.n_first, lad.n_last() - lad.ref_index);
  if (2 * K > margin) K = std::max<long>(1, margin / 2);
  if (K < 1 || margin < 2)
    fail(ErrorCode::no_levels, "ladder_from_energies: reference level too close to the edge");
  const double eh = static_cast<double>(K) * hbar;
  const double e_m2 = lad.energy_of(lad.ref_index - 2 * K);
  const double e_m1 = lad.energy_of(lad.ref_index - K);
  const double e_0 = lad.energy_of(lad.ref_index);
  const double e_p1 = lad.energy_of(lad.ref_index + K);
  const double e_p2 = lad.energy_of(lad.ref_index + 2 * K);
  lad.b0p = (e_p1 - e_m1) / (2.0 * eh);
  lad.b0pp = (e_p1 - 2.0 * e_0 + e_m1) / (eh * eh);
  lad.b0ppp = (e_p2 - 2.0 * e_p1 + 2.0 * e_m1 - e_m2) / (2.0 * eh * eh * eh);
  return lad;
}

double chi0_plateau(double x) {
  const double ax = std::abs(x);
  if (ax <= 0.5) return 1.0;
  if (ax >= 1.0) return 0.0;
  const double u = 2.0 * ax - 1.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

double chi1_gaussian(double x) { return std::exp(-0.25 * x * x); }

WavepacketCoefficients wavepacket_coefficients(const SpectralLadder& ladder,
                                               const WavepacketSpec& spec) {
  if (!(spec.theta_prime > 0.0 && spec.theta_prime < spec.theta && spec.theta < 1.0))
    fail(ErrorCode::validation, "wavepacket: need 0 < theta' < theta < 1");
  const double tau = std::pow(ladder.hbar, spec.theta);
  const double eps = std::pow(ladder.hbar, spec.theta_prime);
  const double sigma = tau / ladder.hbar;
  const double e_ref = ladder.ref_energy();

  WavepacketCoefficients out;
  out.n_first = ladder.n_first;
  out.ref_index = ladder.ref_index;
  out.c.resize(ladder.energies.size());
  double norm2 = 0.0;
  for (long n = ladder.n_first; n <= ladder.n_last(); ++n) {
    const std::size_t i = static_cast<std::size_t>(n - ladder.n_first);
    double w = 0.0;
    if (spec.form == CoeffForm::energy_cutoff) {
      const double x1 = (ladder.energy_of(n) - e_ref) / tau;
      const double x0 = (ladder.energy_of(n) - spec.center_energy) / eps;
      w = chi1_gaussian(x1) * chi0_plateau(x0);
    } else {
      const double m = static_cast<double>(n - ladder.ref_index);
      w = chi1_gaussian(m / sigma);
    }
    out.c[i] = w;
    norm2 += w * w;
  }
  if (norm2 < 1e-300) fail(ErrorCode::empty_packet, "wavepacket: all cutoff weights vanish");
  const double K = 1.0 / std::sqrt(norm2);
  for (double& v : out.c) v *= K;
  return out;
}

namespace {

AutocorrSeries sum_series(const std::vector<double>& times, double hbar,
                          const WavepacketCoefficients& coeffs,
                          const std::function<double(long)>& level_energy, int order) {
  AutocorrSeries s;
  s.times = times;
  s.order = order;
  s.values.resize(times.size());
  s.rho.resize(times.size());
  const long n0 = coeffs.n_first;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    Complex a(0.0, 0.0);
    for (std::size_t i = 0; i < coeffs.c.size(); ++i) {
      const double w = coeffs.c[i] * coeffs.c[i];
      if (w == 0.0) continue;
      const double phase = -t * level_energy(n0 + static_cast<long>(i)) / hbar;
      a += w * std::exp(Complex(0.0, phase));
    }
    s.values[k] = a;
    s.rho[k] = std::norm(a);
  }
  return s;
}

}  // namespace

AutocorrSeries autocorrelation(const SpectralLadder& ladder, const WavepacketCoefficients& coeffs,
                               const std::vector<double>& times, double hbar) {
  return sum_series(times, hbar, coeffs, [&](long n) { return ladder.energy_of(n); }, 0);
}

AutocorrSeries truncated_autocorr(int order, const SpectralLadder& ladder,
                                  const WavepacketCoefficients& coeffs,
                                  const std::vector<double>& times, double hbar) {
  if (order < 1 || order > 3)
    fail(ErrorCode::invalid_order, "truncated_autocorr: order must be 1, 2 or 3",
         static_cast<double>(order));
  const double e_ref = ladder.ref_energy();
  const double h2 = hbar * hbar, h3 = h2 * hbar;
  auto kappa = [&](long n) {
    const double m = static_cast<double>(n - ladder.ref_index);
    double e = hbar * ladder.b0p * m;
    if (order >= 2) e += 0.5 * h2 * ladder.b0pp * m * m;
    if (order >= 3) e += (h3 / 6.0) * ladder.b0ppp * m * m * m;  // b2' term unavailable, 0
    return e_ref + e;
  };
  return sum_series(times, hbar, coeffs, kappa, order);
}

AutocorrSeries poisson_resummed_a2(const std::vector<double>& times, double sigma, double T_rev,
                                   double T_cl) {
  if (sigma <= 0.0) fail(ErrorCode::validation, "poisson_resummed_a2: sigma must be positive");
  if (!(T_cl > 0.0)) fail(ErrorCode::validation, "poisson_resummed_a2: T_cl must be positive");

  // K matches the direct-sum normalisation sum_m chi1(m/sigma)^2 = 1/K.
  double norm = 0.0;
  const long m_max = static_cast<long>(std::ceil(sigma * 9.1)) + 1;  // weights below 1e-18 beyond
  for (long m = -m_max; m <= m_max; ++m) {
    const double w = chi1_gaussian(static_cast<double>(m) / sigma);
    norm += w * w;
  }
  const double K = 1.0 / norm;

  AutocorrSeries s;
  s.times = times;
  s.order = -2;
  s.values.resize(times.size());
  s.rho.resize(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    // gamma = 1/sigma^2 + 4 i pi t / T_rev: the sign pairs with the
    // e^{-i t E_n / hbar} phase of a(t), so the resummed series matches the
    // direct kappa_2 sum as a complex function (rho is sign-blind).
    const Complex gamma(1.0 / (sigma * sigma), 4.0 * M_PI * t / T_rev);
    const double u = t / T_cl;
    // Sum over image peaks with |exp| above 1e-18.
    const double re_inv_gamma = (1.0 / (sigma * sigma)) / std::norm(gamma);
    const double reach = std::sqrt(41.5 / (2.0 * M_PI * M_PI * re_inv_gamma));
    const long l_lo = static_cast<long>(std::floor(u - reach)) - 1;
    const long l_hi = static_cast<long>(std::ceil(u + reach)) + 1;
    Complex a(0.0, 0.0);
    for (long l = l_lo; l <= l_hi; ++l) {
      const double dl = static_cast<double>(l) - u;
      a += std::exp(-2.0 * M_PI * M_PI * dl * dl / gamma);
    }
    a *= K * std::sqrt(2.0 * M_PI / gamma);
    s.values[k] = a;
    s.rho[k] = std::norm(a);
  }
  return s;
}

std::pair<double, double> timescales(const SpectralLadder& ladder) {
  if (ladder.b0p <= 0.0)
    fail(ErrorCode::assumption_violation, "timescales: b0' must be positive", ladder.b0p);
  const double t_cl = kTwoPi / ladder.b0p;
  // b0'' below the derivative-estimation noise floor counts as a linear
  // spectrum (no revival time).
  const bool flat = std::abs(ladder.b0pp) < 1e-9 * std::max(1.0, std::abs(ladder.b0p));
  const double t_rev = flat ? std::numeric_limits<double>::infinity()
                            : 2.0 * kTwoPi / (ladder.hbar * ladder.b0pp);
  return {t_cl, t_rev};
}

std::pair<double, double> collapse_window(double hbar, double theta, double delta1,
                                          double delta2) {
  if (!(delta1 > 0.0 && delta2 > 0.0))
    fail(ErrorCode::invalid_exponents, "collapse_window: delta1, delta2 must be positive");
  if (!(delta2 + 0.5 * delta1 + theta < 1.0))
    fail(ErrorCode::invalid_exponents,
         "collapse_window: constraint delta2 + delta1/2 + theta < 1 violated",
         delta2 + 0.5 * delta1 + theta);
  if (!(hbar > 0.0 && hbar < 1.0))
    fail(ErrorCode::validation, "collapse_window: hbar must be in (0,1)");
  const double lo = std::pow(hbar, 1.0 - 2.0 * theta - delta1);
  const double hi = std::pow(hbar, 0.5 * delta2 - theta);
  if (!(lo < hi))
    fail(ErrorCode::degenerate_window, "collapse_window: empty window", hi - lo);
  return {lo, hi};
}

std::vector<double> offpeak_window_samples(double lo, double hi, double t_cl, int count) {
  if (!(lo < hi) || t_cl <= 0.0 || count < 1)
    fail(ErrorCode::validation, "offpeak_window_samples: bad window or count");
  static constexpr double fracs[3] = {0.35, 0.5, 0.65};
  std::vector<double> candidates;
  for (long l = static_cast<long>(std::floor(lo / t_cl)); l <= static_cast<long>(std::ceil(hi / t_cl));
       ++l)
    for (double f : fracs) {
      const double t = (static_cast<double>(l) + f) * t_cl;
      if (t >= lo && t <= hi) candidates.push_back(t);
    }
  if (static_cast<int>(candidates.size()) < count)
    fail(ErrorCode::degenerate_window, "offpeak_window_samples: window too short for count",
         static_cast<double>(candidates.size()));
  std::sort(candidates.begin(), candidates.end());
  std::vector<double> out(count);
  for (int k = 0; k < count; ++k) {
    const double pos = (count == 1) ? 0.0
                                    : static_cast<double>(k) * (candidates.size() - 1) /
                                          (count - 1);
    out[k] = candidates[static_cast<std::size_t>(std::llround(pos))];
  }
  return out;
}

}  // namespace echolab
