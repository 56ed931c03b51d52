#pragma once

#include <utility>
#include <vector>

#include "echolab/flow.hpp"
#include "echolab/types.hpp"

namespace echolab {

enum class LadderSource { bohr_sommerfeld, grid_diagonalization, explicit_formula };

/// An eigenvalue ladder E_n over a contiguous index range, with local
/// derivatives of the spectral function b0 (E as a function of F = (n+1/2)hbar)
/// at the reference level.
struct SpectralLadder {
  double hbar = 0.0;
  long n_first = 0;               // quantum number of energies[0]
  std::vector<double> energies;   // strictly increasing
  long ref_index = 0;             // n-bar (absolute quantum number)
  double b0p = 0.0;               // b0'(F-bar)
  double b0pp = 0.0;              // b0''(F-bar)
  double b0ppp = 0.0;             // b0'''(F-bar)
  LadderSource source = LadderSource::bohr_sommerfeld;

  long n_last() const { return n_first + static_cast<long>(energies.size()) - 1; }
  double energy_of(long n) const { return energies.at(static_cast<std::size_t>(n - n_first)); }
  double ref_energy() const { return energy_of(ref_index); }
};

/// Solve J(E_n) = 2 pi (n + 1/2) hbar over the energy window by bracketed
/// root finding on the monotone action integral; derivatives of b0 from the
/// period (b0' = 2 pi / T) and centered differences of it in F.
SpectralLadder bohr_sommerfeld_ladder(const HamiltonianModel& model, double hbar,
                                      std::pair<double, double> window, double ref_energy);

/// Wrap externally computed energies (grid diagonalization, explicit
/// formulas) as a ladder; derivatives by centered differences with stencil
/// spacing `stencil` levels.
SpectralLadder ladder_from_energies(double hbar, long n_first, std::vector<double> energies,
                                    double ref_energy, LadderSource source, int stencil = 4);

enum class CutoffKind { gaussian };      // chi1(x) = exp(-x^2/4)
enum class CoeffForm {
  energy_cutoff,   // c_n = K chi1((E_n - E_ref)/tau) chi0((E_n - E)/eps)
  index_gaussian,  // c_{ref+m} = K chi1(m/sigma), sigma = tau/hbar (no chi0)
};

struct WavepacketSpec {
  double theta = 0.8;        // tau = hbar^theta
  double theta_prime = 0.4;  // eps = hbar^theta'
  CutoffKind chi1 = CutoffKind::gaussian;
  double center_energy = 0.0;
  CoeffForm form = CoeffForm::energy_cutoff;
};

struct WavepacketCoefficients {
  long n_first = 0;
  std::vector<double> c;  // real, >= 0; sum of squares = 1
  long ref_index = 0;
};

double chi0_plateau(double x);   // 1 on [-1/2,1/2], supported in (-1,1)
double chi1_gaussian(double x);  // exp(-x^2/4)

WavepacketCoefficients wavepacket_coefficients(const SpectralLadder& ladder,
                                               const WavepacketSpec& spec);

struct AutocorrSeries {
  std::vector<double> times;
  std::vector<Complex> values;  // a(t)
  std::vector<double> rho;      // |a(t)|^2
  int order = 0;                // 0 = exact sum, 1..3 = kappa_i truncations, -2 = poisson
};

/// a(t) = sum |c_n|^2 exp(-i t E_n / hbar).
AutocorrSeries autocorrelation(const SpectralLadder& ladder, const WavepacketCoefficients& coeffs,
                               const std::vector<double>& times, double hbar);

/// Taylor-truncated approximants: E_n - E_ref replaced by kappa_order(n).
/// Order 1: hbar b0' m; order 2 adds (hbar^2/2) b0'' m^2; order 3 adds the
/// cubic term (the hbar^3 b2' m correction is not available and set to 0).
AutocorrSeries truncated_autocorr(int order, const SpectralLadder& ladder,
                                  const WavepacketCoefficients& coeffs,
                                  const std::vector<double>& times, double hbar);

/// Poisson-resummed kappa_2 envelope for the Gaussian cutoff, relative to the
/// reference-level phase exp(-i t E_ref / hbar):
///   a2(t) = K sqrt(2 pi / gamma_t) sum_l exp(-2 pi^2 (l - t/T_cl)^2 / gamma_t),
///   gamma_t = 1/sigma^2 - 4 i pi t / T_rev,
/// K matching the direct-sum normalisation.
AutocorrSeries poisson_resummed_a2(const std::vector<double>& times, double sigma, double T_rev,
                                   double T_cl);

/// (T_cl, T_rev) = (2 pi / b0', 4 pi / (hbar b0'')); T_rev = +inf when b0'' = 0.
std::pair<double, double> timescales(const SpectralLadder& ladder);

/// Collapse window J_hbar = [hbar^{1-2 theta - delta1}, hbar^{delta2/2 - theta}];
/// requires delta2 + delta1/2 + theta < 1.
std::pair<double, double> collapse_window(double hbar, double theta, double delta1, double delta2);

/// `count` sample times in [lo, hi] placed between classical recurrences
/// (fractional parts of t/T_cl cycle through 0.35, 0.5, 0.65). At desk-scale
/// hbar the kappa_1 spikes at integer t/T_cl decay only like hbar^{delta_1},
/// so collapse sampling avoids them; the window statement itself is a limit.
std::vector<double> offpeak_window_samples(double lo, double hi, double t_cl, int count);

}  // namespace echolab
