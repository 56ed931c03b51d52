#pragma once

#include <functional>
#include <vector>

#include "echolab/echo.hpp"
#include "echolab/flow.hpp"
#include "echolab/metaplectic.hpp"
#include "echolab/revivals.hpp"
#include "echolab/types.hpp"

namespace echolab {

/// Uniform 1-D spatial grid (periodic for the spectral operators).
struct Grid1D {
  double q_min = -8.0;
  double q_max = 8.0;
  int n_points = 1024;  // power of two, >= 256
  double hbar = 1.0;

  double length() const { return q_max - q_min; }
  double dx() const { return length() / n_points; }
  double q(int j) const { return q_min + j * dx(); }
  void validate() const;
};

/// Suggest a grid wide enough for a coherent state followed along a
/// classical trajectory (position range padded by 8 stretched widths).
Grid1D auto_grid(const HamiltonianModel& model, const PhaseVector& z, double t_max, double hbar,
                 int n_points = 2048);

struct GridWavefunction {
  Grid1D grid;
  CVec samples;

  double norm() const;
  /// |psi|^2 mass in the outer 2% of the domain on each side.
  double boundary_mass() const;
};

/// <a, b> = sum conj(a) b dx (antilinear in the first slot).
Complex grid_inner(const GridWavefunction& a, const GridWavefunction& b);

/// Coherent state phi_z on the grid: (pi hbar)^{-1/4}
/// exp(-(x-q)^2 / 2 hbar + i p (x - q/2) / hbar), renormalised to 1.
GridWavefunction discretize_coherent(const PhaseVector& z, const Grid1D& grid);

/// The propagation-theorem state e^{i gamma/hbar} T(z) Lambda_hbar R(F) g
/// assembled from a metaplectic Gaussian. Exact for quadratic Hamiltonians.
GridWavefunction discretize_gaussian(const GaussianState& g1, const PhaseVector& center,
                                     double gamma_action, const Grid1D& grid);

/// Expectations of x and of -i hbar d/dx.
std::pair<double, double> position_momentum_mean(const GridWavefunction& psi);

/// Strang split-operator propagation under H = p^2/2 + V(q) for time
/// t_final (either sign) in n_steps uniform steps.
GridWavefunction split_step_propagate(const HamiltonianModel& model, const GridWavefunction& psi,
                                      double t_final, int n_steps);

/// Step-count policy for oracle runs: n = max(min_steps, ceil(|t| / dt)).
struct StepPolicy {
  double dt = 2.5e-4;
  int min_steps = 32;
  int steps_for(double t) const;
};

/// Exact quantum fidelity |<U_0(t) phi_z, U_delta(t) phi_z>|^2 on the grid.
EchoSeries exact_fidelity(const HamiltonianModel& model0, const HamiltonianModel& model_delta,
                          const PhaseVector& z, const std::vector<double>& times, double hbar,
                          const Grid1D& grid, const StepPolicy& policy = {});

/// Exact return overlaps <phi_z, U(t) phi_z> along a time grid.
std::vector<Complex> return_overlap_series(const HamiltonianModel& model, const PhaseVector& z,
                                           const std::vector<double>& times, double hbar,
                                           const Grid1D& grid, const StepPolicy& policy = {});

/// Lowest k eigenvalues of -hbar^2/2 d^2/dx^2 + V (Fourier spectral kinetic,
/// diagonal potential), wrapped as a grid-diagonalization ladder with the
/// reference level nearest ref_energy.
SpectralLadder eigensolve_1d(const HamiltonianModel& model, double hbar, const Grid1D& grid,
                             int k, double ref_energy, int deriv_stencil = 4);

/// Raw eigenvalues (lowest k), for refinement studies.
std::vector<double> eigenvalues_1d(const HamiltonianModel& model, double hbar, const Grid1D& grid,
                                   int k);

struct WignerGrid {
  std::vector<double> q;  // n values
  std::vector<double> p;  // n values
  Mat w;                  // w(i,j) = W(q_i, p_j)
  double cell() const;    // dq * dp
};

/// FFT-based Wigner transform of psi (normalised so the integral is 1).
WignerGrid wigner_transform(const GridWavefunction& psi);

/// integral symbol(q,p) W_psi(q,p) dq dp.
Complex weyl_expectation(const std::function<Complex(double, double)>& symbol,
                         const GridWavefunction& psi);

/// Quantum side of the Egorov comparison: propagates phi_z under H_delta,
/// back under H_0, and pairs the observable's Weyl symbol with the Wigner
/// function of the echoed state.
EchoExpectationFn make_echo_expectation(const Grid1D& grid, const StepPolicy& policy = {});

}  // namespace echolab
