#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "echolab/symplectic.hpp"
#include "echolab/types.hpp"

namespace echolab {

/// A smooth classical Hamiltonian on R^{2d} with analytic derivatives.
/// The 1-D built-ins additionally expose the kinetic-plus-potential split
/// H = p^2/2 + V(q) that the grid propagator needs.
struct HamiltonianModel {
  int dim = 1;
  std::string name;
  std::function<double(const PhaseVector&)> value;
  std::function<PhaseVector(const PhaseVector&)> grad;
  std::function<Mat(const PhaseVector&)> hess;

  bool has_kinetic_split = false;
  std::function<double(double)> potential;        // V(q)
  std::function<double(double)> potential_deriv;  // V'(q)
};

// Built-in 1-D models. harmonic: H = (p^2 + w^2 q^2)/2; quartic: p^2/2 + q^4;
// anharmonic: p^2/2 + q^2/2 + alpha q^4; pendulum: p^2/2 - cos q;
// double_well: p^2/2 + (q^2-1)^2/4.
HamiltonianModel harmonic_model(double omega = 1.0);
HamiltonianModel quartic_model();
HamiltonianModel anharmonic_model(double alpha = 1.0);
HamiltonianModel pendulum_model();
HamiltonianModel double_well_model();

// Built-in perturbations V(X) (q-dependent, so the split survives):
// linear_q: V = q; quadratic_q: V = q^2; cos_q: V = cos q.
HamiltonianModel linear_q_perturbation();
HamiltonianModel quadratic_q_perturbation();
HamiltonianModel cos_q_perturbation();

/// H_delta = H0 + delta * V.
HamiltonianModel perturbed_model(const HamiltonianModel& h0, const HamiltonianModel& v, double delta);

HamiltonianModel model_by_name(const std::string& name, double param);
HamiltonianModel perturbation_by_name(const std::string& name);

struct ModelConsistency {
  double max_hess_asymmetry = 0.0;   // max-norm of H'' - H''~ over the sample
  double max_grad_rel_error = 0.0;   // central-difference check of grad vs value
};

/// Stochastic consistency check of a model's derivative callbacks at seeded
/// sample points: the Hessian must be symmetric (1e-10) and the gradient
/// must match central finite differences of the value (rel. 1e-5).
ModelConsistency check_model_consistency(const HamiltonianModel& model, int n_points = 32,
                                         std::uint64_t seed = 1, double box = 2.0);

struct IntegratorOptions {
  double rel_tol = 1e-11;
  double abs_tol = 1e-13;
  double max_step = 0.25;
  long max_steps = 20'000'000;
  // Post-hoc validation of the bundle invariants (set to skip for models
  // that are deliberately driven outside the trusted regime).
  bool validate = true;
  double symp_tol = kTolFlow;     // max-norm symplectic defect of F_t
  double energy_tol = 1e-9;       // relative energy drift
};

/// Trajectory, stability matrix, action phase and diagnostics on a time grid.
struct TrajectoryBundle {
  std::vector<double> times;
  std::vector<PhaseVector> points;   // z_t
  std::vector<Mat> stability;        // F_t, dF/dt = J H''(z_t) F, F_0 = I
  std::vector<double> action;        // gamma_t = 1/2 int z.grad H ds - t H(z_0)
  std::vector<double> energy;        // H(z_t)
  double lyapunov_estimate = 0.0;    // log ||F_T|| / T at the final time
  double max_symplectic_defect = 0.0;
  double max_energy_drift = 0.0;     // relative

  const PhaseVector& final_point() const { return points.back(); }
  const Mat& final_stability() const { return stability.back(); }
};

/// Jointly integrates z, F and gamma over the given strictly increasing
/// time grid (times[0] = 0) with an adaptive embedded Runge-Kutta pair.
TrajectoryBundle evolve(const HamiltonianModel& model, const PhaseVector& z0,
                        const std::vector<double>& times,
                        const IntegratorOptions& opts = {});

/// Uniform grid helper: n+1 samples covering [0, t_max].
std::vector<double> uniform_times(double t_max, int n);

struct ActionPeriod {
  double action = 0.0;  // J(E), enclosed phase-space area
  double period = 0.0;  // T_E = J'(E)
  double q_minus = 0.0, q_plus = 0.0;  // turning points
};

/// Action integral and period of the closed orbit at energy E for a 1-D
/// confining one-well model. The turning points are located inside
/// [search_lo, search_hi] (auto-expanded around the potential minimum
/// when no bracket is supplied).
ActionPeriod action_and_period(const HamiltonianModel& model, double E,
                               std::optional<std::pair<double, double>> bracket = {});

/// Classical echo E^{(cl)}(t, X): flow forward under H_delta for time t,
/// then backward under H_0.
PhaseVector classical_echo(const HamiltonianModel& model0, const HamiltonianModel& model_delta,
                           const PhaseVector& X, double t, const IntegratorOptions& opts = {});

/// A phase-space observable with gradient (for Egorov comparisons).
struct Observable {
  std::string name;
  std::function<double(const PhaseVector&)> value;
  std::function<Complex(double, double)> symbol;  // (q, p) -> Weyl symbol value
};

/// Smooth compactly supported bump in q: amp * chi((q - center)/width),
/// chi the standard plateau bump (1 on [-1/2,1/2], supported in (-1,1)).
Observable bump_q_observable(double center, double width, double amp = 1.0);
Observable h0_observable(const HamiltonianModel& model);

/// Quantum side of the Egorov comparison, supplied by the grid oracle:
/// returns <E^q(t) phi_z | Op(L) E^q(t) phi_z>.
using EchoExpectationFn = std::function<Complex(
    const HamiltonianModel& model0, const HamiltonianModel& model_delta,
    const PhaseVector& z, double t, double hbar, const Observable& L)>;

/// | quantum echo expectation - L(E^{(cl)}(t,z)) |.
double egorov_defect(const HamiltonianModel& model0, const HamiltonianModel& model_delta,
                     const Observable& L, const PhaseVector& z, double t, double hbar,
                     const EchoExpectationFn& oracle, const IntegratorOptions& opts = {});

/// Ehrenfest advisory: sqrt(hbar) ||F||^3 (1+|t|) > 1 flags the time as
/// outside the trusted semiclassical window.
bool ehrenfest_exceeded(double hbar, const Mat& F, double t);

}  // namespace echolab
