#pragma once

#include <cstdint>
#include <vector>

#include "echolab/flow.hpp"
#include "echolab/symplectic.hpp"
#include "echolab/types.hpp"

namespace echolab {

enum SeriesFlag : std::uint8_t {
  flag_none = 0,
  flag_ehrenfest = 1,  // advisory: outside the trusted semiclassical window
  flag_caustic = 2,    // det V vanished; value not fabricated (NaN)
};

/// A per-time echo/return series with its prefactor/exponent decomposition.
struct EchoSeries {
  std::vector<double> times;
  std::vector<double> values;      // in [0, 1]
  std::vector<double> prefactors;  // |det V|^{-1/2} (return) or |det V|^{-1} (fidelity)
  std::vector<double> exponents;   // Re(Delta)/hbar or (2/hbar) Re Lambda dz.dz
  std::vector<std::uint8_t> flags;
};

/// Lambda_{t,z} = (1/4) (F0~)^{-1} Gamma_F F0^{-1}.
CMat lambda_matrix(const Mat& F0, const Mat& F);

/// beta_t = -(1/2) sigma(z_t^delta, z_t^0).
double beta_phase(const PhaseVector& zt_delta, const PhaseVector& zt_0);

/// Leading-order return amplitude r(t, z) = |det V_t|^{-1/2} exp(Re Delta_t / hbar),
/// Delta_t = (1/4) Gamma_{F_t} (z_t - z).(z_t - z).
EchoSeries return_amplitude(const HamiltonianModel& model, const PhaseVector& z,
                            const std::vector<double>& times, double hbar,
                            const IntegratorOptions& opts = {});

/// Leading-order fidelity
///   f(t) = |det V_F|^{-1} exp( (2/hbar) Re Lambda (dz).(dz) ),
/// F = F_0^{-1} F_delta, dz = z_t^delta - z_t^0.
EchoSeries fidelity_leading(const HamiltonianModel& model0, const HamiltonianModel& model_delta,
                            const PhaseVector& z, const std::vector<double>& times, double hbar,
                            const IntegratorOptions& opts = {});

struct RevivalCheck {
  bool revived = false;
  double displacement_defect = 0.0;  // |z_t^delta - z_t^0|
  double unitarity_defect = 0.0;     // max-norm of F~F - I, F = F0^{-1} Fdelta
};

/// Revival criterion: trajectories coincide and F_0^{-1} F_delta is unitary.
RevivalCheck revival_condition(const Mat& F0, const Mat& Fdelta, const PhaseVector& zt_delta,
                               const PhaseVector& zt_0, double tol = 1e-6);

}  // namespace echolab
