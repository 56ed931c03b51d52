#include "echolab/echo.hpp"

#include <cmath>

namespace echolab {

CMat lambda_matrix(const Mat& F0, const Mat& F) {
  Eigen::FullPivLU<Mat> lu(F0);
  if (!lu.isInvertible()) fail(ErrorCode::singular_matrix, "lambda_matrix: F0 not invertible");
  const Mat F0inv = lu.inverse();
  const CMat gamma = build_GammaF(F);
  return 0.25 * F0inv.transpose().cast<Complex>() * gamma * F0inv.cast<Complex>();
}

double beta_phase(const PhaseVector& zt_delta, const PhaseVector& zt_0) {
  return -0.5 * symplectic_form(zt_delta, zt_0);
}

namespace {

constexpr double kCausticEps = 1e-12;

// Shared assembly: evaluates prefactor^power * exp(expo) per time and fills
// flags. `eval` returns (|det V|, exponent, F-for-ehrenfest).
template <typename Eval>
EchoSeries assemble_series(const std::vector<double>& times, double hbar, double power,
                           Eval&& eval) {
  EchoSeries s;
  s.times = times;
  const std::size_t n = times.size();
  s.values.resize(n);
  s.prefactors.resize(n);
  s.exponents.resize(n);
  s.flags.assign(n, flag_none);
  for (std::size_t k = 0; k < n; ++k) {
    auto [abs_det_v, expo, f_for_flag] = eval(k);
    std::uint8_t fl = flag_none;
    if (ehrenfest_exceeded(hbar, f_for_flag, times[k])) fl |= flag_ehrenfest;
    if (abs_det_v < kCausticEps) {
      // No regularisation: record the caustic, leave the value out.
      fl |= flag_caustic;
      s.values[k] = std::numeric_limits<double>::quiet_NaN();
      s.prefactors[k] = std::numeric_limits<double>::quiet_NaN();
      s.exponents[k] = expo;
      s.flags[k] = fl;
      continue;
    }
    s.prefactors[k] = std::pow(abs_det_v, -power);
    s.exponents[k] = expo;
    s.values[k] = s.prefactors[k] * std::exp(expo);
    s.flags[k] = fl;
  }
  return s;
}

}  // namespace

EchoSeries return_amplitude(const HamiltonianModel& model, const PhaseVector& z,
                            const std::vector<double>& times, double hbar,
                            const IntegratorOptions& opts) {
  const TrajectoryBundle b = evolve(model, z, times, opts);
  return assemble_series(times, hbar, 0.5, [&](std::size_t k) {
    const Mat& F = b.stability[k];
    const double abs_det_v = std::abs(build_VF(F).determinant());
    const PhaseVector dz = b.points[k] - z;
    double expo = 0.0;
    if (dz.squaredNorm() > 0.0 && abs_det_v >= kCausticEps) {
      const Complex delta = 0.25 * quad_form(build_GammaF(F), dz);
      expo = delta.real() / hbar;
    }
    return std::tuple<double, double, const Mat&>(abs_det_v, expo, F);
  });
}

EchoSeries fidelity_leading(const HamiltonianModel& model0, const HamiltonianModel& model_delta,
                            const PhaseVector& z, const std::vector<double>& times, double hbar,
                            const IntegratorOptions& opts) {
  const TrajectoryBundle b0 = evolve(model0, z, times, opts);
  const TrajectoryBundle bd = evolve(model_delta, z, times, opts);
  std::vector<Mat> f_rel(times.size());
  for (std::size_t k = 0; k < times.size(); ++k)
    f_rel[k] = b0.stability[k].partialPivLu().solve(bd.stability[k]);
  return assemble_series(times, hbar, 1.0, [&](std::size_t k) {
    const Mat& F = f_rel[k];
    const double abs_det_v = std::abs(build_VF(F).determinant());
    const PhaseVector dz = bd.points[k] - b0.points[k];
    double expo = 0.0;
    if (dz.squaredNorm() > 0.0 && abs_det_v >= kCausticEps) {
      const Complex lam = quad_form(lambda_matrix(b0.stability[k], F), dz);
      expo = 2.0 * lam.real() / hbar;
    }
    return std::tuple<double, double, const Mat&>(abs_det_v, expo, bd.stability[k]);
  });
}

RevivalCheck revival_condition(const Mat& F0, const Mat& Fdelta, const PhaseVector& zt_delta,
                               const PhaseVector& zt_0, double tol) {
  RevivalCheck r;
  const Mat F = F0.partialPivLu().solve(Fdelta);
  const Mat gram = F.transpose() * F - Mat::Identity(F.rows(), F.cols());
  r.unitarity_defect = gram.cwiseAbs().maxCoeff();
  r.displacement_defect = (zt_delta - zt_0).norm();
  r.revived = r.displacement_defect <= tol && r.unitarity_defect <= tol;
  return r;
}

}  // namespace echolab
