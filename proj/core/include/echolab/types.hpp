#pragma once

#include <Eigen/Dense>
#include <complex>

#include "echolab/errors.hpp"

namespace echolab {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

/// A phase-space point z = (q, p) in R^{2d}, dimensionless natural units.
using PhaseVector = Eigen::VectorXd;

inline int phase_dim(const PhaseVector& z) {
  if (z.size() % 2 != 0 || z.size() == 0)
    fail(ErrorCode::invalid_dimension, "phase vector must have even positive size");
  return static_cast<int>(z.size() / 2);
}

inline auto q_part(const PhaseVector& z) { return z.head(z.size() / 2); }
inline auto p_part(const PhaseVector& z) { return z.tail(z.size() / 2); }

inline PhaseVector phase_point(double q, double p) {
  PhaseVector z(2);
  z << q, p;
  return z;
}

/// Symplectic form sigma(X, Y) = X . (J Y).
double symplectic_form(const PhaseVector& X, const PhaseVector& Y);

/// Quadratic form (M v) . v with a complex matrix and a real vector.
inline Complex quad_form(const CMat& M, const Vec& v) {
  return (v.cast<Complex>().transpose() * M * v.cast<Complex>())(0, 0);
}

}  // namespace echolab
