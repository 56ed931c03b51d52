#include "echolab/metaplectic.hpp"

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

namespace echolab {

GaussianState reference_gaussian(int d) {
  if (d < 1) fail(ErrorCode::invalid_dimension, "reference_gaussian: d must be >= 1");
  GaussianState g;
  g.dim = d;
  g.center = PhaseVector::Zero(2 * d);
  g.width = Complex(0.0, 1.0) * CMat::Identity(d, d);
  g.prefactor = std::pow(M_PI, -0.25 * d);
  return g;
}

static void split_blocks(const Mat& F, Mat& A, Mat& B, Mat& C, Mat& D) {
  const int d = static_cast<int>(F.rows() / 2);
  A = F.topLeftCorner(d, d);
  B = F.topRightCorner(d, d);
  C = F.bottomLeftCorner(d, d);
  D = F.bottomRightCorner(d, d);
}

std::vector<CMat> metaplectic_root_path(const std::vector<Mat>& f_path) {
  std::vector<CMat> out;
  out.reserve(f_path.size());
  for (const Mat& F : f_path) {
    Mat A, B, C, D;
    split_blocks(F, A, B, C, D);
    out.push_back(A.cast<Complex>() + Complex(0.0, 1.0) * B.cast<Complex>());
  }
  return out;
}

std::vector<CMat> mw_root_path(const std::vector<Mat>& f_path) {
  std::vector<CMat> out;
  out.reserve(f_path.size());
  for (const Mat& F : f_path) {
    const int n = static_cast<int>(F.rows());
    out.push_back(0.5 * (Mat::Identity(n, n) + F).cast<Complex>());
  }
  return out;
}

std::vector<Mat> generator_path(const Mat& JS, int n_steps) {
  if (n_steps < 1) fail(ErrorCode::validation, "generator_path: n_steps must be >= 1");
  std::vector<Mat> path;
  path.reserve(n_steps + 1);
  for (int k = 0; k <= n_steps; ++k) {
    const double s = static_cast<double>(k) / n_steps;
    path.push_back((s * JS).exp());
  }
  return path;
}

GaussianState metaplectic_on_gaussian(const Mat& F, const std::vector<Mat>& path) {
  const int d = static_cast<int>(F.rows() / 2);
  Mat A, B, C, D;
  split_blocks(F, A, B, C, D);
  const CMat AiB = A.cast<Complex>() + Complex(0.0, 1.0) * B.cast<Complex>();
  const CMat CiD = C.cast<Complex>() + Complex(0.0, 1.0) * D.cast<Complex>();
  Eigen::FullPivLU<CMat> lu(AiB);
  if (!lu.isInvertible())
    fail(ErrorCode::singular_matrix, "metaplectic_on_gaussian: A + iB singular");

  Complex root;
  if (path.empty()) {
    root = std::pow(AiB.determinant(), -0.5);
  } else {
    if ((path.back() - F).cwiseAbs().maxCoeff() > 1e-12)
      fail(ErrorCode::validation, "metaplectic_on_gaussian: path must end at F");
    root = branch_sqrt_det(metaplectic_root_path(path)).back().value;
  }

  GaussianState out;
  out.dim = d;
  out.center = PhaseVector::Zero(2 * d);
  out.width = CiD * lu.inverse();
  out.prefactor = std::pow(M_PI, -0.25 * d) * root;

  // normalisability: Im(width) must be positive definite
  Eigen::SelfAdjointEigenSolver<Mat> esm(out.width.imag());
  if (esm.eigenvalues().minCoeff() <= 0.0)
    fail(ErrorCode::assumption_violation,
         "metaplectic_on_gaussian: Im(width) not positive definite",
         esm.eigenvalues().minCoeff());
  return out;
}

GaussianState apply_symplectic(const GaussianState& s, const Mat& F) {
  const int d = s.dim;
  Mat A, B, C, D;
  split_blocks(F, A, B, C, D);
  const CMat num = C.cast<Complex>() + D.cast<Complex>() * s.width;
  const CMat den = A.cast<Complex>() + B.cast<Complex>() * s.width;
  Eigen::FullPivLU<CMat> lu(den);
  if (!lu.isInvertible()) fail(ErrorCode::singular_matrix, "apply_symplectic: caustic");
  GaussianState out;
  out.dim = d;
  out.center = F * s.center;
  out.width = num * lu.inverse();
  // |prefactor| fixed by unit norm: ||psi||^2 = |c|^2 (pi^d / det Im(width))^{1/2}.
  CMat im(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) im(i, j) = std::imag(out.width(i, j));
  const double det_im = im.real().determinant();
  if (det_im <= 0.0) fail(ErrorCode::assumption_violation, "apply_symplectic: lost positivity");
  out.prefactor = std::pow(det_im / std::pow(M_PI, d), 0.25);
  return out;
}

Complex gaussian_overlap(const PhaseVector& X, const PhaseVector& Y) {
  if (X.size() != Y.size()) fail(ErrorCode::invalid_dimension, "gaussian_overlap: mixed dims");
  const double d2 = (X - Y).squaredNorm();
  return std::exp(Complex(-0.25 * d2, 0.5 * symplectic_form(X, Y)));
}

Complex matrix_element_with_root(const Mat& F, const PhaseVector& X, const PhaseVector& Y,
                                 Complex det_v_root) {
  const int n = static_cast<int>(F.rows());
  if (X.size() != n || Y.size() != n)
    fail(ErrorCode::invalid_dimension, "matrix_element: phase point dimension mismatch");
  const int d = n / 2;

  // <g_{P1}, R(F) g_{P2}> with R(F) g_{P2} = T(F P2) R(F) g reduces to
  //   exp((i/2) sigma(P1, F P2)) * <g, T(w) R(F) g>,   w = F P2 - P1,
  // and the remaining Weyl-translated overlap is a single Gaussian integral
  // against the metaplectic width G = (C+iD)(A+iB)^{-1}:
  //   <g, T(w) R(F) g> = det(V_F)^{-1/2} exp(E(w)),
  //   E(w) = -1/2 (I-iG)^{-1}(v-Gu).(v-Gu) + (i/2) Gu.u - (i/2) v.u,
  // with w = (u, v). This is the source formula's matrix element with its
  // constants fixed by the F = I overlap (validated against quadrature).
  const PhaseVector p1 = Y + 0.5 * X;
  const PhaseVector p2 = Y - 0.5 * X;
  const PhaseVector fp2 = F * p2;
  const PhaseVector w = fp2 - p1;

  Mat A = F.topLeftCorner(d, d), B = F.topRightCorner(d, d);
  Mat C = F.bottomLeftCorner(d, d), D = F.bottomRightCorner(d, d);
  const CMat AiB = A.cast<Complex>() + Complex(0.0, 1.0) * B.cast<Complex>();
  const CMat G = (C.cast<Complex>() + Complex(0.0, 1.0) * D.cast<Complex>()) *
                 AiB.fullPivLu().inverse();
  const CVec u = w.head(d).cast<Complex>();
  const CVec v = w.tail(d).cast<Complex>();
  const CVec r = v - G * u;
  const CMat M = CMat::Identity(d, d) - Complex(0.0, 1.0) * G;
  const Complex quad_r = (r.transpose() * M.fullPivLu().solve(r))(0);
  const Complex e_w = -0.5 * quad_r + Complex(0.0, 0.5) * ((u.transpose() * G * u)(0) -
                                                           (v.transpose() * u)(0));
  const Complex phase = Complex(0.0, 0.5) * symplectic_form(p1, fp2);
  return det_v_root * std::exp(phase + e_w);
}

Complex matrix_element(const Mat& F, const PhaseVector& X, const PhaseVector& Y) {
  const Complex det_v = build_VF(F).determinant();
  return matrix_element_with_root(F, X, Y, std::pow(det_v, -0.5));
}

Complex mw_weyl_symbol_with_root(const Mat& F, const PhaseVector& X, Complex half_det_root) {
  const int n = static_cast<int>(F.rows());
  const int d = n / 2;
  const Mat I = Mat::Identity(n, n);
  Eigen::FullPivLU<Mat> lu(I + F);
  if (!lu.isInvertible())
    fail(ErrorCode::singular_matrix, "mw_weyl_symbol: det(I+F) = 0 (eigenvalue -1)");
  const Mat N = standard_J(d) * (I - F) * lu.inverse();
  const double form = X.dot(N * X);
  return half_det_root * std::exp(Complex(0.0, -form));
}

Complex mw_weyl_symbol(const Mat& F, const PhaseVector& X) {
  const int n = static_cast<int>(F.rows());
  const Complex half_det = (0.5 * (Mat::Identity(n, n) + F)).cast<Complex>().determinant();
  return mw_weyl_symbol_with_root(F, X, std::pow(half_det, -0.5));
}

}  // namespace echolab
