#include "echolab/symplectic.hpp"

#include <cmath>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

namespace echolab {

double symplectic_form(const PhaseVector& X, const PhaseVector& Y) {
  const int d = phase_dim(X);
  if (Y.size() != X.size())
    fail(ErrorCode::invalid_dimension, "symplectic_form: mixed dimensions");
  // X.(JY) = q_X.p_Y - p_X.q_Y, avoiding the explicit J product.
  return X.head(d).dot(Y.tail(d)) - X.tail(d).dot(Y.head(d));
}

Mat standard_J(int d) {
  if (d < 1) fail(ErrorCode::invalid_dimension, "standard_J: d must be >= 1");
  Mat J = Mat::Zero(2 * d, 2 * d);
  J.topRightCorner(d, d) = Mat::Identity(d, d);
  J.bottomLeftCorner(d, d) = -Mat::Identity(d, d);
  return J;
}

static int half_dim_checked(const Mat& F, const char* who) {
  if (F.rows() != F.cols() || F.rows() == 0 || F.rows() % 2 != 0)
    fail(ErrorCode::invalid_dimension, std::string(who) + ": matrix must be square with even dimension");
  return static_cast<int>(F.rows() / 2);
}

double symplectic_defect(const Mat& F) {
  const int d = half_dim_checked(F, "symplectic_defect");
  const Mat J = standard_J(d);
  return (F.transpose() * J * F - J).cwiseAbs().maxCoeff();
}

bool is_symplectic(const Mat& F, double tol) { return symplectic_defect(F) <= tol; }

SympMatrix SympMatrix::checked(Mat F, double tol) {
  const int d = half_dim_checked(F, "SympMatrix");
  const double defect = symplectic_defect(F);
  if (defect > tol)
    fail(ErrorCode::assumption_violation, "SympMatrix: symplectic defect exceeds tolerance", defect);
  return SympMatrix{d, std::move(F)};
}

SympMatrix SympMatrix::trusted(Mat F) {
  const int d = half_dim_checked(F, "SympMatrix");
  return SympMatrix{d, std::move(F)};
}

SympMatrix random_symplectic(int d, std::uint64_t seed, double scale) {
  if (d < 1) fail(ErrorCode::invalid_dimension, "random_symplectic: d must be >= 1");
  if (scale < 0.0) fail(ErrorCode::validation, "random_symplectic: scale must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-scale, scale);
  Mat S = Mat::Zero(2 * d, 2 * d);
  for (int i = 0; i < 2 * d; ++i)
    for (int j = i; j < 2 * d; ++j) {
      const double v = uni(rng);
      S(i, j) = v;
      S(j, i) = v;
    }
  const Mat JS = standard_J(d) * S;
  return SympMatrix::trusted(JS.exp());
}

SympMatrix random_orthosymplectic(int d, std::uint64_t seed) {
  if (d < 1) fail(ErrorCode::invalid_dimension, "random_orthosymplectic: d must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  CMat A = CMat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    A(i, i) = Complex(uni(rng), 0.0);
    for (int j = i + 1; j < d; ++j) {
      A(i, j) = Complex(uni(rng), uni(rng));
      A(j, i) = std::conj(A(i, j));
    }
  }
  const CMat U = (Complex(0.0, 1.0) * A).exp();  // unitary
  Mat F(2 * d, 2 * d);
  F.topLeftCorner(d, d) = U.real();
  F.topRightCorner(d, d) = U.imag();
  F.bottomLeftCorner(d, d) = -U.imag();
  F.bottomRightCorner(d, d) = U.real();
  return SympMatrix::trusted(F);
}

CMat build_VF(const Mat& F) {
  const int d = half_dim_checked(F, "build_VF");
  const Mat I = Mat::Identity(2 * d, 2 * d);
  const Mat J = standard_J(d);
  return 0.5 * ((I + F).cast<Complex>() + Complex(0.0, 1.0) * (J * (I - F)).cast<Complex>());
}

Complex det_VF_block(const Mat& F) {
  const int d = half_dim_checked(F, "det_VF_block");
  const Mat A = F.topLeftCorner(d, d);
  const Mat B = F.topRightCorner(d, d);
  const Mat C = F.bottomLeftCorner(d, d);
  const Mat D = F.bottomRightCorner(d, d);
  const CMat M = 0.5 * ((A + D).cast<Complex>() + Complex(0.0, 1.0) * (B - C).cast<Complex>());
  return M.determinant();
}

CMat build_KF(const Mat& F) {
  const int d = half_dim_checked(F, "build_KF");
  const CMat twoV = 2.0 * build_VF(F);
  Eigen::FullPivLU<CMat> lu(twoV);
  if (!lu.isInvertible())
    fail(ErrorCode::singular_matrix, "build_KF: 2 V_F is singular (caustic)");
  const Mat IpF = Mat::Identity(2 * d, 2 * d) + F;
  return IpF.cast<Complex>() * lu.inverse();  // (I+F) (2 V_F)^{-1}
}

CMat build_GammaF(const Mat& F) {
  const int d = half_dim_checked(F, "build_GammaF");
  const CMat I = CMat::Identity(2 * d, 2 * d);
  const CMat iJ = Complex(0.0, 1.0) * standard_J(d).cast<Complex>();
  const CMat K = build_KF(F);
  return (I + iJ) * K * (I - iJ) - I;
}

double largest_stretch(const Mat& F) {
  Eigen::SelfAdjointEigenSolver<Mat> es(F.transpose() * F, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

std::vector<BranchedRoot> branch_sqrt_from_dets(const std::vector<Complex>& dets) {
  if (dets.empty()) return {};
  if (std::abs(dets.front() - Complex(1.0, 0.0)) > 1e-8)
    fail(ErrorCode::validation, "branch_sqrt: path must start at det = 1",
         std::abs(dets.front() - Complex(1.0, 0.0)));
  std::vector<BranchedRoot> out(dets.size());
  double phase = 0.0;  // accumulated arg(det)
  for (std::size_t k = 0; k < dets.size(); ++k) {
    const Complex dk = dets[k];
    if (std::abs(dk) < 1e-300)
      fail(ErrorCode::caustic, "branch_sqrt: determinant vanishes along the path",
           static_cast<double>(k));
    if (k > 0) {
      const Complex prev = dets[k - 1];
      const double rel_step = std::abs(dk - prev) / std::abs(prev);
      if (rel_step >= 0.5)
        fail(ErrorCode::refinement_required,
             "branch_sqrt: determinant step too large, refine the path",
             static_cast<double>(k));
      phase += std::arg(dk / prev);
    }
    out[k].value = std::exp(Complex(-0.5 * std::log(std::abs(dk)), -0.5 * phase));
    out[k].winding = static_cast<int>(std::lround(phase / M_PI));
  }
  return out;
}

std::vector<BranchedRoot> branch_sqrt_det(const std::vector<CMat>& path) {
  std::vector<Complex> dets;
  dets.reserve(path.size());
  for (const CMat& M : path) dets.push_back(M.determinant());
  return branch_sqrt_from_dets(dets);
}

}  // namespace echolab
