#include <doctest.h>

#include <random>

#include "echolab/metaplectic.hpp"
#include "echolab/oracle.hpp"

using namespace echolab;

namespace {

Grid1D unit_grid(int n = 2048, double half = 14.0) {
  Grid1D g;
  g.q_min = -half;
  g.q_max = half;
  g.n_points = n;
  g.hbar = 1.0;
  return g;
}

Mat rotation(double theta) {
  Mat f(2, 2);
  f << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  return f;
}

std::vector<Mat> rotation_path(double theta, int n = 64) {
  std::vector<Mat> p;
  for (int k = 0; k <= n; ++k) p.push_back(rotation(theta * k / n));
  return p;
}

// Random one-parameter subgroup path ending at exp(JS).
std::pair<Mat, std::vector<Mat>> random_f_with_path(std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-scale, scale);
  Mat S(2, 2);
  const double a = uni(rng), b = uni(rng), c = uni(rng);
  S << a, b, b, c;
  auto path = generator_path(standard_J(1) * S, 64);
  return {path.back(), path};
}

}  // namespace

TEST_SUITE_BEGIN("metaplectic");

TEST_CASE("metaplectic gaussian: identity, rotation, squeeze") {
  const auto id = metaplectic_on_gaussian(Mat::Identity(2, 2));
  CHECK(std::abs(id.width(0, 0) - Complex(0, 1)) < 1e-14);
  CHECK(std::abs(id.prefactor - Complex(std::pow(M_PI, -0.25), 0)) < 1e-14);

  const double theta = 0.8;
  const auto rot = metaplectic_on_gaussian(rotation(theta), rotation_path(theta));
  CHECK(std::abs(rot.width(0, 0) - Complex(0, 1)) < 1e-12);
  const Complex expected_phase = std::exp(Complex(0, -0.5 * theta));
  CHECK(std::abs(rot.prefactor / std::abs(rot.prefactor) - expected_phase) < 1e-12);

  Mat sq(2, 2);
  const double lam = 1.0;
  sq << std::exp(lam), 0, 0, std::exp(-lam);
  const auto squeezed = metaplectic_on_gaussian(sq);
  CHECK(std::abs(squeezed.width(0, 0) - Complex(0, std::exp(-2.0 * lam))) < 1e-12);
  const auto psi = discretize_gaussian(squeezed, PhaseVector::Zero(2), 0.0, unit_grid());
  CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("unitarity on the grid for random F") {
  for (std::uint64_t seed : {11u, 12u, 13u, 14u, 15u}) {
    auto [F, path] = random_f_with_path(seed);
    const auto gs = metaplectic_on_gaussian(F, path);
    const auto psi = discretize_gaussian(gs, PhaseVector::Zero(2), 0.0, unit_grid());
    CHECK(std::abs(psi.norm() - 1.0) < 1e-8);
    // Im(width) positive definite by construction
    CHECK(gs.width(0, 0).imag() > 0.0);
  }
}

TEST_CASE("composition at the gaussian level (widths)") {
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    auto [f1, p1] = random_f_with_path(seed);
    auto [f2, p2] = random_f_with_path(seed + 100);
    const auto one_then_two = apply_symplectic(metaplectic_on_gaussian(f1, p1), f2);
    const auto combined = metaplectic_on_gaussian(f2 * f1);
    CHECK(std::abs(one_then_two.width(0, 0) - combined.width(0, 0)) < 1e-8);
    CHECK(std::abs(std::abs(one_then_two.prefactor) - std::abs(combined.prefactor)) < 1e-8);
  }
}

TEST_CASE("gaussian_overlap: examples and quadrature sweep") {
  const PhaseVector zero = PhaseVector::Zero(2);
  CHECK(std::abs(gaussian_overlap(phase_point(0.4, -1.2), phase_point(0.4, -1.2)) -
                 Complex(1, 0)) < 1e-15);

  const Complex v = gaussian_overlap(phase_point(2, 0), zero);
  CHECK(std::abs(v - Complex(std::exp(-1.0), 0)) < 1e-14);  // e^{-1}, phase 1

  const Grid1D g = unit_grid();
  std::mt19937_64 rng(321);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  for (int k = 0; k < 100; ++k) {
    const PhaseVector X = phase_point(uni(rng), uni(rng));
    const PhaseVector Y = phase_point(uni(rng), uni(rng));
    const Complex formula = gaussian_overlap(X, Y);
    const Complex quad = grid_inner(discretize_coherent(X, g), discretize_coherent(Y, g));
    CHECK(std::abs(formula - quad) <= 1e-8 * std::max(1.0, std::abs(formula)));
    CHECK(std::abs(std::abs(formula) - std::exp(-0.25 * (X - Y).squaredNorm())) < 1e-12);
  }
}

TEST_CASE("matrix_element: identity cases and overlap consistency") {
  const Mat I = Mat::Identity(2, 2);
  const PhaseVector zero = PhaseVector::Zero(2);
  CHECK(std::abs(matrix_element(I, zero, zero) - Complex(1, 0)) < 1e-14);

  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> uni(-1.5, 1.5);
  for (int k = 0; k < 50; ++k) {
    const PhaseVector X = phase_point(uni(rng), uni(rng));
    const PhaseVector Y = phase_point(uni(rng), uni(rng));
    const Complex me = matrix_element(I, X, Y);
    const Complex ov = gaussian_overlap(Y + 0.5 * X, Y - 0.5 * X);
    CHECK(std::abs(me - ov) <= 1e-8 * std::max(1.0, std::abs(ov)));
  }
}

TEST_CASE("matrix_element: squeeze magnitude (cosh lambda)^{-1/2}") {
  Mat sq(2, 2);
  sq << std::exp(1.0), 0, 0, std::exp(-1.0);
  const PhaseVector zero = PhaseVector::Zero(2);
  const Complex me = matrix_element(sq, zero, zero);
  CHECK(std::abs(me) == doctest::Approx(std::pow(std::cosh(1.0), -0.5)).epsilon(1e-10));

  // grid cross-check: <g, R(F) g> by quadrature
  const auto psi = discretize_gaussian(metaplectic_on_gaussian(sq), PhaseVector::Zero(2), 0.0,
                                       unit_grid());
  const auto gref = discretize_coherent(zero, unit_grid());
  CHECK(std::abs(grid_inner(gref, psi) - me) < 1e-10);
}

TEST_CASE("matrix_element vs grid quadrature, random elliptic and hyperbolic F") {
  const Grid1D g = unit_grid(4096, 16.0);
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    auto [F, path] = random_f_with_path(900 + k);
    const PhaseVector X = phase_point(uni(rng), uni(rng));
    const PhaseVector Y = phase_point(uni(rng), uni(rng));

    const auto bra = discretize_coherent(Y + 0.5 * X, g);
    const auto gs = metaplectic_on_gaussian(F, path);
    const auto ket = discretize_gaussian(gs, F * (Y - 0.5 * X), 0.0, g);
    const Complex quad = grid_inner(bra, ket);

    std::vector<CMat> vpath;
    for (const Mat& fp : path) vpath.push_back(build_VF(fp));
    const Complex root = branch_sqrt_det(vpath).back().value;
    CHECK(std::abs(matrix_element_with_root(F, X, Y, root) - quad) < 1e-10);
  }
}

TEST_CASE("matrix_element properties: magnitude bounds and the return-amplitude identity") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    const Mat F = random_symplectic(1, 4000 + k, 1.1).m;
    const PhaseVector X = phase_point(uni(rng), uni(rng));
    const PhaseVector Y = phase_point(uni(rng), uni(rng));
    const double mag = std::abs(matrix_element(F, X, Y));
    CHECK(mag <= 1.0 + 1e-10);  // Cauchy-Schwarz for unit vectors

    const double det_mag = std::abs(build_VF(F).determinant());
    CHECK(std::abs(matrix_element(F, PhaseVector::Zero(2), PhaseVector::Zero(2))) ==
          doctest::Approx(std::pow(det_mag, -0.5)).epsilon(1e-8));

    // |<g, T(w) R(F) g>| = |det V|^{-1/2} exp(Re (1/4) Gamma_F w.w)
    const PhaseVector w = phase_point(uni(rng), uni(rng));
    const double lhs = std::abs(matrix_element(F, -w, -0.5 * w));
    const double expo = (0.25 * quad_form(build_GammaF(F), w)).real();
    CHECK(lhs == doctest::Approx(std::pow(det_mag, -0.5) * std::exp(expo)).epsilon(1e-10));
  }
}

TEST_CASE("mw_weyl_symbol: normalisation and rotation magnitude") {
  const Mat I = Mat::Identity(2, 2);
  for (double q : {-1.0, 0.0, 2.0})
    CHECK(std::abs(mw_weyl_symbol(I, phase_point(q, 0.3 * q)) - Complex(1, 0)) < 1e-14);

  const Complex at_quarter_turn = mw_weyl_symbol(rotation(M_PI / 2), PhaseVector::Zero(2));
  CHECK(std::abs(at_quarter_turn) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  CHECK_THROWS_AS(static_cast<void>(mw_weyl_symbol(-I, PhaseVector::Zero(2))), Error);
  try {
    static_cast<void>(mw_weyl_symbol(-I, PhaseVector::Zero(2)));
  } catch (const Error& e) {
    CHECK(e.code == ErrorCode::singular_matrix);  // eigenvalue -1 case is out of scope
  }
}

TEST_CASE("mw_weyl_symbol pairs with the Wigner function to the matrix element") {
  Grid1D g = unit_grid(1024, 12.0);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    auto [F, path] = random_f_with_path(600 + k, 0.9);
    const PhaseVector Y = phase_point(uni(rng), uni(rng));
    const auto gy = discretize_coherent(Y, g);

    const Complex half_root = branch_sqrt_det(mw_root_path(path)).back().value;
    const Complex paired = weyl_expectation(
        [&](double q, double p) { return mw_weyl_symbol_with_root(F, phase_point(q, p), half_root); },
        gy);

    std::vector<CMat> vpath;
    for (const Mat& fp : path) vpath.push_back(build_VF(fp));
    const Complex me = matrix_element_with_root(F, PhaseVector::Zero(2), Y,
                                                branch_sqrt_det(vpath).back().value);
    CHECK(std::abs(paired - me) < 1e-6);
  }
}

TEST_SUITE_END();
