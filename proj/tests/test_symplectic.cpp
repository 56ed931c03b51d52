#include <doctest.h>

#include <random>

#include "echolab/symplectic.hpp"

using namespace echolab;

TEST_SUITE_BEGIN("symplectic");

TEST_CASE("standard_J basics") {
  const Mat J1 = standard_J(1);
  Mat expect(2, 2);
  expect << 0, 1, -1, 0;
  CHECK((J1 - expect).cwiseAbs().maxCoeff() == 0.0);

  for (int d : {1, 2, 3}) {
    const Mat J = standard_J(d);
    const Mat I = Mat::Identity(2 * d, 2 * d);
    CHECK((J * J + I).cwiseAbs().maxCoeff() == 0.0);        // J^2 = -I
    CHECK((J.transpose() + J).cwiseAbs().maxCoeff() == 0.0);  // J~ = -J
    CHECK((J.transpose() - J.inverse()).cwiseAbs().maxCoeff() < 1e-15);
  }
  CHECK_THROWS_AS(standard_J(0), Error);
}

TEST_CASE("is_symplectic") {
  CHECK(is_symplectic(Mat::Identity(2, 2), 1e-12));
  Mat area(2, 2);
  area << 2.0, 0.0, 0.0, 0.5;
  CHECK(is_symplectic(area, 1e-12));
  Mat bad(2, 2);
  bad << 2.0, 0.0, 0.0, 2.0;
  CHECK_FALSE(is_symplectic(bad, 1e-12));
  CHECK_THROWS_AS(is_symplectic(Mat::Identity(3, 3), 1e-12), Error);
}

TEST_CASE("random_symplectic generator") {
  const SympMatrix id = random_symplectic(2, 5, 0.0);
  CHECK((id.m - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

  const SympMatrix a = random_symplectic(1, 99, 1.0);
  const SympMatrix b = random_symplectic(1, 99, 1.0);
  CHECK((a.m - b.m).cwiseAbs().maxCoeff() == 0.0);  // determinism

  const SympMatrix f = random_symplectic(2, 7, 1.0);
  CHECK(is_symplectic(f.m, 1e-10));
  for (int d : {1, 2, 3})
    for (std::uint64_t seed = 0; seed < 20; ++seed)
      CHECK(is_symplectic(random_symplectic(d, seed, 1.5).m, 1e-10));
}

TEST_CASE("build_VF examples") {
  const Mat I = Mat::Identity(2, 2);
  CHECK((build_VF(I) - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(std::abs(build_VF(I).determinant() - Complex(1, 0)) < 1e-15);

  const CMat Vm = build_VF(-I);
  const CMat iJ = Complex(0, 1) * standard_J(1).cast<Complex>();
  CHECK((Vm - iJ).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(std::abs(std::abs(Vm.determinant()) - 1.0) < 1e-15);

  Mat hyp(2, 2);
  hyp << std::exp(1.0), 0.0, 0.0, std::exp(-1.0);
  // det V = cosh(lambda) for the diagonal hyperbolic map (direct evaluation)
  CHECK(std::abs(build_VF(hyp).determinant() - Complex(std::cosh(1.0), 0)) < 1e-12);
}

TEST_CASE("block determinant identity") {
  for (int d : {1, 2, 3})
    for (std::uint64_t seed = 40; seed < 60; ++seed) {
      const Mat F = random_symplectic(d, seed, 1.2).m;
      CHECK(std::abs(build_VF(F).determinant() - det_VF_block(F)) < 1e-10);
    }
}

TEST_CASE("build_KF") {
  const Mat I = Mat::Identity(2, 2);
  CHECK((build_KF(I) - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(build_KF(-I).cwiseAbs().maxCoeff() < 1e-15);  // (I+F) = 0 forces K = 0

  // Remark identity (I + iJ(I-F)(I+F)^{-1}) K_F = I when det(I+F) != 0
  const Mat F = random_symplectic(1, 3, 1.0).m;
  const CMat J = standard_J(1).cast<Complex>();
  const CMat lhs = (CMat::Identity(2, 2) +
                    Complex(0, 1) * J * (I - F).cast<Complex>() *
                        (I + F).inverse().cast<Complex>()) *
                   build_KF(F);
  CHECK((lhs - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("build_GammaF") {
  const Mat I = Mat::Identity(2, 2);
  CHECK((build_GammaF(I) + CMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);

  // complex symmetry over random symplectic inputs
  for (int d : {1, 2})
    for (std::uint64_t seed = 10; seed < 30; ++seed) {
      const CMat G = build_GammaF(random_symplectic(d, seed, 1.0).m);
      CHECK((G - G.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    }

  // F = I: (1/4) Gamma X.X = -|X|^2/4, the free coherent overlap exponent
  Vec X(2);
  X << 1.3, -0.4;
  const Complex q = 0.25 * quad_form(build_GammaF(I), X);
  CHECK(std::abs(q - Complex(-0.25 * X.squaredNorm(), 0.0)) < 1e-14);
}

TEST_CASE("determinant bound: |det V_F| >= 1, equality iff orthogonal") {
  std::mt19937_64 seeds(2024);
  int count = 0;
  for (int d : {1, 2, 3}) {
    for (int k = 0; k < 340; ++k) {
      const Mat F = random_symplectic(d, seeds(), 1.5).m;
      CHECK(std::abs(build_VF(F).determinant()) >= 1.0 - 1e-10);
      ++count;
    }
  }
  CHECK(count >= 1000);

  for (int k = 0; k < 100; ++k) {
    const int d = 1 + (k % 3);
    const Mat F = random_orthosymplectic(d, 7000 + k).m;
    CHECK(std::abs(std::abs(build_VF(F).determinant()) - 1.0) <= 1e-10);
  }

  // strictly non-orthogonal inputs exceed 1
  for (int k = 0; k < 50; ++k) {
    const Mat F = random_symplectic(2, 500 + k, 1.5).m;
    const double gram_defect =
        (F.transpose() * F - Mat::Identity(4, 4)).cwiseAbs().maxCoeff();
    if (gram_defect > 1e-3) CHECK(std::abs(build_VF(F).determinant()) > 1.0 + 1e-12);
  }
}

TEST_CASE("quadratic-form bound: Re(1/4 Gamma X.X) <= -|X|^2 / (2(1+s_F))") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  int count = 0;
  for (int d : {1, 2, 3}) {
    for (int k = 0; k < 340; ++k) {
      const Mat F = random_symplectic(d, rng(), 1.2).m;
      const CMat G = build_GammaF(F);
      const double s = largest_stretch(F);
      Vec X(2 * d);
      for (int i = 0; i < 2 * d; ++i) X(i) = uni(rng);
      const double lhs = (0.25 * quad_form(G, X)).real();
      CHECK(lhs <= -X.squaredNorm() / (2.0 * (1.0 + s)) + 1e-10);
      ++count;
    }
  }
  CHECK(count >= 1000);
}

TEST_CASE("branch_sqrt_det continuation") {
  // constant path at the identity
  std::vector<CMat> path(8, CMat::Identity(2, 2));
  auto roots = branch_sqrt_det(path);
  for (const auto& r : roots) {
    CHECK(std::abs(r.value - Complex(1, 0)) < 1e-15);
    CHECK(r.winding == 0);
  }

  // scalar path det = e^{i theta}, theta: 0 -> 2 pi
  std::vector<Complex> dets;
  const int n = 200;
  for (int k = 0; k <= n; ++k)
    dets.push_back(std::exp(Complex(0.0, 2.0 * M_PI * k / n)));
  auto sroots = branch_sqrt_from_dets(dets);
  CHECK(std::abs(sroots.back().value - Complex(-1.0, 0.0)) < 1e-12);
  CHECK(sroots.back().winding == 2);

  // V_{F_t} for the harmonic-oscillator monodromy over one period
  std::vector<CMat> vpath;
  for (int k = 0; k <= 400; ++k) {
    const double t = 2.0 * M_PI * k / 400;
    Mat F(2, 2);
    F << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
    vpath.push_back(build_VF(F));
  }
  auto vroots = branch_sqrt_det(vpath);
  CHECK(std::abs(vroots.back().value - Complex(-1.0, 0.0)) < 1e-10);
  CHECK(vroots.back().winding == 2);

  // value^2 * det = 1 along the way (continuation consistency)
  for (std::size_t k = 0; k < vpath.size(); k += 37) {
    const Complex d = vpath[k].determinant();
    CHECK(std::abs(vroots[k].value * vroots[k].value * d - Complex(1, 0)) < 1e-12);
  }
}

TEST_CASE("branch_sqrt_det error paths") {
  // determinant hits zero (gentle steps, then the exact zero)
  std::vector<Complex> through_zero;
  for (int k = 0; k < 9; ++k) through_zero.emplace_back(std::pow(0.8, k), 0.0);
  through_zero.emplace_back(0.0, 0.0);
  try {
    static_cast<void>(branch_sqrt_from_dets(through_zero));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code == ErrorCode::caustic);
    CHECK(e.detail == doctest::Approx(9.0));  // index of the offending step
  }

  // step too large
  std::vector<Complex> big_step{Complex(1, 0), Complex(1.8, 0)};
  try {
    static_cast<void>(branch_sqrt_from_dets(big_step));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code == ErrorCode::refinement_required);
  }

  // path must start at det = 1
  std::vector<Complex> off_start{Complex(2, 0), Complex(2, 0)};
  CHECK_THROWS_AS(static_cast<void>(branch_sqrt_from_dets(off_start)), Error);
}

TEST_SUITE_END();
