#include <doctest.h>

#include <cmath>

#include "echolab/flow.hpp"

using namespace echolab;

TEST_SUITE_BEGIN("flow");

TEST_CASE("harmonic closed form: rotation, zero action phase") {
  const auto model = harmonic_model(1.0);
  const PhaseVector z0 = phase_point(1.0, 0.0);
  const auto b = evolve(model, z0, {0.0, M_PI / 4, M_PI / 2, M_PI, 2.0 * M_PI});
  for (std::size_t k = 0; k < b.times.size(); ++k) {
    const double t = b.times[k];
    Mat rot(2, 2);
    rot << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
    CHECK((b.points[k] - rot * z0).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((b.stability[k] - rot).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(b.action[k]) < 1e-10);  // z.grad H = 2H on trajectories
  }
  CHECK(b.points[2](0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(b.points[2](1) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("quartic long run: energy and symplecticity gates") {
  const auto model = quartic_model();
  const auto b = evolve(model, phase_point(1.0, 0.0), uniform_times(20.0, 80));
  CHECK(b.max_energy_drift <= 1e-9);
  CHECK(b.max_symplectic_defect <= 1e-8);

  // step-refinement convergence: tighter tolerances do not move the answer
  IntegratorOptions tight;
  tight.rel_tol = 1e-13;
  tight.abs_tol = 1e-15;
  const auto bt = evolve(model, phase_point(1.0, 0.0), {0.0, 20.0}, tight);
  CHECK((b.final_point() - bt.final_point()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("all built-ins pass the integrator gates over [0, 20]") {
  for (const auto& [model, z0] : {std::pair{harmonic_model(1.0), phase_point(1.0, 0.3)},
                                  {quartic_model(), phase_point(1.0, 0.0)},
                                  {anharmonic_model(1.0), phase_point(0.8, 0.2)},
                                  {pendulum_model(), phase_point(1.2, 0.0)},
                                  {double_well_model(), phase_point(1.4, 0.1)}}) {
    const auto b = evolve(model, z0, uniform_times(20.0, 40));
    CHECK(b.max_energy_drift <= 1e-9);
    CHECK(b.max_symplectic_defect <= 1e-8);
  }
}

TEST_CASE("evolve validation and failure paths") {
  const auto model = harmonic_model(1.0);
  CHECK_THROWS_AS(static_cast<void>(evolve(model, phase_point(1, 0), {0.1, 0.2})), Error);
  CHECK_THROWS_AS(static_cast<void>(evolve(model, phase_point(1, 0), {0.0, 0.5, 0.5})), Error);

  HamiltonianModel bad = model;
  bad.grad = [](const PhaseVector& z) -> PhaseVector {
    PhaseVector g(2);
    if (std::abs(z(0)) > 0.5) g << std::numeric_limits<double>::quiet_NaN(), 0.0;
    else g << z(0), z(1);
    return g;
  };
  try {
    static_cast<void>(evolve(bad, phase_point(0.9, 0.0), {0.0, 1.0}));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code == ErrorCode::model_evaluation);
  }
}

TEST_CASE("flow composition and action additivity") {
  const auto model = quartic_model();
  const PhaseVector z0 = phase_point(1.0, 0.0);
  const double t1 = 1.3, t2 = 0.9;
  const auto b1 = evolve(model, z0, {0.0, t1});
  const auto b2 = evolve(model, b1.final_point(), {0.0, t2});
  const auto b12 = evolve(model, z0, {0.0, t1 + t2});
  CHECK((b2.final_point() - b12.final_point()).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((b2.final_stability() * b1.final_stability() - b12.final_stability())
            .cwiseAbs()
            .maxCoeff() < 1e-8);
  CHECK(std::abs(b1.action.back() + b2.action.back() - b12.action.back()) < 1e-8);
}

TEST_CASE("action_and_period: harmonic circle") {
  const auto ap = action_and_period(harmonic_model(1.0), 1.0);
  CHECK(ap.action == doctest::Approx(2.0 * M_PI).epsilon(1e-9));
  CHECK(ap.period == doctest::Approx(2.0 * M_PI).epsilon(1e-9));
}

TEST_CASE("action_and_period: quartic scaling law") {
  const auto model = quartic_model();
  const double j1 = action_and_period(model, 1.0).action;
  const double j16 = action_and_period(model, 16.0).action;
  CHECK(j16 / j1 == doctest::Approx(8.0).epsilon(1e-6));  // J ~ E^{3/4}
}

TEST_CASE("action_and_period: pendulum period vs orbit-return oracle") {
  const auto model = pendulum_model();
  const double E = -0.5;
  const auto ap = action_and_period(model, E);

  // Brute-force oracle: start at the left turning point with p = 0; the orbit
  // reaches the right turning point after half a period. Bisect on p(t) = 0.
  const PhaseVector z0 = phase_point(ap.q_minus, 0.0);
  auto p_at = [&](double t) {
    return evolve(model, z0, {0.0, t}).final_point()(1);
  };
  double lo = 0.55 * ap.period / 2.0, hi = 1.45 * ap.period / 2.0;
  CHECK(p_at(lo) > 0.0);
  CHECK(p_at(hi) < 0.0);
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (p_at(mid) > 0.0 ? lo : hi) = mid;
  }
  const double half_period = 0.5 * (lo + hi);
  CHECK(std::abs(2.0 * half_period - ap.period) < 1e-6);
}

TEST_CASE("action_and_period error paths") {
  // inverted oscillator is not confining
  HamiltonianModel inv = harmonic_model(1.0);
  inv.potential = [](double q) { return -0.5 * q * q; };
  inv.potential_deriv = [](double q) { return -q; };
  try {
    static_cast<void>(action_and_period(inv, 1.0));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code == ErrorCode::non_confining);
  }
  // pendulum above the separatrix: no bounded bracket exists
  try {
    static_cast<void>(action_and_period(pendulum_model(), 1.0));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code == ErrorCode::non_confining);
  }
  // double well at the barrier energy: the orbit runs through the critical point
  try {
    static_cast<void>(action_and_period(double_well_model(), 0.25));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code == ErrorCode::singular_orbit);
  }
}

TEST_CASE("J'(E) from local differences matches the period") {
  const auto model = quartic_model();
  const double h = 1e-3;
  const double jp =
      (action_and_period(model, 1.0 + h).action - action_and_period(model, 1.0 - h).action) /
      (2.0 * h);
  CHECK(jp == doctest::Approx(action_and_period(model, 1.0).period).epsilon(1e-6));
}

TEST_CASE("classical echo") {
  const auto h0 = harmonic_model(1.0);
  const auto hd = perturbed_model(h0, linear_q_perturbation(), 0.1);
  const PhaseVector X = phase_point(1.0, 0.0);

  CHECK((classical_echo(h0, h0, X, 2.7) - X).cwiseAbs().maxCoeff() < 1e-9);  // delta = 0
  CHECK((classical_echo(h0, hd, X, 0.0) - X).cwiseAbs().maxCoeff() == 0.0);  // t = 0

  // closed form: echo(t, X) = X + delta (e1 - R_{-t} e1); at t = pi the shift is 2 delta
  for (double t : {0.7, M_PI, 4.0}) {
    PhaseVector shift(2);
    shift << 0.1 * (1.0 - std::cos(t)), 0.1 * (-std::sin(t));
    const PhaseVector echo = classical_echo(h0, hd, X, t);
    CHECK((echo - (X + shift)).cwiseAbs().maxCoeff() < 1e-9);
  }
  const PhaseVector at_pi = classical_echo(h0, hd, X, M_PI);
  CHECK((at_pi - X).norm() == doctest::Approx(0.2).epsilon(1e-8));
}

TEST_CASE("egorov defect plumbing with an exact classical handle") {
  const auto h0 = quartic_model();
  const auto hd = perturbed_model(h0, quadratic_q_perturbation(), 0.02);
  const auto L = bump_q_observable(0.5, 1.5);
  // A fake oracle that returns the classical value makes the defect vanish.
  EchoExpectationFn fake = [&](const HamiltonianModel& m0, const HamiltonianModel& md,
                               const PhaseVector& z, double t, double, const Observable& obs) {
    return Complex(obs.value(classical_echo(m0, md, z, t)), 0.0);
  };
  CHECK(egorov_defect(h0, hd, L, phase_point(1, 0), 1.0, 0.05, fake) < 1e-12);
}

TEST_CASE("bump observable shape") {
  const auto L = bump_q_observable(0.0, 1.0);
  CHECK(L.value(phase_point(0.3, 5.0)) == 1.0);
  CHECK(L.value(phase_point(0.49, 0.0)) == 1.0);
  CHECK(L.value(phase_point(0.8, 0.0)) > 0.0);
  CHECK(L.value(phase_point(0.8, 0.0)) < 1.0);
  CHECK(L.value(phase_point(1.1, 0.0)) == 0.0);
}

TEST_CASE("built-in model derivative callbacks are self-consistent") {
  for (const auto& model : {harmonic_model(1.0), quartic_model(), anharmonic_model(1.0),
                            pendulum_model(), double_well_model(),
                            perturbed_model(quartic_model(), cos_q_perturbation(), 0.3)}) {
    const auto mc = check_model_consistency(model, 32, 7);
    CHECK(mc.max_hess_asymmetry <= 1e-10);
    CHECK(mc.max_grad_rel_error <= 1e-5);
  }
}

TEST_CASE("evolve reports failure with the last valid time on a blow-up") {
  // Particle falling into a -1/q singularity: derivatives blow up and the
  // adaptive step collapses before the requested final time.
  HamiltonianModel sing;
  sing.dim = 1;
  sing.name = "coulomb_fall";
  sing.value = [](const PhaseVector& z) { return 0.5 * z(1) * z(1) - 1.0 / z(0); };
  sing.grad = [](const PhaseVector& z) {
    PhaseVector g(2);
    g << 1.0 / (z(0) * z(0)), z(1);
    return g;
  };
  sing.hess = [](const PhaseVector& z) {
    Mat h = Mat::Zero(2, 2);
    h(0, 0) = -2.0 / (z(0) * z(0) * z(0));
    h(1, 1) = 1.0;
    return h;
  };
  IntegratorOptions opts;
  opts.validate = false;
  opts.max_steps = 200000;
  try {
    static_cast<void>(evolve(sing, phase_point(1.0, 0.0), {0.0, 10.0}, opts));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code == ErrorCode::integration_failure);
    CHECK(e.detail > 0.0);    // last valid time is carried in the error
    CHECK(e.detail < 10.0);
  }
}

TEST_CASE("ehrenfest advisory") {
  CHECK_FALSE(ehrenfest_exceeded(0.01, Mat::Identity(2, 2), 1.0));
  Mat big(2, 2);
  big << 30.0, 0.0, 0.0, 1.0 / 30.0;
  CHECK(ehrenfest_exceeded(0.01, big, 1.0));
}

TEST_SUITE_END();
