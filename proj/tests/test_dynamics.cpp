#include "beltrami/calibration.hpp"
#include "beltrami/dynamics.hpp"
#include "beltrami/errors.hpp"
#include "beltrami/spectral.hpp"

#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

using namespace beltrami;

namespace {

constexpr double kPi = std::numbers::pi;

double H(const Eigen::Vector3d& x, double B) { return std::cos(x[2]) + B * std::sin(x[0]); }

// Circle distance on [0, 2 pi).
double angle_gap(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 2 * kPi);
  return std::min(d, 2 * kPi - d);
}

}  // namespace

TEST_CASE("integrator: fifth order on the harmonic oscillator, dense output fourth order") {
  using State = Eigen::Vector2d;
  auto rhs = [](const State& y) { return State(y[1], -y[0]); };
  auto rk = make_integrator<2>(rhs, State(1.0, 0.0), 1e-11);
  double worst_dense = 0.0;
  while (rk.step(20.0)) {
    for (double s : {0.25, 0.5, 0.75}) {
      const double t = rk.t_prev() + s * (rk.t() - rk.t_prev());
      worst_dense = std::max(worst_dense, (rk.dense(t) - State(std::cos(t), -std::sin(t))).cwiseAbs().maxCoeff());
    }
  }
  CHECK((rk.x() - State(std::cos(20.0), -std::sin(20.0))).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(worst_dense < 1e-8);
  CHECK(rk.dense(rk.t()) == rk.x());

  // Local error of one step of size h on y' = 5 y scales like h^6.
  auto growth = [](const Eigen::Matrix<double, 1, 1>& y) { return Eigen::Matrix<double, 1, 1>(5.0 * y[0]); };
  double prev = 0.0;
  for (double h : {0.1, 0.05, 0.025}) {
    auto one = make_integrator<1>(growth, Eigen::Matrix<double, 1, 1>(1.0), 1.0);
    REQUIRE(one.step(h));
    REQUIRE(one.t() == h);
    const double err = std::abs(one.x()[0] - std::exp(5.0 * h));
    if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(6.0).epsilon(0.1));
    prev = err;
  }
}

TEST_CASE("integrator: invalid tolerance and stalled controller") {
  auto rhs = [](const Eigen::Matrix<double, 1, 1>& y) { return Eigen::Matrix<double, 1, 1>(y[0] * y[0]); };
  CHECK_THROWS_AS(make_integrator<1>(rhs, Eigen::Matrix<double, 1, 1>(1.0), 0.0), std::invalid_argument);
  // Blow-up at t = 1.
  auto rk = make_integrator<1>(rhs, Eigen::Matrix<double, 1, 1>(1.0), 1e-8);
  CHECK_THROWS_AS([&] { while (rk.step(2.0)) {} }(), StepSizeUnderflow);
}

TEST_CASE("field evaluator matches series evaluation and spectral Jacobian") {
  const VectorField v = random_beltrami(3, 11) + make_abc({0.3, -0.7, 1.1});
  const FieldEvaluator f(v);
  for (int i = 0; i < 20; ++i) {
    const Eigen::Vector3d x = torus_point(5, std::uint64_t(i));
    CHECK((f.value(x) - v.evaluate(x)).norm() < 1e-13);
    const Eigen::Matrix3d J = f.jacobian(x);
    for (int j = 0; j < 3; ++j) CHECK((J.col(j) - partial(v, j).evaluate(x)).norm() < 1e-13);
    CHECK(std::abs(J.trace()) < 1e-13);
  }
}

TEST_CASE("integrate: ABC(1,0,0) closed form") {
  const VectorField v = make_abc({1.0, 0.0, 0.0});
  const Eigen::Vector3d x0(0.3, 1.2, 0.7);
  const Trajectory tr = integrate(v, x0, 100.0, 1e-12);
  const Eigen::Vector3d exact = x0 + 100.0 * Eigen::Vector3d(std::sin(x0[2]), std::cos(x0[2]), 0.0);
  CHECK((tr.final_state - exact).cwiseAbs().maxCoeff() <= 1e-9);
  for (std::size_t i = 1; i < tr.times.size(); ++i) CHECK(tr.times[i] > tr.times[i - 1]);
  for (const auto& p : tr.points) CHECK((p.array() >= 0.0).all());
  for (const auto& p : tr.points) CHECK((p.array() < 2 * kPi).all());
  CHECK(tr.stats.steps > 0);
  CHECK(tr.stats.tol == 1e-12);
}

TEST_CASE("integrate: H conserved for ABC(1,0.5,0)") {
  const VectorField v = make_abc({1.0, 0.5, 0.0});
  const Eigen::Vector3d x0(0.4, 2.0, 1.0);
  const Trajectory tr = integrate(v, x0, 1e3, 1e-12);
  double drift = 0.0;
  for (const auto& p : tr.points) drift = std::max(drift, std::abs(H(p, 0.5) - H(x0, 0.5)));
  CHECK(drift <= 1e-8);
}

TEST_CASE("integrate: forward then backward returns to the start") {
  for (const ABCParams p : {ABCParams{1.0, 0.5, 0.0}, ABCParams{1.0, 0.5, 0.1}, ABCParams{1.0, 1.0, 1.0}}) {
    const VectorField v = make_abc(p);
    const Eigen::Vector3d x0(1.0, 2.0, 3.0);
    const Eigen::Vector3d xT = flow_map(v, x0, 20.0, 1e-12);
    const Eigen::Vector3d back = flow_map(v * -1.0, xT, 20.0, 1e-12);
    CHECK((back - x0).cwiseAbs().maxCoeff() <= 1e-7);
  }
  CHECK_THROWS_AS(integrate(make_abc({}), Eigen::Vector3d::Zero(), 0.0, 1e-9), std::invalid_argument);
  CHECK_THROWS_AS(integrate(make_abc({}), Eigen::Vector3d::Zero(), 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("poincare: C = 0 section points lie on the H level") {
  const VectorField v = make_abc({1.0, 0.5, 0.0});
  const Eigen::Vector3d x0(0.3, 0.0, 1.7);
  const double H0 = H(x0, 0.5) - std::cos(kPi / 2);
  const PoincareSection sec = poincare(v, SectionPlane{}, x0, 200);
  REQUIRE(sec.points.size() == 200);
  const FieldEvaluator f(v);
  for (std::size_t i = 0; i < sec.points.size(); ++i) {
    CHECK(std::abs(0.5 * std::sin(sec.points[i][0]) - H0) <= 1e-6);
    CHECK(angle_gap(sec.states[i][2], kPi / 2) <= 1e-9);
    CHECK(f.value(sec.states[i])[2] > 0.0);
    if (i > 0) CHECK(sec.times[i] > sec.times[i - 1]);
  }
  CHECK(sec.max_level_residual <= 1e-10);
}

TEST_CASE("poincare: direction, axes and errors") {
  const VectorField v = make_abc({1.0, 1.0, 1.0});
  const FieldEvaluator f(v);
  for (int axis = 0; axis < 3; ++axis)
    for (int dir : {1, -1}) {
      const SectionPlane plane{axis, 1.0, dir};
      const PoincareSection sec = poincare(v, plane, Eigen::Vector3d(0.1, 0.2, 0.3), 25);
      CHECK(sec.points.size() == 25);
      for (std::size_t i = 0; i < sec.points.size(); ++i) {
        CHECK(angle_gap(sec.states[i][axis], 1.0) <= 1e-9);
        CHECK(f.value(sec.states[i])[axis] * dir > 0.0);
        const int o1 = axis == 0 ? 1 : 0, o2 = axis == 2 ? 1 : 2;
        CHECK(sec.points[i] == Eigen::Vector2d(sec.states[i][o1], sec.states[i][o2]));
      }
    }

  // x3 is constant for ABC(1,0,0).
  CHECK_THROWS_AS(poincare(make_abc({1.0, 0.0, 0.0}), SectionPlane{2, 1.0, 1}, Eigen::Vector3d(0.0, 0.0, 0.3), 5,
                           1e-10, 1e3),
                  NoCrossings);
  CHECK_THROWS_AS(poincare(v, SectionPlane{3, 1.0, 1}, Eigen::Vector3d::Zero(), 5), std::invalid_argument);
  CHECK_THROWS_AS(poincare(v, SectionPlane{2, 1.0, 0}, Eigen::Vector3d::Zero(), 5), std::invalid_argument);
  CHECK_THROWS_AS(poincare(v, SectionPlane{}, Eigen::Vector3d::Zero(), 0), std::invalid_argument);

  // Partial result: fewer crossings than requested inside the budget.
  const PoincareSection partial = poincare(v, SectionPlane{}, Eigen::Vector3d(0.1, 0.2, 0.3), 100000, 1e-8, 50.0);
  CHECK(!partial.points.empty());
  CHECK(partial.points.size() < 100000);
}

TEST_CASE("poincare: chaotic section fills a 2D region") {
  const Eigen::Vector3d x0 = separatrix_seed(calibration::occupancy_seed);
  const auto chaotic = poincare(make_abc({1.0, 0.5, 0.1}), SectionPlane{}, x0, 2000);
  const auto regular = poincare(make_abc({1.0, 0.5, 0.0}), SectionPlane{}, x0, 2000);
  const double occ_chaotic = section_occupancy(chaotic.points);
  const double occ_regular = section_occupancy(regular.points);
  MESSAGE("occupancy " << occ_chaotic << " vs " << occ_regular);
  CHECK(occ_regular > 0.0);
  CHECK(occ_chaotic > 5.0 * occ_regular);
}

TEST_CASE("section_occupancy counts cells") {
  CHECK(section_occupancy({}) == 0.0);
  CHECK(section_occupancy({{0.0, 0.0}, {0.01, 0.01}}) == doctest::Approx(1.0 / 4096));
  CHECK(section_occupancy({{0.0, 0.0}, {4.0, 4.0}}, 2) == doctest::Approx(0.5));
  CHECK(section_occupancy({{-0.1, 7.0}}, 2) == doctest::Approx(0.25));
  CHECK_THROWS_AS(section_occupancy({}, 0), std::invalid_argument);
}

TEST_CASE("lyapunov: integrable fields stay near zero") {
  const auto shear = lyapunov_max(make_abc({1.0, 0.0, 0.0}), Eigen::Vector3d(0.1, 0.2, 0.3), 1e4, 1.0);
  CHECK(std::abs(shear.lambda_max) <= 1e-3);
  const auto c0 = lyapunov_max(make_abc({1.0, 0.5, 0.0}), Eigen::Vector3d(0.5, 1.0, 2.0), 1e4, 1.0);
  CHECK(std::abs(c0.lambda_max) <= 5e-3);
  CHECK(c0.history.size() == 10000);
  CHECK(c0.history.back().first == doctest::Approx(1e4));
  CHECK(c0.renorm_interval == 1.0);
  CHECK(c0.band >= 0.0);
  CHECK_THROWS_AS(lyapunov_max(make_abc({}), Eigen::Vector3d::Zero(), 10.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(lyapunov_max(make_abc({}), Eigen::Vector3d::Zero(), 10.0, 20.0), std::invalid_argument);
}

TEST_CASE("lyapunov: positive near the separatrix at C = 0.1") {
  const auto est = lyapunov_max(make_abc({1.0, 0.5, 0.1}), separatrix_seed(0), 1e4, 1.0);
  CHECK(est.lambda_max >= calibration::lyapunov_theta);
  CHECK(est.band < 0.1 * est.lambda_max);
}

TEST_CASE("lyapunov: exponent is insensitive to the renormalization interval") {
  const VectorField v = make_abc({1.0, 1.0, 1.0});
  const Eigen::Vector3d x0(0.1, 0.2, 0.3);
  // Short enough that the two runs follow the same orbit.
  const double a = lyapunov_max(v, x0, 200.0, 1.0, 1e-11).lambda_max;
  const double b = lyapunov_max(v, x0, 200.0, 0.5, 1e-11).lambda_max;
  CHECK(a == doctest::Approx(b).epsilon(1e-5));
}

TEST_CASE("tangent map preserves volume") {
  const Eigen::Matrix3d phi = tangent_map(make_abc({1.0, 0.5, 0.0}), Eigen::Vector3d(0.3, 0.1, 0.9), 1e3, 1e-10);
  CHECK(std::abs(phi.determinant() - 1.0) <= 1e-6);
  for (const ABCParams p : {ABCParams{1.0, 0.5, 0.1}, ABCParams{1.0, 1.0, 1.0}}) {
    const double det = tangent_determinant(make_abc(p), Eigen::Vector3d(0.3, 0.1, 0.9), 1e3, 1e-10);
    CHECK(std::abs(det - 1.0) <= 1e-6);
  }
  const double det = tangent_determinant(random_beltrami(3, 4), Eigen::Vector3d(1.0, 2.0, 3.0), 1e3, 1e-10);
  CHECK(std::abs(det - 1.0) <= 1e-6);

  // Short-time agreement with finite differences of the flow.
  const VectorField v = make_abc({1.0, 0.5, 0.1});
  const Eigen::Vector3d x0(0.3, 0.1, 0.9);
  const Eigen::Matrix3d J = tangent_map(v, x0, 2.0, 1e-12);
  for (int j = 0; j < 3; ++j) {
    const Eigen::Vector3d e = 1e-5 * Eigen::Vector3d::Unit(j);
    const Eigen::Vector3d fd = (flow_map(v, x0 + e, 2.0, 1e-13) - flow_map(v, x0 - e, 2.0, 1e-13)) / 2e-5;
    CHECK((fd - J.col(j)).norm() < 1e-6);
  }
}

TEST_CASE("first_integral_report") {
  const VectorField abc = make_abc({0.8, 1.3, -0.6});
  const auto bern = first_integral_report(abc, bernoulli(abc), 16);
  CHECK(bern.range_gap <= 1e-11);
  CHECK(bern.derivative_sup <= 1e-11);

  ScalarField h(1);
  h.add_cos({0, 0, 1}, 1.0);
  h.add_sin({1, 0, 0}, 0.5);
  const auto rep = first_integral_report(make_abc({1.0, 0.5, 0.0}), h, 16);
  CHECK(rep.derivative_sup <= 1e-12);
  CHECK(rep.range_gap == doctest::Approx(3.0));

  // Not conserved once C != 0.
  CHECK(first_integral_report(make_abc({1.0, 0.5, 0.1}), h, 16).derivative_sup > 0.05);

  const auto c = first_integral_report(random_beltrami(2, 1), constant_field(2.5), 12);
  CHECK(c.range_gap == 0.0);
  CHECK(c.derivative_sup == 0.0);
}
