#include "beltrami/errors.hpp"
#include "beltrami/rng.hpp"
#include "beltrami/spectral.hpp"

#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

using namespace beltrami;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

double sup_norm(const ScalarField& f, int n = 24) {
  return to_grid(f, std::max(n, 2 * f.degree() + 2)).abs().maxCoeff();
}

VectorField shear_sin_x2() {
  VectorField v(1);
  v.add_sin({0, 1, 0}, Eigen::Vector3d(1, 0, 0));
  return v;
}

// Random divergence-free field: random coefficients with the component along k removed.
VectorField random_solenoidal(std::uint64_t seed, int truncation) {
  VectorField v(truncation);
  std::uint64_t counter = 0;
  for (int a = -truncation; a <= truncation; ++a)
    for (int b = -truncation; b <= truncation; ++b)
      for (int c = -truncation; c <= truncation; ++c) {
        const WaveVector k{a, b, c};
        if (k.is_zero() || !k.is_canonical()) continue;
        Vector3c coef;
        for (int i = 0; i < 3; ++i)
          coef[i] = Complex(counter_normal(seed, counter++), counter_normal(seed, counter++));
        const Eigen::Vector3d kh = k.as_vector().normalized();
        const Vector3c kc = kh.cast<Complex>();
        coef -= kc * (kc.transpose() * coef).value();
        v.add_real_mode(k, coef);
      }
  return v;
}

}  // namespace

TEST_CASE("make_abc") {
  const VectorField v = make_abc({1.0, 0.5, 0.1});
  const Eigen::Vector3d at0 = v.evaluate(Eigen::Vector3d::Zero());
  CHECK(at0[0] == Approx(0.1).epsilon(1e-15));
  CHECK(at0[1] == Approx(1.0).epsilon(1e-15));
  CHECK(at0[2] == Approx(0.5).epsilon(1e-15));
  CHECK(v.modes().size() == 6);
  for (const auto& [k, c] : v.modes()) CHECK(k.norm2() == 1);

  // Closed form at scattered points.
  for (int i = 0; i < 20; ++i) {
    const Eigen::Vector3d x(counter_uniform(3, 3 * i) * 7, counter_uniform(3, 3 * i + 1) * 7,
                            counter_uniform(3, 3 * i + 2) * 7);
    const Eigen::Vector3d expected(1.0 * std::sin(x[2]) + 0.1 * std::cos(x[1]),
                                   0.5 * std::sin(x[0]) + 1.0 * std::cos(x[2]),
                                   0.1 * std::sin(x[1]) + 0.5 * std::cos(x[0]));
    CHECK((v.evaluate(x) - expected).norm() < 1e-14);
  }

  CHECK(make_abc({0, 0, 0}).max_coeff() == 0.0);
  CHECK(v.reality_defect() == 0.0);
}

TEST_CASE("curl and divergence") {
  for (const ABCParams p : {ABCParams{1, 0.5, 0.1}, ABCParams{-0.3, 2.0, 1.7}}) {
    const VectorField v = make_abc(p);
    CHECK((curl(v) - v).max_coeff() < 1e-15);
    CHECK(divergence(v).max_coeff() == 0.0);
  }

  VectorField constant(0);
  constant.add_cos({0, 0, 0}, Eigen::Vector3d(1, 2, 3));
  CHECK(curl(constant).max_coeff() == 0.0);

  // curl (f(x2), 0, 0) = (0, 0, -f'(x2)) = (0, 0, -cos x2).
  VectorField expected(1);
  expected.add_cos({0, 1, 0}, Eigen::Vector3d(0, 0, -1));
  CHECK((curl(shear_sin_x2()) - expected).max_coeff() < 1e-15);

  VectorField cosx1(1);
  cosx1.add_cos({1, 0, 0}, Eigen::Vector3d(1, 0, 0));
  ScalarField minus_sin(1);
  minus_sin.add_sin({1, 0, 0}, -1.0);
  CHECK((divergence(cosx1) - minus_sin).max_coeff() < 1e-15);
  CHECK(divergence(VectorField(2)).empty());
}

TEST_CASE("curl curl = -Laplacian on divergence-free fields") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const VectorField v = random_solenoidal(seed, 2);
    CHECK(divergence(v).max_coeff() < 1e-14);
    const VectorField lap = v.map_modes([](const WaveVector& k, const Vector3c& c) -> Vector3c {
      return c * double(k.norm2());
    });
    CHECK((curl(curl(v)) - lap).max_coeff() < 1e-12);
    CHECK(v.reality_defect() == 0.0);
  }
}

TEST_CASE("helicity bases are orthonormal curl eigenfamilies") {
  const auto b1 = helicity_basis(1);
  CHECK(b1.size() == 6);
  CHECK(gram_deviation(b1) < 1e-12);
  CHECK(eigen_residual(b1, 1.0) < 1e-15);

  for (std::int64_t n : {2, 3, 5, 6, 9, 14, 26}) {
    const auto basis = helicity_basis(n);
    CHECK(basis.size() == lattice_shell(n).multiplicity());
    CHECK(gram_deviation(basis) < 1e-12);
    CHECK(eigen_residual(basis, std::sqrt(double(n))) < 1e-13);
    for (const auto& u : basis) {
      CHECK(u.reality_defect() == 0.0);
      CHECK(divergence(u).max_coeff() < 1e-14);
    }
  }
  CHECK_THROWS_AS(helicity_basis(7), NoSuchEigenvalue);
  CHECK_THROWS_AS(helicity_basis(0), NoSuchEigenvalue);
}

TEST_CASE("helicity frame conventions") {
  for (const WaveVector k : {WaveVector{1, 0, 0}, WaveVector{0, 2, -1}, WaveVector{3, -1, 4}}) {
    const Vector3c h = helicity_vector(k);
    const Vector3c hm = helicity_vector(-k);
    CHECK((hm - h.conjugate()).norm() < 1e-15);
    const Vector3c ik = k.as_vector().cast<Complex>() * Complex(0, 1);
    const Vector3c ikh(ik[1] * h[2] - ik[2] * h[1], ik[2] * h[0] - ik[0] * h[2], ik[0] * h[1] - ik[1] * h[0]);
    CHECK((ikh - std::sqrt(double(k.norm2())) * h).norm() < 1e-14);
    CHECK(std::abs(h.squaredNorm() - 1.0) < 1e-15);
  }
}

TEST_CASE("ABC(1,1,1) lies in the span of the n = 1 basis") {
  const auto basis = helicity_basis(1);
  const VectorField v = make_abc({1, 1, 1});
  // Least-squares projection through the normal equations.
  Eigen::MatrixXd gram(6, 6);
  Eigen::VectorXd rhs(6);
  for (int i = 0; i < 6; ++i) {
    rhs[i] = inner_product(basis[i], v);
    for (int j = 0; j < 6; ++j) gram(i, j) = inner_product(basis[i], basis[j]);
  }
  const Eigen::VectorXd coef = gram.ldlt().solve(rhs);
  VectorField remainder = v;
  for (int i = 0; i < 6; ++i) remainder -= basis[i] * coef[i];
  CHECK(remainder.max_coeff() < 1e-15);
}

TEST_CASE("random Beltrami ensemble") {
  const VectorField v = random_beltrami(3, 42);
  CHECK(eigen_residual({v}, std::sqrt(3.0)) < 1e-12);
  const VectorField w = random_beltrami(3, 42);
  CHECK(v.modes().size() == w.modes().size());
  bool identical = true;
  for (const auto& [k, c] : v.modes()) identical = identical && (c.array() == w.coeff(k).array()).all();
  CHECK(identical);
  CHECK_THROWS_AS(random_beltrami(7, 1), NoSuchEigenvalue);

  // Monte-Carlo: E ||v||^2 = 1 within three standard errors.
  const int samples = 10000;
  double sum = 0, sum_sq = 0;
  for (int s = 0; s < samples; ++s) {
    const double e = std::pow(random_beltrami(2, std::uint64_t(s)).l2_norm(), 2);
    sum += e;
    sum_sq += e * e;
  }
  const double mean = sum / samples;
  const double se = std::sqrt((sum_sq / samples - mean * mean) / samples);
  CHECK(std::abs(mean - 1.0) <= 3.0 * se);
}

TEST_CASE("counter-based normals are order independent") {
  CHECK(counter_normal(7, 100) == counter_normal(7, 100));
  CHECK(counter_normal(7, 100) != counter_normal(8, 100));
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = counter_normal(11, std::uint64_t(i));
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 5.0 / std::sqrt(double(n)));
  CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("Bernoulli function") {
  CHECK(sup_norm(bernoulli(make_abc({1, 0.5, 0.1}))) < 1e-12);

  // Laplacian F = div(v x curl v) = cos 2x2  =>  F = -cos(2 x2) / 4.
  ScalarField expected(2);
  expected.add_cos({0, 2, 0}, -0.25);
  CHECK(sup_norm(bernoulli(shear_sin_x2()) - expected) < 1e-14);

  CHECK(sup_norm(bernoulli(random_beltrami(2, 5))) < 1e-12);
  CHECK(std::abs(mean(bernoulli(shear_sin_x2()))) == 0.0);
}

TEST_CASE("Bernoulli function of random Beltrami fields is constant") {
  int count = 0;
  for (std::int64_t n : {1, 2, 3, 5, 6})
    for (std::uint64_t seed = 0; seed < 10; ++seed, ++count)
      CHECK(sup_norm(bernoulli(random_beltrami(n, seed))) <= 1e-11);
  CHECK(count == 50);
}

TEST_CASE("pressure") {
  // Beltrami: p = -|v|^2 / 2 + mean; |v|^2 built from exact convolution products.
  for (const VectorField& v : {make_abc({1, 0.5, 0.1}), random_beltrami(2, 9)}) {
    ScalarField energy(2 * v.truncation());
    for (int i = 0; i < 3; ++i) energy += component(v, i) * component(v, i);
    ScalarField expected = energy * -0.5;
    expected -= constant_field(mean(expected));
    CHECK(sup_norm(pressure(v) - expected) < 1e-13);
  }

  VectorField constant(0);
  constant.add_cos({0, 0, 0}, Eigen::Vector3d(1, -1, 2));
  CHECK(pressure(constant).max_coeff() == 0.0);
  CHECK(pressure(shear_sin_x2()).max_coeff() < 1e-16);
}

TEST_CASE("steady residuals") {
  const auto r_abc = steady_residual(make_abc({1, 0.5, 0.1}));
  CHECK(r_abc.euler <= 1e-10);
  CHECK(r_abc.bernoulli <= 1e-10);

  const auto r_shear = steady_residual(shear_sin_x2());
  CHECK(r_shear.euler <= 1e-10);
  CHECK(r_shear.bernoulli <= 1e-10);

  VectorField mixed = helicity_basis(1).front() + helicity_basis(2).front();
  mixed.set_truncation(1);
  const auto r_mixed = steady_residual(mixed);
  CHECK(r_mixed.bernoulli > 0.01);
}

TEST_CASE("pseudo-spectral cross product matches exact convolution") {
  const VectorField a = random_beltrami(2, 1), b = random_beltrami(3, 2);
  const VectorField c = cross_product(a, b);
  ScalarField ax = component(a, 0), ay = component(a, 1), az = component(a, 2);
  ScalarField bx = component(b, 0), by = component(b, 1), bz = component(b, 2);
  const VectorField exact = from_components(ay * bz - az * by, az * bx - ax * bz, ax * by - ay * bx);
  CHECK((c - exact).max_coeff() < 1e-14);
}

TEST_CASE("proportionality factor") {
  const VectorField v = make_abc({1, 0.5, 0.1});
  const auto report = proportionality_factor(v, 32);
  CHECK(report.gap() <= 1e-10);
  CHECK(report.min == Approx(1.0).epsilon(1e-12));

  const auto r1 = proportionality_factor(make_abc({0.8, 0.6, 0.3}), 16);
  const auto r2 = proportionality_factor(make_abc({0.8, 0.6, 0.3}) * 2.0, 16);
  const auto r3 = proportionality_factor(make_abc({0.8, 0.6, 0.3}) * -3.0, 16);
  CHECK(((r1.values - r2.values).abs().maxCoeff()) <= 1e-12);
  CHECK(((r1.values - r3.values).abs().maxCoeff()) <= 1e-12);

  CHECK_THROWS_AS(proportionality_factor(shear_sin_x2(), 16), VanishingField);
}

TEST_CASE("proportionality factor of a non-Beltrami field is scale invariant") {
  // Sum of a shell-1 and a shell-2 mode: f is nonconstant but scale free.
  VectorField v = make_abc({1, 0.5, 0.1}) + random_beltrami(2, 4) * 0.2;
  const auto a = proportionality_factor(v, 16);
  const auto b = proportionality_factor(v * 2.0, 16);
  CHECK(a.gap() > 0.01);
  CHECK(((a.values - b.values).abs().maxCoeff()) <= 1e-12);
}

TEST_CASE("minimum norm") {
  // |ABC(1, 0.5, 0)|^2 = 1.25 + sin x1 cos x3, minimum 0.25.
  CHECK(min_norm(make_abc({1, 0.5, 0}), 32) == Approx(0.5).epsilon(1e-9));
  CHECK(min_norm(make_abc({1, 0.5, 0.1}), 32) > 0.05);
  CHECK(min_norm(make_abc({1, 1, 1}), 30) <= 1e-3);
  CHECK(min_norm(VectorField(1), 8) == 0.0);
}

TEST_CASE("evaluation") {
  const VectorField v = random_beltrami(5, 17);
  const Eigen::Vector3d x(0.3, 1.9, 4.4);
  const auto vals = evaluate(v, {x, x + Eigen::Vector3d(2 * kPi, 0, 0), x - Eigen::Vector3d(0, 0, 6 * kPi)});
  CHECK((vals[0] - vals[1]).norm() < 1e-13);
  CHECK((vals[0] - vals[2]).norm() < 1e-13);

  // Direct summation agrees with the FFT grid route.
  const VectorField u = helicity_basis(3)[2];
  const int n = 32;
  const GridVector g = to_grid(u, n);
  const UniformGrid grid{n};
  double worst = 0.0;
  for (std::size_t idx = 0; idx < grid.size(); idx += 7) {
    const Eigen::Vector3d direct = u.evaluate(grid.point(idx));
    for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(direct[j] - g[j][idx]));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("grid round trip preserves coefficients") {
  const VectorField v = random_beltrami(6, 8);
  const int n = 8;
  const VectorField back = from_grid(to_grid(v, n), n, v.truncation());
  CHECK((back - v).max_coeff() < 1e-15);
}

TEST_CASE("mutated curl is caught by the eigen-residual check") {
  const auto basis = helicity_basis(2);
  const CurlOperator flipped = [](const VectorField& v) { return curl(v) * -1.0; };
  CHECK(eigen_residual(basis, std::sqrt(2.0)) < 1e-13);
  CHECK(eigen_residual(basis, std::sqrt(2.0), flipped) > 0.1);
}
