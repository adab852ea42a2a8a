#include "beltrami/contact.hpp"
#include "beltrami/errors.hpp"
#include "beltrami/rng.hpp"
#include "beltrami/spectral.hpp"

#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

using namespace beltrami;

namespace {

constexpr double kPi = std::numbers::pi;

// Closed-form pointwise oracle for the standard model and beta = s (0, sin x1, cos x1).
struct PointOracle {
  Eigen::Vector3d alpha, reeb, beta, beta_xi;
  double q;
  Eigen::Matrix3d g_xi, h;

  PointOracle(const Eigen::Vector3d& x, double s) {
    alpha = {std::cos(x[2]), -std::sin(x[2]), 0.0};
    reeb = alpha;
    beta = s * Eigen::Vector3d(0.0, std::sin(x[0]), std::cos(x[0]));
    beta_xi = beta - beta.dot(reeb) * alpha;
    q = beta_xi.squaredNorm();
    g_xi = Eigen::Matrix3d::Identity() - alpha * alpha.transpose();
    h = beta_xi * beta_xi.transpose() - 0.5 * q * g_xi;
  }
};

OneForm raw_beta() {
  OneForm b(1);
  b.add_sin({1, 0, 0}, Eigen::Vector3d(0, 1, 0));
  b.add_cos({1, 0, 0}, Eigen::Vector3d(0, 0, 1));
  return b;
}

// Random element of the lambda0 = 1 curl eigenspace, L2-orthogonal to alpha.
OneForm random_v_element(std::uint64_t seed, const OneForm& alpha) {
  const auto basis = helicity_basis(1);
  OneForm b(1);
  for (std::size_t j = 0; j < basis.size(); ++j) b += basis[j] * counter_normal(seed, j);
  b -= alpha * (inner_product(b, alpha) / inner_product(alpha, alpha));
  b.prune(1e-15);
  return b;
}

double sup_matrix(const std::vector<Eigen::Matrix3d>& a, const std::vector<Eigen::Matrix3d>& b) {
  double worst = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) worst = std::max(worst, (a[p] - b[p]).cwiseAbs().maxCoeff());
  return worst;
}

std::vector<Eigen::Vector3d> probe_points() {
  std::vector<Eigen::Vector3d> pts = {{kPi / 2, 0.0, 0.0}, {kPi / 4, 1.0, kPi / 3}, {2.0, 0.5, 5.0}};
  for (std::uint64_t i = 0; i < 10; ++i) {
    Eigen::Vector3d x;
    for (int j = 0; j < 3; ++j) x[j] = 2 * kPi * counter_uniform(77, 3 * i + std::uint64_t(j));
    pts.push_back(x);
  }
  return pts;
}

}  // namespace

TEST_CASE("tensor field algebra") {
  const OneForm a = random_beltrami(2, 3), b = random_beltrami(1, 4);
  const TensorField t = TensorField::outer(a, b) + TensorField::identity() * 2.0;
  for (const auto& x : probe_points()) {
    const Eigen::Vector3d av = a.evaluate(x), bv = b.evaluate(x);
    const Eigen::Matrix3d m = 0.5 * (av * bv.transpose() + bv * av.transpose()) + 2.0 * Eigen::Matrix3d::Identity();
    CHECK((t.evaluate(x) - m).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(t.determinant().evaluate(x) == doctest::Approx(m.determinant()).epsilon(1e-12));
    CHECK((t.adjugate().evaluate(x) - m.determinant() * m.inverse()).cwiseAbs().maxCoeff() < 1e-11);
    CHECK(t.trace().evaluate(x) == doctest::Approx(m.trace()));
    CHECK((t.apply(a).evaluate(x) - m * av).norm() < 1e-12);
    CHECK(t.form(a, b).evaluate(x) == doctest::Approx(av.dot(m * bv)));
  }
  const auto grid = t.sample(8);
  const UniformGrid ug{8};
  for (std::size_t p = 0; p < grid.size(); p += 37)
    CHECK((grid[p] - t.evaluate(ug.point(p))).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("standard model: contact form identities") {
  const ContactModel m = std_contact_t3();
  CHECK((m.form.alpha.evaluate({0.4, 1.1, 0.0}) - Eigen::Vector3d(1, 0, 0)).norm() < 1e-15);
  CHECK(m.form.lambda0 == 1.0);

  const ContactFormReport r = check_contact_form(m.form, 16);
  CHECK(r.reeb_kernel <= 1e-12);
  CHECK(r.reeb_normalization <= 1e-12);
  CHECK(r.min_volume_density == doctest::Approx(1.0).epsilon(1e-12));
  // alpha ^ d alpha = standard volume form pointwise.
  const ScalarField density = dot(m.form.alpha, curl(m.form.alpha));
  CHECK((density - constant_field(1.0)).max_coeff() <= 1e-15);

  // curl R = R coefficientwise.
  CHECK((curl(m.form.reeb) - m.form.reeb).max_coeff() == 0.0);

  const OneForm b = default_beta();
  CHECK(inner_product(b, b) * std::pow(2 * kPi, 3) == doctest::Approx(1.0));
  CHECK(std::abs(inner_product(b, m.form.alpha)) < 1e-15);
  CHECK((curl(b) - b).max_coeff() < 1e-15);
}

TEST_CASE("check_compatibility") {
  const ContactModel m = std_contact_t3();
  const CompatibilityReport flat = check_compatibility(m.metric, m.form);
  CHECK(flat.max() <= 1e-12);

  const CompatibilityReport twice = check_compatibility(m.metric.scaled(2.0), m.form);
  CHECK(twice.unit_norm == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
  CHECK(twice.star_d > 0.1);
  CHECK(twice.volume > 0.1);

  // Wrong lambda0 breaks the curl condition only.
  ContactForm off = m.form;
  off.lambda0 = 2.0;
  const CompatibilityReport r = check_compatibility(m.metric, off);
  CHECK(r.unit_norm <= 1e-12);
  CHECK(r.star_d == doctest::Approx(1.0));
}

TEST_CASE("xi_projection") {
  const ContactModel m = std_contact_t3();
  CHECK(xi_projection(m.form.alpha, m.form).max_coeff() <= 1e-15);

  OneForm dx3(1);
  dx3.add_sin({1, 1, 0}, Eigen::Vector3d(0, 0, 1.0));
  CHECK((xi_projection(dx3, m.form) - dx3).max_coeff() == 0.0);

  const OneForm bx = xi_projection(raw_beta(), m.form);
  for (const auto& x : probe_points()) {
    const Eigen::Vector3d alpha(std::cos(x[2]), -std::sin(x[2]), 0.0);
    const Eigen::Vector3d beta(0.0, std::sin(x[0]), std::cos(x[0]));
    const Eigen::Vector3d expected = beta + std::sin(x[0]) * std::sin(x[2]) * alpha;
    CHECK((bx.evaluate(x) - expected).norm() < 1e-14);
    CHECK(std::abs(bx.evaluate(x).dot(m.form.reeb.evaluate(x))) < 1e-14);
  }
}

TEST_CASE("variation_tensor") {
  const ContactModel m = std_contact_t3();
  for (double s : {1.0, std::pow(2 * kPi, -1.5)}) {
    OneForm beta = raw_beta() * s;
    const VariationTensor v = variation_tensor(beta, m.form, m.metric);
    for (const auto& x : probe_points()) {
      const PointOracle o(x, s);
      CHECK((v.h.evaluate(x) - o.h).cwiseAbs().maxCoeff() < 1e-14);
      CHECK(v.beta_xi_sq.evaluate(x) == doctest::Approx(o.q).epsilon(1e-13));
      CHECK((v.h.evaluate(x) * o.reeb).norm() < 1e-14);
    }
    const std::vector<Eigen::Matrix3d> H = v.h.sample(32);
    double trace = 0.0, hrr = 0.0;
    const GridVector R = to_grid(m.form.reeb, 32);
    for (std::size_t p = 0; p < H.size(); ++p) {
      trace = std::max(trace, std::abs(H[p].trace()));
      const Eigen::Vector3d r(R[0][Eigen::Index(p)], R[1][Eigen::Index(p)], R[2][Eigen::Index(p)]);
      hrr = std::max(hrr, std::abs(r.dot(H[p] * r)));
    }
    CHECK(trace <= 1e-12);
    CHECK(hrr <= 1e-12);
    CHECK(v.h.trace().max_coeff() <= 1e-15);
  }
  // h11 at (pi/2, 0, 0) for the unnormalized beta: beta_xi = dx2, so h = diag(0, 1/2, -1/2).
  const VariationTensor v = variation_tensor(raw_beta(), m.form, m.metric);
  CHECK(v.h.evaluate({kPi / 2, 0, 0})(1, 1) == doctest::Approx(0.5));
  CHECK(v.h.evaluate({kPi / 2, 0, 0})(0, 0) == doctest::Approx(0.0));

  // Non-constant determinant is rejected.
  TensorField bumpy = TensorField::identity();
  bumpy(0, 0).set_truncation(1);
  bumpy(0, 0).add_cos({1, 0, 0}, 0.5);
  CHECK_THROWS_AS(variation_tensor(raw_beta(), m.form, MetricField(bumpy)), std::invalid_argument);
}

TEST_CASE("metric family: compatibility, volume and first order") {
  const ContactModel m = std_contact_t3();
  std::vector<double> eps;
  for (int i = -10; i <= 10; ++i) eps.push_back(0.02 * i);
  const MetricFamily fam = metric_family(m.metric, m.form, default_beta(), eps);

  const std::vector<Eigen::Matrix3d> G0 = fam.base().sample(16);
  CHECK(sup_matrix(fam.member(0.0).sample(16), G0) == 0.0);

  const GridVector A = to_grid(m.form.alpha, 16), R = to_grid(m.form.reeb, 16);
  for (double e : fam.epsilons()) {
    const MetricField g = fam.member(e);
    CHECK(check_compatibility(g, m.form).max() <= 1e-10);
    const std::vector<Eigen::Matrix3d> G = g.sample(16);
    double det_rel = 0.0, decomposition = 0.0;
    for (std::size_t p = 0; p < G.size(); ++p) {
      det_rel = std::max(det_rel, std::abs(G[p].determinant() / G0[p].determinant() - 1.0));
      const auto q = Eigen::Index(p);
      const Eigen::Vector3d a(A[0][q], A[1][q], A[2][q]), r(R[0][q], R[1][q], R[2][q]);
      decomposition = std::max(decomposition, ((G[p] - a * a.transpose()) * r).norm());
    }
    CHECK(det_rel <= 1e-12);
    CHECK(decomposition <= 1e-12);
  }

  // (g_eps - g) / eps - h = O(eps).
  const std::vector<Eigen::Matrix3d> H = fam.variation().h.sample(16);
  auto defect = [&](double e) {
    const std::vector<Eigen::Matrix3d> G = fam.member(e).sample(16);
    double worst = 0.0;
    for (std::size_t p = 0; p < G.size(); ++p)
      worst = std::max(worst, ((G[p] - G0[p]) / e - H[p]).cwiseAbs().maxCoeff());
    return worst;
  };
  const double d2 = defect(1e-2), d3 = defect(1e-3);
  const double order = std::log10(d2 / d3);
  MESSAGE("first-order defects " << d2 << " " << d3 << " order " << order);
  CHECK(order >= 0.9);
  CHECK(order <= 1.1);
}

TEST_CASE("metric family: positivity guard") {
  const ContactModel m = std_contact_t3();
  TensorField bad = TensorField::identity();
  bad(2, 2) = constant_field(-1.0);
  CHECK_THROWS_AS(require_positive_definite(MetricField(bad)), NotPositiveDefinite);
  CHECK_THROWS_AS(metric_family(MetricField(bad), m.form, default_beta(), {0.1}), NotPositiveDefinite);
  const MetricFamily fam = metric_family(m.metric, m.form, default_beta(), {});
  CHECK_THROWS_AS(fam.member(std::nan("")), std::invalid_argument);
  // The closed-form factor keeps g_eps positive even far out.
  CHECK_NOTHROW(fam.member(50.0));
  CHECK(MetricField::xi_factor(0.0, 3.0) == 0.0);
  CHECK(MetricField::xi_factor(1e8, 1.0) > -1.0);
  CHECK(MetricField::xi_factor(0.3, 0.7) ==
        doctest::Approx(std::sqrt(1 + 0.09 * 0.49 / 4) - 0.15 * 0.7 - 1).epsilon(1e-14));
}

TEST_CASE("noncollinearity_measure") {
  const ContactModel m = std_contact_t3();
  CHECK(noncollinearity_measure(m.form.alpha, m.form.alpha, 16, 1e-9) == 1.0);

  double prev = 1.0;
  for (int n : {16, 32, 64}) {
    const double f = noncollinearity_measure(m.form.alpha, default_beta(), n, 1e-9);
    // The collinear set is two lines in each x2 slice.
    CHECK(f <= 4.0 / (n * n) + 1e-15);
    CHECK(f < prev);
    prev = f;
  }
  const OneForm b = random_v_element(9, m.form.alpha);
  const OneForm unit = b * (1.0 / std::sqrt(inner_product(b, b)));
  CHECK(noncollinearity_measure(m.form.alpha, unit, 64, 1e-3) < 0.05);
}

TEST_CASE("variation_pairing") {
  const ContactModel m = std_contact_t3();
  const OneForm beta = default_beta();
  const VariationTensor v = variation_tensor(beta, m.form, m.metric);
  const double lambda = m.form.lambda0;

  CHECK(std::abs(variation_pairing(m.form.alpha, m.form.alpha, v.h, m.metric, lambda)) <= 1e-14);

  const double q2 = integral(v.beta_xi_sq * v.beta_xi_sq);
  CHECK(q2 > 0.0);
  const double bb = variation_pairing(beta, beta, v.h, m.metric, lambda);
  CHECK(bb == doctest::Approx(0.5 * lambda * q2).epsilon(1e-12));
  // With the other normalization convention the pairing is the full quartic integral.
  CHECK(variation_pairing(beta, beta, v.h, m.metric, 2.0) == doctest::Approx(q2).epsilon(1e-12));

  const OneForm a1 = random_v_element(1, m.form.alpha), a2 = random_v_element(2, m.form.alpha);
  CHECK(std::abs(variation_pairing(a1, a2, v.h, m.metric, lambda) - variation_pairing(a2, a1, v.h, m.metric, lambda)) <=
        1e-13);
  // Exact quadrature: a finer grid changes nothing.
  CHECK(variation_pairing(a1, a2, v.h, m.metric, lambda, 32) ==
        doctest::Approx(variation_pairing(a1, a2, v.h, m.metric, lambda)).epsilon(1e-13));
}
