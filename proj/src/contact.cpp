#include "beltrami/contact.hpp"

#include "beltrami/spectral.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Geometry>
#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <numbers>

namespace beltrami {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Products of trig polynomials leave roundoff-level coefficients behind.
ScalarField mul(const ScalarField& a, const ScalarField& b) {
  ScalarField out = a * b;
  out.prune(1e-16);
  return out;
}

int even_at_least(int n) { return n % 2 ? n + 1 : n; }

}  // namespace

// ---------------------------------------------------------------------------
// TensorField

int TensorField::slot(int i, int j) {
  if (i > j) std::swap(i, j);
  static constexpr int table[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  return table[i][j];
}

TensorField TensorField::identity() {
  TensorField t;
  for (int i = 0; i < 3; ++i) t(i, i) = constant_field(1.0);
  return t;
}

TensorField TensorField::outer(const VectorField& a, const VectorField& b) {
  TensorField t;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      ScalarField e = mul(component(a, i), component(b, j)) + mul(component(a, j), component(b, i));
      e *= 0.5;
      e.prune(1e-16);
      t(i, j) = e;
    }
  return t;
}

Eigen::Matrix3d TensorField::evaluate(const Eigen::Vector3d& x) const {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = (*this)(i, j).evaluate(x);
  return m;
}

int TensorField::degree() const {
  int d = 0;
  for (const auto& e : entries_) d = std::max(d, e.degree());
  return d;
}

std::vector<Eigen::Matrix3d> TensorField::sample(int n) const {
  std::array<Eigen::ArrayXd, 6> s;
  for (int k = 0; k < 6; ++k) s[k] = to_grid(entries_[k], n);
  std::vector<Eigen::Matrix3d> out(UniformGrid{n}.size());
  for (std::size_t p = 0; p < out.size(); ++p) {
    const auto q = Eigen::Index(p);
    out[p] << s[0][q], s[1][q], s[2][q], s[1][q], s[3][q], s[4][q], s[2][q], s[4][q], s[5][q];
  }
  return out;
}

VectorField TensorField::apply(const VectorField& v) const {
  std::array<ScalarField, 3> c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) c[i] += mul((*this)(i, j), component(v, j));
  return from_components(c[0], c[1], c[2]);
}

ScalarField TensorField::form(const VectorField& a, const VectorField& b) const { return dot(a, apply(b)); }

ScalarField TensorField::trace() const { return (*this)(0, 0) + (*this)(1, 1) + (*this)(2, 2); }

TensorField TensorField::adjugate() const {
  const TensorField& t = *this;
  TensorField c;
  c(0, 0) = mul(t(1, 1), t(2, 2)) - mul(t(1, 2), t(1, 2));
  c(0, 1) = mul(t(1, 2), t(0, 2)) - mul(t(0, 1), t(2, 2));
  c(0, 2) = mul(t(0, 1), t(1, 2)) - mul(t(1, 1), t(0, 2));
  c(1, 1) = mul(t(0, 0), t(2, 2)) - mul(t(0, 2), t(0, 2));
  c(1, 2) = mul(t(0, 1), t(0, 2)) - mul(t(0, 0), t(1, 2));
  c(2, 2) = mul(t(0, 0), t(1, 1)) - mul(t(0, 1), t(0, 1));
  for (auto& e : c.entries_) e.prune(1e-15);
  return c;
}

ScalarField TensorField::determinant() const {
  const TensorField c = adjugate();
  ScalarField d = mul((*this)(0, 0), c(0, 0)) + mul((*this)(0, 1), c(0, 1)) + mul((*this)(0, 2), c(0, 2));
  d.prune(1e-15);
  return d;
}

TensorField& TensorField::operator+=(const TensorField& o) {
  for (int k = 0; k < 6; ++k) {
    entries_[k] += o.entries_[k];
    entries_[k].prune(1e-16);
  }
  return *this;
}

TensorField& TensorField::operator-=(const TensorField& o) {
  for (int k = 0; k < 6; ++k) {
    entries_[k] -= o.entries_[k];
    entries_[k].prune(1e-16);
  }
  return *this;
}

TensorField& TensorField::operator*=(double s) {
  for (auto& e : entries_) e *= s;
  return *this;
}

TensorField operator*(const ScalarField& f, const TensorField& t) {
  TensorField out;
  for (int k = 0; k < 6; ++k) out.entries_[k] = mul(f, t.entries_[k]);
  return out;
}

ScalarField dot(const VectorField& a, const VectorField& b) {
  ScalarField s;
  for (int i = 0; i < 3; ++i) s += mul(component(a, i), component(b, i));
  s.prune(1e-16);
  return s;
}

VectorField scale(const ScalarField& f, const VectorField& v) {
  return from_components(mul(f, component(v, 0)), mul(f, component(v, 1)), mul(f, component(v, 2)));
}

// ---------------------------------------------------------------------------
// MetricField

double MetricField::xi_factor(double epsilon, double q) {
  const double x = 0.5 * epsilon * q;
  const double s = std::sqrt(1.0 + x * x);
  // sqrt(1 + x^2) - x - 1 in forms free of cancellation.
  return x > 1.0 ? 1.0 / (s + x) - 1.0 : x * x / (s + 1.0) - x;
}

Eigen::Matrix3d MetricField::evaluate(const Eigen::Vector3d& x) const {
  Eigen::Matrix3d m = poly_.evaluate(x);
  if (!is_polynomial()) m += xi_factor(epsilon_, q_.evaluate(x)) * xi_.evaluate(x);
  return m;
}

std::vector<Eigen::Matrix3d> MetricField::sample(int n) const {
  std::vector<Eigen::Matrix3d> out = poly_.sample(n);
  if (is_polynomial()) return out;
  const std::vector<Eigen::Matrix3d> xi = xi_.sample(n);
  const Eigen::ArrayXd q = to_grid(q_, n);
  for (std::size_t p = 0; p < out.size(); ++p) out[p] += xi_factor(epsilon_, q[Eigen::Index(p)]) * xi[p];
  return out;
}

int MetricField::degree() const { return is_polynomial() ? poly_.degree() : std::max(poly_.degree(), xi_.degree()); }

MetricField MetricField::scaled(double s) const { return MetricField(poly_ * s, xi_ * s, q_, epsilon_); }

// ---------------------------------------------------------------------------
// The standard model

ContactModel std_contact_t3() {
  ContactModel m;
  m.form.alpha = OneForm(1);
  m.form.alpha.add_cos({0, 0, 1}, Eigen::Vector3d(1, 0, 0));
  m.form.alpha.add_sin({0, 0, 1}, Eigen::Vector3d(0, -1, 0));
  m.form.reeb = m.form.alpha;  // flat metric: R is the dual of alpha
  m.form.lambda0 = 1.0;
  m.metric = MetricField::flat();
  return m;
}

OneForm default_beta() {
  OneForm b(1);
  const double s = std::pow(kTwoPi, -1.5);
  b.add_sin({1, 0, 0}, Eigen::Vector3d(0, s, 0));
  b.add_cos({1, 0, 0}, Eigen::Vector3d(0, 0, s));
  return b;
}

ContactFormReport check_contact_form(const ContactForm& form, int grid) {
  const GridVector a = to_grid(form.alpha, grid);
  const GridVector r = to_grid(form.reeb, grid);
  const GridVector c = to_grid(curl(form.alpha), grid);
  ContactFormReport rep;
  rep.min_volume_density = std::numeric_limits<double>::infinity();
  for (Eigen::Index p = 0; p < a[0].size(); ++p) {
    const Eigen::Vector3d av(a[0][p], a[1][p], a[2][p]);
    const Eigen::Vector3d rv(r[0][p], r[1][p], r[2][p]);
    const Eigen::Vector3d cv(c[0][p], c[1][p], c[2][p]);
    // d alpha is the 2-form with flat curl vector c, so i_R d alpha = (c x R) up to sign.
    rep.reeb_kernel = std::max(rep.reeb_kernel, cv.cross(rv).cwiseAbs().maxCoeff());
    rep.reeb_normalization = std::max(rep.reeb_normalization, std::abs(av.dot(rv) - 1.0));
    rep.min_volume_density = std::min(rep.min_volume_density, av.dot(cv));
  }
  return rep;
}

double CompatibilityReport::max() const { return std::max({unit_norm, star_d, volume}); }

CompatibilityReport check_compatibility(const MetricField& g, const ContactForm& form, int grid) {
  const std::vector<Eigen::Matrix3d> G = g.sample(grid);
  const GridVector a = to_grid(form.alpha, grid);
  const GridVector r = to_grid(form.reeb, grid);
  const GridVector c = to_grid(curl(form.alpha), grid);
  CompatibilityReport rep;
  for (std::size_t p = 0; p < G.size(); ++p) {
    const auto q = Eigen::Index(p);
    const Eigen::Vector3d av(a[0][q], a[1][q], a[2][q]);
    const Eigen::Vector3d rv(r[0][q], r[1][q], r[2][q]);
    const Eigen::Vector3d cv(c[0][q], c[1][q], c[2][q]);
    const Eigen::Matrix3d& m = G[p];
    const double det = m.determinant();
    const double alpha_norm = std::sqrt(av.dot(m.inverse() * av));
    const double reeb_norm = std::sqrt(rv.dot(m * rv));
    rep.unit_norm = std::max({rep.unit_norm, std::abs(alpha_norm - 1.0), std::abs(reeb_norm - 1.0)});
    // star_g of the 2-form with flat curl vector c is g c / sqrt(det g).
    const Eigen::Vector3d star = m * cv / std::sqrt(det);
    rep.star_d = std::max(rep.star_d, (star - form.lambda0 * av).cwiseAbs().maxCoeff());
    rep.volume = std::max(rep.volume, std::abs(std::sqrt(det) - av.dot(cv) / form.lambda0));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Perturbation apparatus

OneForm xi_projection(const OneForm& beta, const ContactForm& form) {
  OneForm out = beta - scale(dot(beta, form.reeb), form.alpha);
  out.prune(1e-16);
  return out;
}

VariationTensor variation_tensor(const OneForm& beta, const ContactForm& form, const MetricField& g) {
  if (!g.is_polynomial()) throw std::invalid_argument("variation_tensor: base metric must be polynomial");
  const TensorField& G = g.polynomial();
  const ScalarField det = G.determinant();
  const double det0 = mean(det);
  ScalarField wobble = det;
  wobble.set_raw({0, 0, 0}, Complex(0.0, 0.0));
  if (!(det0 > 0.0) || wobble.max_coeff() > 1e-12 * det0)
    throw std::invalid_argument("variation_tensor: base metric needs a constant positive determinant");
  TensorField ginv = G.adjugate() * (1.0 / det0);

  VariationTensor v;
  v.beta_xi = xi_projection(beta, form);
  v.beta_xi_sq = ginv.form(v.beta_xi, v.beta_xi);
  v.g_xi = G - TensorField::outer(form.alpha);
  v.h = TensorField::outer(v.beta_xi) - (v.beta_xi_sq * v.g_xi) * 0.5;
  return v;
}

void require_positive_definite(const MetricField& g, int grid) {
  const std::vector<Eigen::Matrix3d> G = g.sample(grid);
  const UniformGrid ug{grid};
  for (std::size_t p = 0; p < G.size(); ++p) {
    const Eigen::LLT<Eigen::Matrix3d> llt(G[p]);
    if (llt.info() != Eigen::Success || !G[p].allFinite()) {
      const Eigen::Vector3d x = ug.point(p);
      throw NotPositiveDefinite("metric not positive definite at (" + std::to_string(x[0]) + ", " +
                                std::to_string(x[1]) + ", " + std::to_string(x[2]) + ")");
    }
  }
}

MetricField MetricFamily::member(double epsilon, int check_grid) const {
  if (!std::isfinite(epsilon)) throw std::invalid_argument("metric family: epsilon must be finite");
  if (epsilon == 0.0) return base_;
  MetricField m(base_.polynomial() + TensorField::outer(var_.beta_xi) * epsilon, var_.g_xi, var_.beta_xi_sq,
                epsilon);
  require_positive_definite(m, check_grid);
  return m;
}

MetricFamily metric_family(const MetricField& g, const ContactForm& form, const OneForm& beta,
                           std::vector<double> epsilons) {
  require_positive_definite(g);
  VariationTensor var = variation_tensor(beta, form, g);
  MetricFamily fam(g, beta, std::move(var), std::move(epsilons));
  for (double e : fam.epsilons()) (void)fam.member(e);
  return fam;
}

double noncollinearity_measure(const OneForm& alpha, const OneForm& beta, int grid, double tol,
                               const MetricField& g) {
  if (grid < 1) throw std::invalid_argument("noncollinearity_measure: grid must be positive");
  const std::vector<Eigen::Matrix3d> G = g.sample(grid);
  const GridVector a = to_grid(alpha, grid);
  const GridVector b = to_grid(beta, grid);
  std::size_t hits = 0;
  for (std::size_t p = 0; p < G.size(); ++p) {
    const auto q = Eigen::Index(p);
    const Eigen::Vector3d av(a[0][q], a[1][q], a[2][q]);
    const Eigen::Vector3d bv(b[0][q], b[1][q], b[2][q]);
    const Eigen::Matrix3d gi = G[p].inverse();
    const double ab = av.dot(gi * bv);
    const double gram = av.dot(gi * av) * bv.dot(gi * bv) - ab * ab;
    if (std::sqrt(std::max(0.0, gram)) < tol) ++hits;
  }
  return double(hits) / double(G.size());
}

double variation_pairing(const OneForm& a1, const OneForm& a2, const TensorField& h, const MetricField& g,
                         double lambda, int grid) {
  if (grid <= 0) {
    // Integrand degree: the forms, h, two inverse metrics (adjugates) and sqrt(det).
    const int deg = a1.degree() + a2.degree() + h.degree() + 4 * g.degree();
    grid = std::max(g.is_polynomial() ? 16 : 32, even_at_least(deg + 1));
  }
  const std::vector<Eigen::Matrix3d> G = g.sample(grid);
  const std::vector<Eigen::Matrix3d> H = h.sample(grid);
  const GridVector u = to_grid(a1, grid);
  const GridVector w = to_grid(a2, grid);
  double sum = 0.0;
  for (std::size_t p = 0; p < G.size(); ++p) {
    const auto q = Eigen::Index(p);
    const Eigen::Vector3d uv(u[0][q], u[1][q], u[2][q]);
    const Eigen::Vector3d wv(w[0][q], w[1][q], w[2][q]);
    const Eigen::Matrix3d gi = G[p].inverse();
    const Eigen::Vector3d us = gi * uv, ws = gi * wv;
    const double trace = (gi * H[p]).trace();
    sum += (lambda * ws.dot(H[p] * us) - 0.5 * lambda * trace * ws.dot(uv)) * std::sqrt(G[p].determinant());
  }
  const double cell = std::pow(kTwoPi / grid, 3);
  return sum * cell;
}

}  // namespace beltrami
