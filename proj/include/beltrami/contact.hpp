#pragma once

#include "beltrami/errors.hpp"
#include "beltrami/fourier_series.hpp"
#include "beltrami/grid_transform.hpp"

#include <Eigen/Core>

#include <array>
#include <vector>

namespace beltrami {

/// 1-forms are stored by their coefficient functions in dx1, dx2, dx3.
using OneForm = VectorField;

/// Symmetric 3x3 matrix of trigonometric polynomials.
class TensorField {
 public:
  TensorField() = default;

  static TensorField identity();
  /// Symmetrized outer product (a b^T + b a^T) / 2.
  static TensorField outer(const VectorField& a, const VectorField& b);
  static TensorField outer(const VectorField& a) { return outer(a, a); }

  const ScalarField& operator()(int i, int j) const { return entries_[slot(i, j)]; }
  ScalarField& operator()(int i, int j) { return entries_[slot(i, j)]; }

  Eigen::Matrix3d evaluate(const Eigen::Vector3d& x) const;
  int degree() const;
  /// Pointwise matrices on the uniform grid, flat grid order.
  std::vector<Eigen::Matrix3d> sample(int n) const;

  /// Contraction T v (matrix times vector field), exact.
  VectorField apply(const VectorField& v) const;
  /// Quadratic form a^T T b, exact.
  ScalarField form(const VectorField& a, const VectorField& b) const;
  ScalarField trace() const;
  /// Adjugate (transpose of the cofactor matrix) and determinant, exact.
  TensorField adjugate() const;
  ScalarField determinant() const;

  TensorField& operator+=(const TensorField& o);
  TensorField& operator-=(const TensorField& o);
  TensorField& operator*=(double s);
  friend TensorField operator+(TensorField a, const TensorField& b) { return a += b; }
  friend TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }
  friend TensorField operator*(TensorField a, double s) { return a *= s; }
  friend TensorField operator*(double s, TensorField a) { return a *= s; }
  friend TensorField operator*(const ScalarField& f, const TensorField& t);

 private:
  static int slot(int i, int j);
  std::array<ScalarField, 6> entries_{};
};

/// a . b and f v for trigonometric-polynomial fields, exact.
ScalarField dot(const VectorField& a, const VectorField& b);
VectorField scale(const ScalarField& f, const VectorField& v);

/// A Riemannian metric of the form
///   g = P + phi(q) X,   phi(q) = sqrt(1 + eps^2 q^2 / 4) - eps q / 2 - 1,
/// with P, X, q trigonometric polynomials. Plain polynomial metrics have
/// X = 0; members of a compatible family carry X = g_xi and q = |beta_xi|^2.
class MetricField {
 public:
  MetricField() : MetricField(TensorField::identity()) {}
  explicit MetricField(TensorField polynomial) : poly_(std::move(polynomial)) {}
  MetricField(TensorField polynomial, TensorField xi_part, ScalarField q, double epsilon)
      : poly_(std::move(polynomial)), xi_(std::move(xi_part)), q_(std::move(q)), epsilon_(epsilon) {}

  static MetricField flat() { return MetricField(); }

  Eigen::Matrix3d evaluate(const Eigen::Vector3d& x) const;
  std::vector<Eigen::Matrix3d> sample(int n) const;

  /// True when the metric is itself a trigonometric polynomial.
  bool is_polynomial() const { return epsilon_ == 0.0 || q_.empty(); }
  /// Polynomial part; equals the metric when is_polynomial().
  const TensorField& polynomial() const { return poly_; }
  int degree() const;
  double epsilon() const { return epsilon_; }

  /// Scalar factor multiplying the xi-part, computed without cancellation.
  static double xi_factor(double epsilon, double q);

  MetricField scaled(double s) const;

 private:
  TensorField poly_;
  TensorField xi_;
  ScalarField q_;
  double epsilon_ = 0.0;
};

struct ContactForm {
  OneForm alpha;
  VectorField reeb;
  double lambda0 = 1.0;  ///< star_g d alpha = lambda0 alpha, vol_g = alpha ^ d alpha / lambda0
};

struct ContactModel {
  ContactForm form;
  MetricField metric;
};

/// alpha = cos x3 dx1 - sin x3 dx2, R = (cos x3, -sin x3, 0), flat metric,
/// lambda0 = 1.
ContactModel std_contact_t3();

/// (2 pi)^{-3/2} (0, sin x1, cos x1): unit L2 norm over the torus, L2
/// orthogonal to alpha, in the lambda0 eigenspace of curl.
OneForm default_beta();

/// Pointwise contact-form sanity: sup |i_R d alpha|, sup |alpha(R) - 1|, and
/// the minimum of alpha ^ d alpha (as a density) on the grid.
struct ContactFormReport {
  double reeb_kernel = 0.0;
  double reeb_normalization = 0.0;
  double min_volume_density = 0.0;
};
ContactFormReport check_contact_form(const ContactForm& form, int grid = 16);

/// Sup-norm defects of the three compatibility conditions.
struct CompatibilityReport {
  double unit_norm = 0.0;  ///< max(| |alpha|_g - 1 |, | |R|_g - 1 |)
  double star_d = 0.0;     ///< | star_g d alpha - lambda0 alpha |
  double volume = 0.0;     ///< | sqrt(det g) - alpha ^ d alpha / lambda0 |
  double max() const;
};
CompatibilityReport check_compatibility(const MetricField& g, const ContactForm& form, int grid = 16);

/// beta - beta(R) alpha.
OneForm xi_projection(const OneForm& beta, const ContactForm& form);

/// h = beta_xi (x) beta_xi - |beta_xi|_g^2 g_xi / 2 with g_xi = g - alpha (x) alpha.
struct VariationTensor {
  TensorField h;
  TensorField g_xi;
  OneForm beta_xi;
  ScalarField beta_xi_sq;  ///< |beta_xi|_g^2
};

/// Requires a polynomial metric with constant determinant (so that the
/// inverse metric is a trigonometric polynomial).
VariationTensor variation_tensor(const OneForm& beta, const ContactForm& form, const MetricField& g);

/// g_eps = g + eps beta_xi (x) beta_xi + phi g_xi.
class MetricFamily {
 public:
  MetricFamily(MetricField base, OneForm beta, VariationTensor variation, std::vector<double> epsilons)
      : base_(std::move(base)), beta_(std::move(beta)), var_(std::move(variation)), eps_(std::move(epsilons)) {}

  const MetricField& base() const { return base_; }
  const OneForm& beta() const { return beta_; }
  const VariationTensor& variation() const { return var_; }
  const std::vector<double>& epsilons() const { return eps_; }

  /// Throws NotPositiveDefinite when the member fails positivity on the grid.
  MetricField member(double epsilon, int check_grid = 16) const;

 private:
  MetricField base_;
  OneForm beta_;
  VariationTensor var_;
  std::vector<double> eps_;
};

MetricFamily metric_family(const MetricField& g, const ContactForm& form, const OneForm& beta,
                           std::vector<double> epsilons);

/// Throws NotPositiveDefinite if g fails positivity at a grid point.
void require_positive_definite(const MetricField& g, int grid = 16);

/// Fraction of grid points where |alpha ^ beta|_g < tol.
double noncollinearity_measure(const OneForm& alpha, const OneForm& beta, int grid, double tol,
                               const MetricField& g = MetricField::flat());

/// Integral over the torus of
///   lambda h(a2#, a1#) - (lambda / 2) Tr_g(h) g(a2#, a1#)
/// against vol_g. Grid 0 picks a node count exact for the degrees involved.
double variation_pairing(const OneForm& a1, const OneForm& a2, const TensorField& h, const MetricField& g,
                         double lambda, int grid = 0);

}  // namespace beltrami
