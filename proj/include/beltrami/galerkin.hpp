#pragma once

#include "beltrami/contact.hpp"
#include "beltrami/errors.hpp"
#include "beltrami/fourier_series.hpp"

#include <Eigen/Core>

#include <vector>

namespace beltrami {

/// Realified trigonometric 1-forms phi_a(x) dx_p with phi_a in {1, cos k.x,
/// sin k.x} over canonical |k|_inf <= K. Element index i = 3 a + p.
class FormBasis {
 public:
  enum class Kind { Constant, Cos, Sin };

  explicit FormBasis(int K);

  int truncation() const { return K_; }
  int dimension() const { return 3 * int(waves_.size()); }
  int scalar_count() const { return int(waves_.size()); }
  const WaveVector& wave(int a) const { return waves_[std::size_t(a)]; }
  Kind kind(int a) const { return kinds_[std::size_t(a)]; }
  static int index(int a, int p) { return 3 * a + p; }
  /// Position of the scalar function (k, kind); -1 if absent.
  int scalar_index(const WaveVector& k, Kind kind) const;

  /// Flat L2 norm squared of element i: (2 pi)^3 for constants, half that otherwise.
  double flat_norm2(int i) const;

  /// Coordinates of a 1-form in the basis. Throws out_of_range for modes beyond K.
  Eigen::VectorXd coordinates(const OneForm& form) const;
  OneForm form(const Eigen::VectorXd& coords) const;

 private:
  int K_;
  std::vector<WaveVector> waves_;
  std::vector<Kind> kinds_;
};

FormBasis build_basis(int K);

/// B_ij = integral of e_i ^ d e_j, exact; symmetric.
Eigen::MatrixXd assemble_exterior(const FormBasis& basis);

/// M_ij = integral of W(e_i, e_j) for a symmetric weight W sampled on an n^3
/// grid (flat grid order). The weight is resolved by FFT and the basis
/// products by exact product-to-sum lookup, so the result is exact when
/// n > deg W + 2K.
Eigen::MatrixXd assemble_weighted(const FormBasis& basis, const std::vector<Eigen::Matrix3d>& weight, int n);

/// Mass matrix, weight g^{-1} sqrt(det g). Grid 0 picks a node count above
/// the Nyquist bound of (metric degree + 2K), at least 32 for non-polynomial
/// metrics. Throws NotPositiveDefinite.
Eigen::MatrixXd assemble_mass(const MetricField& g, const FormBasis& basis, int grid = 0);

/// dM/deps at g in the direction h: weight
///   -g^{-1} h g^{-1} sqrt(det g) + (1/2) tr(g^{-1} h) g^{-1} sqrt(det g).
Eigen::MatrixXd assemble_mass_derivative(const MetricField& g, const TensorField& h, const FormBasis& basis,
                                         int grid = 0);

struct Window {
  double lo = 0.0;
  double hi = 0.0;
  double center() const { return 0.5 * (lo + hi); }
  double radius() const { return 0.5 * (hi - lo); }
  bool contains(double x) const { return x > lo && x < hi; }
};

struct EigenCluster {
  double center = 0.0;
  double radius = 0.0;
  Eigen::VectorXd values;   ///< ascending
  Eigen::MatrixXd vectors;  ///< columns M-orthonormal
  int multiplicity() const { return int(values.size()); }
};

/// Generalized symmetric eigensolve B x = lambda M x restricted to a window.
/// Throws WindowTouchesSpectrum when an eigenvalue lies within 1e-8 of an
/// endpoint.
EigenCluster solve_pencil(const Eigen::MatrixXd& B, const Eigen::MatrixXd& M, const Window& window);

/// All pencil eigenvalues, ascending.
Eigen::VectorXd pencil_spectrum(const Eigen::MatrixXd& B, const Eigen::MatrixXd& M);

struct SplittingCurves {
  std::vector<double> epsilons;
  /// Branch-tracked cluster eigenvalues: ascending for eps >= 0, descending
  /// for eps < 0, so that each column follows one analytic branch through 0.
  std::vector<Eigen::VectorXd> branches;
  Eigen::VectorXd fitted_slopes;    ///< least-squares slope of each branch through lambda0
  double slope_gap = 0.0;           ///< max - min fitted slope
  double alpha_defect = 0.0;        ///< max over eps of min_i |lambda_i - lambda0|
  double alpha_residual = 0.0;      ///< max over eps of |B a - lambda0 M a| / |M a|
  double min_separation_ratio = 0.0;  ///< min over eps != 0 of (max - min eigenvalue) / |eps|
  int multiplicity = 0;
};

SplittingCurves track_splitting(const MetricFamily& family, const ContactForm& form, const Window& window, int K,
                                const std::vector<double>& epsilons);

/// Orthonormal (integral 1) basis of the lambda0 = 1 eigenspace of curl on
/// the flat torus, ordered (alpha, beta, rest). beta must lie in the space.
std::vector<OneForm> adapted_v_basis(const OneForm& alpha, const OneForm& beta);

/// Pi_ij = variation_pairing(u_i, u_j, h, g, lambda).
Eigen::MatrixXd pairing_matrix(const std::vector<OneForm>& u, const TensorField& h, const MetricField& g,
                               double lambda);

struct HellmannFeynman {
  double finite_difference = 0.0;  ///< Richardson-extrapolated central slope of the matching branch
  double pencil = 0.0;             ///< -lambda u^T M' u / u^T M u
  double pairing = 0.0;            ///< variation_pairing(u, u) / integral |u|^2
  int branch = 0;                  ///< rank of the direction among the Pi eigenvalues
};

/// First-order eigenvalue variation along the family for a direction u in
/// the lambda cluster, three ways. Throws DegenerateDirection when u is not
/// an eigenvector of the pairing matrix.
HellmannFeynman hellmann_feynman(const MetricFamily& family, const ContactForm& form, const OneForm& u,
                                 double lambda, int K, double step = 0.05);

/// Symmetrized-pencil derivative pi'(h) in the frame M^{1/2} [u_1..u_k]
/// (u_i Galerkin vectors of the forms), built from A = S B S, S = M^{-1/2},
/// and the Daleckii-Krein derivative of S.
Eigen::MatrixXd galerkin_pi_derivative(const MetricField& g, const TensorField& h, const std::vector<OneForm>& u,
                                       int K);

}  // namespace beltrami
