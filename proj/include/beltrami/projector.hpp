#pragma once

#include "beltrami/errors.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>

namespace beltrami {

/// Contour-integral projector (1 / 2 pi i) \oint (z - A)^{-1} dz over the
/// circle |z - center| = radius, trapezoidal rule with `nodes` points (even).
/// A is reduced to tridiagonal form once; each node costs O(D^2).
/// Throws IllConditionedContour when an eigenvalue lies within
/// 1e-6 radius of the circle or the quadrature produces non-finite values.
Eigen::MatrixXd spectral_projector(const Eigen::MatrixXd& A, double center, double radius, int nodes = 64);

/// Number of eigenvalues of the symmetric matrix A strictly below x.
int count_below(const Eigen::MatrixXd& A, double x);

/// One-parameter C^1 family q -> A(q) of symmetric matrices with its derivative.
struct MatrixFamily {
  std::function<Eigen::MatrixXd(double)> value;
  std::function<Eigen::MatrixXd(double)> derivative;  ///< may be empty
};

struct PiMapReport {
  Eigen::MatrixXd projector;  ///< P(q)
  Eigen::MatrixXd pi;         ///< k x k compression at q
  Eigen::MatrixXd pi_prime;   ///< U0^T A'(q0) U0 (empty without a derivative)
  Eigen::MatrixXd frame;      ///< U0, orthonormal basis of the cluster at q0
  double sigma_match_defect = 0.0;  ///< Hausdorff distance of sigma(pi) and sigma(A_q) in the disk
  double identity_deviation = 0.0;  ///< splitting_certificate(pi)
  int multiplicity = 0;
};

/// pi(q) = S^{-1/2} W^T A(q) W S^{-1/2}, W = P(q) U0, S = W^T W, with U0 the
/// range of P(q0). Throws ClusterLeakage when trace P(q) differs from the
/// cluster size at q0 by more than 1e-6.
PiMapReport pi_map(const MatrixFamily& family, double q, double q0, double center, double radius, int nodes = 64);

/// Entries <DA u_m, u_l> for an orthonormal eigenbasis u (columns).
Eigen::MatrixXd pi_derivative(const Eigen::MatrixXd& DA, const Eigen::MatrixXd& u);

/// |pi' - (tr pi' / k) I|_F; positive when pi' is not a multiple of the identity.
double splitting_certificate(const Eigen::MatrixXd& pi_prime);

/// Random symmetric test matrix Q diag(mu) Q^T with Haar-like Q and a
/// controlled spectrum: k eigenvalues within 0.6 radius of the center, the
/// rest at distance between 1.5 and 4.5 radius.
Eigen::MatrixXd designed_symmetric(int dim, int k, double center, double radius, std::uint64_t seed);

/// designed_symmetric(dim, k, center, radius) + q A1 + q^2 A2 with random
/// symmetric A1, A2 of Frobenius norm radius / 2, so the cluster stays
/// isolated for |q| <= 0.1.
MatrixFamily random_family(int dim, int k, double center, double radius, std::uint64_t seed);

}  // namespace beltrami
