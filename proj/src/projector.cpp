#include "beltrami/projector.hpp"

#include "beltrami/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

namespace beltrami {

namespace {

using RowMatrixXcd = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

int sturm_count(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double x) {
  const double tiny = std::numeric_limits<double>::min() * 1e3;
  int neg = 0;
  double d = 1.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    d = (a[i] - x) - (i > 0 ? b[i - 1] * b[i - 1] / d : 0.0);
    if (d == 0.0) d = -tiny;
    neg += d < 0.0;
  }
  return neg;
}

void check_contour(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double center, double radius) {
  const double delta = 1e-6 * radius;
  for (double edge : {center - radius, center + radius}) {
    if (sturm_count(a, b, edge + delta) != sturm_count(a, b, edge - delta))
      throw IllConditionedContour("eigenvalue within 1e-6 radius of the contour near " + std::to_string(edge));
  }
}

// (z - T)^{-1} for real symmetric tridiagonal T. With Im z != 0 every pivot
// keeps the sign of Im z and |pivot| >= |Im z|, so no row exchanges are needed.
void tridiagonal_inverse(const Eigen::VectorXd& a, const Eigen::VectorXd& b, std::complex<double> z,
                         RowMatrixXcd& X) {
  const Eigen::Index n = a.size();
  Eigen::VectorXcd d(n);
  X.setIdentity(n, n);
  d[0] = z - a[0];
  for (Eigen::Index i = 1; i < n; ++i) {
    const std::complex<double> l = -b[i - 1] / d[i - 1];
    d[i] = z - a[i] + l * b[i - 1];
    X.row(i).head(i) -= l * X.row(i - 1).head(i);
  }
  X.row(n - 1) /= d[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) X.row(i) = (X.row(i) + b[i] * X.row(i + 1)) / d[i];
}

}  // namespace

int count_below(const Eigen::MatrixXd& A, double x) {
  if (A.rows() == 0) return 0;
  const Eigen::Tridiagonalization<Eigen::MatrixXd> tri(A);
  return sturm_count(tri.diagonal(), tri.subDiagonal(), x);
}

Eigen::MatrixXd spectral_projector(const Eigen::MatrixXd& A, double center, double radius, int nodes) {
  if (A.rows() != A.cols() || A.rows() == 0) throw std::invalid_argument("spectral_projector: square matrix required");
  if (!(radius > 0.0) || !std::isfinite(center)) throw std::invalid_argument("spectral_projector: bad contour");
  if (nodes < 4 || nodes % 2) throw std::invalid_argument("spectral_projector: nodes must be even and >= 4");
  if (!A.allFinite()) throw IllConditionedContour("spectral_projector: non-finite matrix");

  const Eigen::Tridiagonalization<Eigen::MatrixXd> tri(A);
  const Eigen::VectorXd a = tri.diagonal();
  const Eigen::VectorXd b = tri.subDiagonal();
  check_contour(a, b, center, radius);

  const Eigen::Index n = A.rows();
  Eigen::MatrixXd PT = Eigen::MatrixXd::Zero(n, n);
  RowMatrixXcd X(n, n);
  // Nodes at half-offset angles; the lower half follows by conjugation.
  for (int j = 0; j < nodes / 2; ++j) {
    const double theta = 2.0 * std::numbers::pi * (j + 0.5) / nodes;
    const std::complex<double> w = radius * std::polar(1.0, theta);
    tridiagonal_inverse(a, b, center + w, X);
    PT += (2.0 / nodes) * (w * X.array()).real().matrix();
  }
  if (!PT.allFinite()) throw IllConditionedContour("spectral_projector: non-finite quadrature");
  const Eigen::MatrixXd Q = tri.matrixQ();
  Eigen::MatrixXd P = Q * PT * Q.transpose();
  return 0.5 * (P + P.transpose());
}

PiMapReport pi_map(const MatrixFamily& family, double q, double q0, double center, double radius, int nodes) {
  if (!family.value) throw std::invalid_argument("pi_map: family has no value function");
  const Eigen::MatrixXd A0 = family.value(q0);
  const Eigen::MatrixXd P0 = spectral_projector(A0, center, radius, nodes);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es0(P0);
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < es0.eigenvalues().size(); ++i)
    if (es0.eigenvalues()[i] > 0.5) cols.push_back(i);
  const int k = int(cols.size());
  if (k == 0) throw ClusterLeakage("pi_map: no eigenvalues inside the contour at q0");
  if (std::abs(P0.trace() - k) > 1e-6) throw ClusterLeakage("pi_map: projector trace is not an integer at q0");

  PiMapReport r;
  r.multiplicity = k;
  r.frame.resize(A0.rows(), k);
  for (int j = 0; j < k; ++j) r.frame.col(j) = es0.eigenvectors().col(cols[std::size_t(j)]);

  const Eigen::MatrixXd A = family.value(q);
  r.projector = spectral_projector(A, center, radius, nodes);
  const double tr = r.projector.trace();
  if (std::abs(tr - k) > 1e-6)
    throw ClusterLeakage("pi_map: trace P(q) = " + std::to_string(tr) + " but the cluster has " + std::to_string(k) +
                         " eigenvalues");

  const Eigen::MatrixXd W = r.projector * r.frame;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram(W.transpose() * W);
  const Eigen::MatrixXd S = gram.operatorInverseSqrt();
  const Eigen::MatrixXd pi = S * (W.transpose() * A * W) * S;
  r.pi = 0.5 * (pi + pi.transpose());
  r.identity_deviation = splitting_certificate(r.pi);

  // Dense oracle for the spectral identity.
  const Eigen::VectorXd all = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A, Eigen::EigenvaluesOnly).eigenvalues();
  const Eigen::VectorXd mine = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(r.pi, Eigen::EigenvaluesOnly).eigenvalues();
  std::vector<double> inside;
  for (Eigen::Index i = 0; i < all.size(); ++i)
    if (std::abs(all[i] - center) < radius) inside.push_back(all[i]);
  auto dist = [](double x, const auto& set) {
    double m = std::numeric_limits<double>::infinity();
    for (double y : set) m = std::min(m, std::abs(x - y));
    return m;
  };
  std::vector<double> mv(mine.data(), mine.data() + mine.size());
  double h = 0.0;
  for (double x : mv) h = std::max(h, dist(x, inside));
  for (double x : inside) h = std::max(h, dist(x, mv));
  r.sigma_match_defect = h;

  if (family.derivative) r.pi_prime = pi_derivative(family.derivative(q0), r.frame);
  return r;
}

Eigen::MatrixXd pi_derivative(const Eigen::MatrixXd& DA, const Eigen::MatrixXd& u) { return u.transpose() * DA * u; }

double splitting_certificate(const Eigen::MatrixXd& pi_prime) {
  const Eigen::Index k = pi_prime.rows();
  if (k == 0) return 0.0;
  return (pi_prime - (pi_prime.trace() / double(k)) * Eigen::MatrixXd::Identity(k, k)).norm();
}

namespace {

Eigen::MatrixXd gaussian_symmetric(int dim, std::uint64_t seed) {
  Eigen::MatrixXd G(dim, dim);
  std::uint64_t c = 0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) G(i, j) = counter_normal(seed, c++);
  return 0.5 * (G + G.transpose());
}

}  // namespace

Eigen::MatrixXd designed_symmetric(int dim, int k, double center, double radius, std::uint64_t seed) {
  if (dim < 1 || k < 0 || k > dim) throw std::invalid_argument("designed_symmetric: need 0 <= k <= dim");
  const std::uint64_t vals = mix64(seed ^ 0x5EC7A1ULL);
  Eigen::VectorXd mu(dim);
  for (int i = 0; i < dim; ++i) {
    const double u = counter_uniform(vals, std::uint64_t(2 * i));
    if (i < k) {
      mu[i] = center + 0.6 * radius * (2.0 * u - 1.0);
    } else {
      const double side = counter_uniform(vals, std::uint64_t(2 * i + 1)) < 0.5 ? -1.0 : 1.0;
      mu[i] = center + side * radius * (1.5 + 3.0 * u);
    }
  }
  Eigen::MatrixXd G(dim, dim);
  std::uint64_t c = 0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) G(i, j) = counter_normal(seed, c++);
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
  const Eigen::MatrixXd A = Q * mu.asDiagonal() * Q.transpose();
  return 0.5 * (A + A.transpose());
}

MatrixFamily random_family(int dim, int k, double center, double radius, std::uint64_t seed) {
  const Eigen::MatrixXd A0 = designed_symmetric(dim, k, center, radius, seed);
  Eigen::MatrixXd A1 = gaussian_symmetric(dim, mix64(seed + 1));
  Eigen::MatrixXd A2 = gaussian_symmetric(dim, mix64(seed + 2));
  A1 *= 0.5 * radius / A1.norm();
  A2 *= 0.5 * radius / A2.norm();
  MatrixFamily f;
  f.value = [A0, A1, A2](double q) { return Eigen::MatrixXd(A0 + q * A1 + q * q * A2); };
  f.derivative = [A1, A2](double q) { return Eigen::MatrixXd(A1 + 2.0 * q * A2); };
  return f;
}

}  // namespace beltrami
