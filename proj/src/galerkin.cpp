#include "beltrami/galerkin.hpp"

#include "beltrami/grid_transform.hpp"
#include "beltrami/spectral.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace beltrami {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kVolume = kTwoPi * kTwoPi * kTwoPi;

int even_at_least(int n) { return n % 2 ? n + 1 : n; }

int levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  return ((j - i + 3) % 3 == 1) ? 1 : -1;
}

int wrap(int k, int n) { return ((k % n) + n) % n; }

}  // namespace

// ---------------------------------------------------------------------------
// Basis

FormBasis::FormBasis(int K) : K_(K) {
  if (K < 1) throw std::invalid_argument("build_basis: K must be at least 1");
  waves_.push_back({0, 0, 0});
  kinds_.push_back(Kind::Constant);
  for (int a = -K; a <= K; ++a)
    for (int b = -K; b <= K; ++b)
      for (int c = -K; c <= K; ++c) {
        const WaveVector k{a, b, c};
        if (k.is_zero() || !k.is_canonical()) continue;
        waves_.push_back(k);
        kinds_.push_back(Kind::Cos);
        waves_.push_back(k);
        kinds_.push_back(Kind::Sin);
      }
}

int FormBasis::scalar_index(const WaveVector& k, Kind kind) const {
  if (k.is_zero()) return kind == Kind::Constant ? 0 : -1;
  if (kind == Kind::Constant || !k.is_canonical() || k.sup_norm() > K_) return -1;
  // Canonical vectors are enumerated lexicographically; count those before k.
  const auto it = std::lower_bound(waves_.begin() + 1, waves_.end(), k);
  const int cos_index = int(it - waves_.begin());
  return kind == Kind::Cos ? cos_index : cos_index + 1;
}

double FormBasis::flat_norm2(int i) const {
  return kinds_[std::size_t(i / 3)] == Kind::Constant ? kVolume : 0.5 * kVolume;
}

Eigen::VectorXd FormBasis::coordinates(const OneForm& form) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dimension());
  for (const auto& [k, c] : form.modes()) {
    if (k.is_zero()) {
      for (int p = 0; p < 3; ++p) x[index(0, p)] = c[p].real();
      continue;
    }
    if (!k.is_canonical()) continue;
    if (k.sup_norm() > K_) throw std::out_of_range("form has modes beyond the basis truncation");
    const int ac = scalar_index(k, Kind::Cos);
    for (int p = 0; p < 3; ++p) {
      x[index(ac, p)] = 2.0 * c[p].real();
      x[index(ac + 1, p)] = -2.0 * c[p].imag();
    }
  }
  return x;
}

OneForm FormBasis::form(const Eigen::VectorXd& coords) const {
  if (coords.size() != dimension()) throw std::invalid_argument("coordinate vector has the wrong size");
  OneForm f(K_);
  for (int a = 0; a < scalar_count(); ++a) {
    const Eigen::Vector3d v(coords[index(a, 0)], coords[index(a, 1)], coords[index(a, 2)]);
    if (v.isZero(0.0)) continue;
    if (kinds_[std::size_t(a)] == Kind::Sin)
      f.add_sin(waves_[std::size_t(a)], v);
    else
      f.add_cos(waves_[std::size_t(a)], v);
  }
  return f;
}

FormBasis build_basis(int K) { return FormBasis(K); }

// ---------------------------------------------------------------------------
// Pencil assembly

Eigen::MatrixXd assemble_exterior(const FormBasis& basis) {
  const int D = basis.dimension();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(D, D);
  const double half = 0.5 * kVolume;
  for (int a = 1; a < basis.scalar_count(); a += 2) {
    const WaveVector& k = basis.wave(a);
    const int c = a, s = a + 1;
    // int sin_k d_r cos_k = -k_r V/2,  int cos_k d_r sin_k = k_r V/2.
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) {
        double acc = 0.0;
        for (int r = 0; r < 3; ++r) acc += levi_civita(p, r, q) * k[r];
        if (acc == 0.0) continue;
        B(FormBasis::index(s, p), FormBasis::index(c, q)) = -acc * half;
        B(FormBasis::index(c, p), FormBasis::index(s, q)) = acc * half;
      }
  }
  return B;
}

Eigen::MatrixXd assemble_weighted(const FormBasis& basis, const std::vector<Eigen::Matrix3d>& weight, int n) {
  const UniformGrid grid{n};
  if (weight.size() != grid.size()) throw std::invalid_argument("weight samples do not match the grid");
  // Fourier coefficients of the six independent weight components.
  static constexpr int pairs[6][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
  std::array<Eigen::ArrayXcd, 6> coef;
  for (int c = 0; c < 6; ++c) {
    Eigen::ArrayXd values(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) values[Eigen::Index(p)] = weight[p](pairs[c][0], pairs[c][1]);
    coef[c] = grid_coefficients(values, n);
  }
  auto at = [&](int c, const WaveVector& m) {
    return coef[c][Eigen::Index(grid.index(wrap(m.x, n), wrap(m.y, n), wrap(m.z, n)))];
  };
  // int W cos(m.x) = V Re W^(m),  int W sin(m.x) = -V Im W^(m).
  const int D = basis.dimension();
  Eigen::MatrixXd M(D, D);
  for (int a = 0; a < basis.scalar_count(); ++a)
    for (int b = a; b < basis.scalar_count(); ++b) {
      const WaveVector d = basis.wave(a) - basis.wave(b), s = basis.wave(a) + basis.wave(b);
      const bool sa = basis.kind(a) == FormBasis::Kind::Sin, sb = basis.kind(b) == FormBasis::Kind::Sin;
      for (int c = 0; c < 6; ++c) {
        const Complex wd = at(c, d), ws = at(c, s);
        const double Cd = wd.real(), Cs = ws.real(), Sd = -wd.imag(), Ss = -ws.imag();
        double val;
        if (!sa && !sb)
          val = 0.5 * (Cd + Cs);
        else if (sa && sb)
          val = 0.5 * (Cd - Cs);
        else if (!sa && sb)
          val = 0.5 * (Ss - Sd);
        else
          val = 0.5 * (Ss + Sd);
        val *= kVolume;
        const int p = pairs[c][0], q = pairs[c][1];
        M(FormBasis::index(a, p), FormBasis::index(b, q)) = val;
        M(FormBasis::index(a, q), FormBasis::index(b, p)) = val;
        M(FormBasis::index(b, p), FormBasis::index(a, q)) = val;
        M(FormBasis::index(b, q), FormBasis::index(a, p)) = val;
      }
    }
  return M;
}

namespace {

int mass_grid(const MetricField& g, int extra_degree, int K, int grid) {
  if (grid > 0) return grid;
  // Polynomial metrics handled here have constant determinant, so g^{-1}
  // has at most twice the metric degree.
  const int deg = 2 * g.degree() + extra_degree;
  return std::max(g.is_polynomial() ? 8 : 32, even_at_least(deg + 2 * K + 1));
}

}  // namespace

Eigen::MatrixXd assemble_mass(const MetricField& g, const FormBasis& basis, int grid) {
  const int n = mass_grid(g, 0, basis.truncation(), grid);
  std::vector<Eigen::Matrix3d> W = g.sample(n);
  for (auto& m : W) {
    const Eigen::LLT<Eigen::Matrix3d> llt(m);
    if (llt.info() != Eigen::Success || !m.allFinite())
      throw NotPositiveDefinite("assemble_mass: metric not positive definite on the quadrature grid");
    m = llt.solve(Eigen::Matrix3d::Identity()) * std::sqrt(m.determinant());
  }
  return assemble_weighted(basis, W, n);
}

Eigen::MatrixXd assemble_mass_derivative(const MetricField& g, const TensorField& h, const FormBasis& basis,
                                         int grid) {
  const int n = mass_grid(g, h.degree() + 2 * g.degree(), basis.truncation(), grid);
  const std::vector<Eigen::Matrix3d> G = g.sample(n);
  const std::vector<Eigen::Matrix3d> H = h.sample(n);
  std::vector<Eigen::Matrix3d> W(G.size());
  for (std::size_t p = 0; p < G.size(); ++p) {
    const Eigen::Matrix3d gi = G[p].inverse();
    const double vol = std::sqrt(G[p].determinant());
    W[p] = (-gi * H[p] * gi + 0.5 * (gi * H[p]).trace() * gi) * vol;
  }
  return assemble_weighted(basis, W, n);
}

// ---------------------------------------------------------------------------
// Eigenproblems

namespace {

void check_window(const Eigen::VectorXd& values, const Window& window) {
  if (!(window.hi > window.lo)) throw std::invalid_argument("window must have lo < hi");
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (std::abs(values[i] - window.lo) < 1e-8 || std::abs(values[i] - window.hi) < 1e-8)
      throw WindowTouchesSpectrum("eigenvalue " + std::to_string(values[i]) + " touches the window (" +
                                  std::to_string(window.lo) + ", " + std::to_string(window.hi) + ")");
}

}  // namespace

EigenCluster solve_pencil(const Eigen::MatrixXd& B, const Eigen::MatrixXd& M, const Window& window) {
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(B, M, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (ges.info() != Eigen::Success) throw NotPositiveDefinite("solve_pencil: mass matrix not positive definite");
  const Eigen::VectorXd& vals = ges.eigenvalues();
  check_window(vals, window);
  std::vector<Eigen::Index> inside;
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (window.contains(vals[i])) inside.push_back(i);
  EigenCluster cl;
  cl.center = window.center();
  cl.radius = window.radius();
  cl.values.resize(Eigen::Index(inside.size()));
  cl.vectors.resize(B.rows(), Eigen::Index(inside.size()));
  for (std::size_t j = 0; j < inside.size(); ++j) {
    cl.values[Eigen::Index(j)] = vals[inside[j]];
    cl.vectors.col(Eigen::Index(j)) = ges.eigenvectors().col(inside[j]);
  }
  return cl;
}

Eigen::VectorXd pencil_spectrum(const Eigen::MatrixXd& B, const Eigen::MatrixXd& M) {
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(B, M, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (ges.info() != Eigen::Success) throw NotPositiveDefinite("pencil_spectrum: mass matrix not positive definite");
  return ges.eigenvalues();
}

namespace {

Eigen::VectorXd cluster_values(const Eigen::MatrixXd& B, const Eigen::MatrixXd& M, const Window& window) {
  const Eigen::VectorXd vals = pencil_spectrum(B, M);
  check_window(vals, window);
  std::vector<double> in;
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (window.contains(vals[i])) in.push_back(vals[i]);
  return Eigen::Map<Eigen::VectorXd>(in.data(), Eigen::Index(in.size()));
}

}  // namespace

SplittingCurves track_splitting(const MetricFamily& family, const ContactForm& form, const Window& window, int K,
                                const std::vector<double>& epsilons) {
  const FormBasis basis(K);
  const Eigen::MatrixXd B = assemble_exterior(basis);
  const Eigen::VectorXd a = basis.coordinates(form.alpha);
  const double lambda0 = form.lambda0;

  SplittingCurves out;
  out.epsilons = epsilons;
  out.min_separation_ratio = std::numeric_limits<double>::infinity();
  for (double e : epsilons) {
    const Eigen::MatrixXd M = assemble_mass(family.member(e), basis);
    Eigen::VectorXd vals = cluster_values(B, M, window);
    if (out.branches.empty())
      out.multiplicity = int(vals.size());
    else if (vals.size() != out.multiplicity)
      throw ClusterLeakage("cluster size changes along the family (" + std::to_string(out.multiplicity) + " -> " +
                           std::to_string(vals.size()) + ")");
    if (vals.size() == 0) throw ClusterLeakage("empty cluster in the window");
    out.alpha_defect = std::max(out.alpha_defect, (vals.array() - lambda0).abs().minCoeff());
    const Eigen::VectorXd Ma = M * a;
    out.alpha_residual = std::max(out.alpha_residual, (B * a - lambda0 * Ma).norm() / Ma.norm());
    if (e != 0.0) out.min_separation_ratio = std::min(out.min_separation_ratio, (vals.maxCoeff() - vals.minCoeff()) / std::abs(e));
    if (e < 0.0) vals.reverseInPlace();
    out.branches.push_back(vals);
  }
  out.fitted_slopes = Eigen::VectorXd::Zero(out.multiplicity);
  double ee = 0.0;
  for (std::size_t j = 0; j < epsilons.size(); ++j) {
    out.fitted_slopes += epsilons[j] * (out.branches[j].array() - lambda0).matrix();
    ee += epsilons[j] * epsilons[j];
  }
  if (ee > 0.0) out.fitted_slopes /= ee;
  out.slope_gap = out.fitted_slopes.maxCoeff() - out.fitted_slopes.minCoeff();
  if (!std::isfinite(out.min_separation_ratio)) out.min_separation_ratio = 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// First-order theory

std::vector<OneForm> adapted_v_basis(const OneForm& alpha, const OneForm& beta) {
  const auto hel = helicity_basis(1);
  auto integral_inner = [](const OneForm& a, const OneForm& b) { return kVolume * inner_product(a, b); };
  auto residual_outside = [&](const OneForm& f) {
    OneForm r = f;
    for (const auto& h : hel) r -= h * inner_product(f, h);
    return std::sqrt(std::max(0.0, inner_product(r, r))) / std::max(1e-300, std::sqrt(inner_product(f, f)));
  };
  if (residual_outside(alpha) > 1e-12 || residual_outside(beta) > 1e-12)
    throw std::invalid_argument("adapted_v_basis: alpha and beta must lie in the curl eigenspace");

  std::vector<OneForm> out;
  std::vector<OneForm> candidates = {alpha, beta};
  candidates.insert(candidates.end(), hel.begin(), hel.end());
  for (OneForm c : candidates) {
    for (const auto& u : out) c -= u * integral_inner(c, u);
    const double n2 = integral_inner(c, c);
    if (n2 < 1e-20) continue;
    c *= 1.0 / std::sqrt(n2);
    c.prune(1e-17);
    out.push_back(std::move(c));
    if (out.size() == hel.size()) break;
  }
  return out;
}

Eigen::MatrixXd pairing_matrix(const std::vector<OneForm>& u, const TensorField& h, const MetricField& g,
                               double lambda) {
  const auto k = Eigen::Index(u.size());
  Eigen::MatrixXd P(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i; j < k; ++j) {
      P(i, j) = variation_pairing(u[std::size_t(i)], u[std::size_t(j)], h, g, lambda);
      P(j, i) = P(i, j);
    }
  return P;
}

HellmannFeynman hellmann_feynman(const MetricFamily& family, const ContactForm& form, const OneForm& u, double lambda,
                                 int K, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("hellmann_feynman: step must be positive");
  const std::vector<OneForm> V = adapted_v_basis(form.alpha, family.beta());
  const TensorField& h = family.variation().h;
  const MetricField& g = family.base();
  const Eigen::MatrixXd Pi = pairing_matrix(V, h, g, lambda);

  // Direction in the adapted basis.
  const auto k = Eigen::Index(V.size());
  Eigen::VectorXd c(k);
  OneForm rest = u;
  for (Eigen::Index j = 0; j < k; ++j) {
    c[j] = kVolume * inner_product(u, V[std::size_t(j)]);
    rest -= V[std::size_t(j)] * c[j];
  }
  if (c.norm() == 0.0 || std::sqrt(kVolume * inner_product(rest, rest)) > 1e-10 * c.norm())
    throw std::invalid_argument("hellmann_feynman: direction is not in the eigenspace");

  const double mu = c.dot(Pi * c) / c.squaredNorm();
  const double scale = std::max(Pi.norm(), 1e-300);
  if ((Pi * c - mu * c).norm() > 1e-9 * scale * c.norm())
    throw DegenerateDirection("direction is not an eigenvector of the pairing matrix; cluster-adapt it first");

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Pi);
  const Eigen::VectorXd& ev = es.eigenvalues();
  int first = -1, last = -1;
  for (Eigen::Index j = 0; j < k; ++j)
    if (std::abs(ev[j] - mu) <= 1e-9 * scale) {
      if (first < 0) first = int(j);
      last = int(j);
    }
  if (first < 0) throw DegenerateDirection("pairing eigenvalue not found");

  const FormBasis basis(K);
  const Eigen::MatrixXd B = assemble_exterior(basis);
  const Window window{lambda - 0.25 * std::abs(lambda), lambda + 0.25 * std::abs(lambda)};
  auto central = [&](double s) {
    const Eigen::VectorXd up = cluster_values(B, assemble_mass(family.member(s), basis), window);
    const Eigen::VectorXd down = cluster_values(B, assemble_mass(family.member(-s), basis), window);
    if (up.size() != k || down.size() != k)
      throw ClusterLeakage("cluster multiplicity differs from the eigenspace dimension");
    double acc = 0.0;
    for (int i = first; i <= last; ++i) acc += (up[i] - down[k - 1 - i]) / (2.0 * s);
    return acc / double(last - first + 1);
  };

  HellmannFeynman r;
  r.branch = first;
  const double d1 = central(step), d2 = central(0.5 * step);
  r.finite_difference = (4.0 * d2 - d1) / 3.0;

  const Eigen::VectorXd uh = basis.coordinates(u);
  const Eigen::MatrixXd M0 = assemble_mass(g, basis);
  const Eigen::MatrixXd M1 = assemble_mass_derivative(g, h, basis);
  r.pencil = -lambda * uh.dot(M1 * uh) / uh.dot(M0 * uh);
  r.pairing = variation_pairing(u, u, h, g, lambda) / (kVolume * inner_product(u, u));
  return r;
}

Eigen::MatrixXd galerkin_pi_derivative(const MetricField& g, const TensorField& h, const std::vector<OneForm>& u,
                                       int K) {
  const FormBasis basis(K);
  const Eigen::MatrixXd B = assemble_exterior(basis);
  const Eigen::MatrixXd M = assemble_mass(g, basis);
  const Eigen::MatrixXd M1 = assemble_mass_derivative(g, h, basis);

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  const Eigen::MatrixXd& Q = es.eigenvectors();
  const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(1e-12);
  const Eigen::VectorXd root = lam.cwiseSqrt();

  // Daleckii-Krein: d(M^{-1/2})[M'] = Q (F o Q^T M' Q) Q^T with the divided
  // differences of x^{-1/2}: -1 / (sqrt(a) sqrt(b) (sqrt(a) + sqrt(b))).
  const Eigen::MatrixXd T = Q.transpose() * M1 * Q;
  Eigen::MatrixXd F(T.rows(), T.cols());
  for (Eigen::Index i = 0; i < F.rows(); ++i)
    for (Eigen::Index j = 0; j < F.cols(); ++j) F(i, j) = -T(i, j) / (root[i] * root[j] * (root[i] + root[j]));

  // Frame U = M^{1/2} X with X the Galerkin vectors; S U = X.
  Eigen::MatrixXd X(basis.dimension(), Eigen::Index(u.size()));
  for (std::size_t j = 0; j < u.size(); ++j) X.col(Eigen::Index(j)) = basis.coordinates(u[j]);
  const Eigen::MatrixXd U = Q * (root.asDiagonal() * (Q.transpose() * X));
  const Eigen::MatrixXd Y = Q * (F * (Q.transpose() * U));  // S' U
  const Eigen::MatrixXd BX = B * X;
  Eigen::MatrixXd P = Y.transpose() * BX;
  P += P.transpose().eval();
  return 0.5 * (P + P.transpose());
}

}  // namespace beltrami
