#include "beltrami/spectral.hpp"

#include "beltrami/errors.hpp"
#include "beltrami/rng.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <limits>
#include <numbers>

namespace beltrami {

// ---------------------------------------------------------------------------
// Counter-based RNG

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t bits = mix64(mix64(seed) ^ mix64(counter + 0x632BE59BD9B4E019ULL));
  // 53 random mantissa bits, shifted off zero.
  return (double(bits >> 11) + 0.5) * 0x1.0p-53;
}

double counter_normal(std::uint64_t seed, std::uint64_t index) {
  const double u1 = counter_uniform(seed, 2 * index);
  const double u2 = counter_uniform(seed, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// ---------------------------------------------------------------------------
// Constructors and linear operators

VectorField make_abc(const ABCParams& p) {
  VectorField v(1);
  const WaveVector e1{1, 0, 0}, e2{0, 1, 0}, e3{0, 0, 1};
  v.add_sin(e3, Eigen::Vector3d(p.A, 0, 0));
  v.add_cos(e2, Eigen::Vector3d(p.C, 0, 0));
  v.add_sin(e1, Eigen::Vector3d(0, p.B, 0));
  v.add_cos(e3, Eigen::Vector3d(0, p.A, 0));
  v.add_sin(e2, Eigen::Vector3d(0, 0, p.C));
  v.add_cos(e1, Eigen::Vector3d(0, 0, p.B));
  return v;
}

namespace {

// Eigen's cross() conjugates complex operands; this is the plain bilinear one.
Vector3c cross3(const Vector3c& a, const Vector3c& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace

VectorField curl(const VectorField& v) {
  auto out = v.map_modes([](const WaveVector& k, const Vector3c& c) -> Vector3c {
    return cross3(k.as_vector().cast<Complex>() * Complex(0.0, 1.0), c);
  });
  out.prune();
  return out;
}

ScalarField divergence(const VectorField& v) {
  auto out = v.map_modes([](const WaveVector& k, const Vector3c& c) -> Complex {
    return Complex(0.0, 1.0) * (k.as_vector().cast<Complex>().transpose() * c).value();
  });
  out.prune();
  return out;
}

VectorField gradient(const ScalarField& f) {
  auto out = f.map_modes([](const WaveVector& k, const Complex& c) -> Vector3c {
    return k.as_vector().cast<Complex>() * (Complex(0.0, 1.0) * c);
  });
  out.prune();
  return out;
}

ScalarField inverse_neg_laplacian(const ScalarField& f) {
  auto out = f.map_modes([](const WaveVector& k, const Complex& c) -> Complex {
    return k.is_zero() ? Complex(0.0, 0.0) : c / double(k.norm2());
  });
  out.prune();
  return out;
}

double inner_product(const VectorField& a, const VectorField& b) {
  double s = 0.0;
  for (const auto& [k, ca] : a.modes()) {
    const Vector3c cb = b.coeff(k);
    s += (ca.transpose() * cb.conjugate()).value().real();
  }
  return s;
}

// ---------------------------------------------------------------------------
// Curl eigenspaces

Vector3c helicity_vector(const WaveVector& k) {
  if (k.is_zero()) throw std::invalid_argument("helicity_vector: k = 0");
  const WaveVector rep = k.is_canonical() ? k : -k;
  const Eigen::Vector3d kv = rep.as_vector();
  const Eigen::Vector3d a = (rep.y == 0 && rep.z == 0) ? Eigen::Vector3d::UnitY() : Eigen::Vector3d::UnitX();
  const Eigen::Vector3d e1 = kv.cross(a).normalized();
  Eigen::Vector3d e2 = kv.normalized().cross(e1);
  // e2 flips with k so that h(-k) = conj(h(k)).
  if (!k.is_canonical()) e2 = -e2;
  return (e1.cast<Complex>() + Complex(0.0, 1.0) * e2.cast<Complex>()) / std::sqrt(2.0);
}

std::vector<VectorField> helicity_basis(std::int64_t n) {
  const EigenShell shell = lattice_shell(n);
  if (shell.empty() || n == 0)
    throw NoSuchEigenvalue("no curl eigenvalue sqrt(" + std::to_string(n) + ") on the flat torus");
  int truncation = 0;
  for (const auto& k : shell.vectors) truncation = std::max(truncation, k.sup_norm());

  std::vector<VectorField> basis;
  const double s = 1.0 / std::sqrt(2.0);
  for (const auto& k : shell.canonical()) {
    const Vector3c h = helicity_vector(k);
    for (const Complex phase : {Complex(s, 0.0), Complex(0.0, s)}) {
      VectorField u(truncation);
      u.add_real_mode(k, h * phase);
      basis.push_back(std::move(u));
    }
  }
  return basis;
}

VectorField random_beltrami(std::int64_t n, std::uint64_t seed) {
  const auto basis = helicity_basis(n);
  VectorField v(basis.front().truncation());
  const double scale = 1.0 / std::sqrt(double(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) v += basis[j] * (scale * counter_normal(seed, j));
  return v;
}

double eigen_residual(const std::vector<VectorField>& family, double lambda, const CurlOperator& op) {
  double worst = 0.0;
  for (const auto& u : family) worst = std::max(worst, (op(u) - u * lambda).max_coeff());
  return worst;
}

double gram_deviation(const std::vector<VectorField>& family) {
  double worst = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = 0; j < family.size(); ++j)
      worst = std::max(worst, std::abs(inner_product(family[i], family[j]) - (i == j ? 1.0 : 0.0)));
  return worst;
}

// ---------------------------------------------------------------------------
// Nonlinear terms and Poisson solves

VectorField cross_product(const VectorField& a, const VectorField& b) {
  const int n = product_grid_size(a.truncation(), b.truncation());
  const GridVector ga = to_grid(a, n), gb = to_grid(b, n);
  GridVector out;
  out[0] = ga[1] * gb[2] - ga[2] * gb[1];
  out[1] = ga[2] * gb[0] - ga[0] * gb[2];
  out[2] = ga[0] * gb[1] - ga[1] * gb[0];
  return from_grid(out, n, a.truncation() + b.truncation());
}

VectorField advection(const VectorField& v) {
  const int n = product_grid_size(v.truncation(), v.truncation());
  const GridVector gv = to_grid(v, n);
  GridVector out;
  for (auto& o : out) o = Eigen::ArrayXd::Zero(gv[0].size());
  for (int i = 0; i < 3; ++i) {
    const GridVector dv = to_grid(partial(v, i), n);
    for (int j = 0; j < 3; ++j) out[j] += gv[i] * dv[j];
  }
  return from_grid(out, n, 2 * v.truncation());
}

ScalarField bernoulli(const VectorField& v) {
  // Laplacian F = div w  <=>  F = -(-Laplacian)^{-1} div w.
  const VectorField w = cross_product(v, curl(v));
  return inverse_neg_laplacian(divergence(w)) * -1.0;
}

ScalarField pressure(const VectorField& v) {
  return inverse_neg_laplacian(divergence(advection(v)));
}

SteadyResidual steady_residual(const VectorField& v) {
  SteadyResidual r;
  const VectorField adv = advection(v);
  const ScalarField p = inverse_neg_laplacian(divergence(adv));
  r.euler = (adv + gradient(p)).l2_norm();

  const VectorField w = cross_product(v, curl(v));
  const ScalarField F = inverse_neg_laplacian(divergence(w)) * -1.0;
  r.bernoulli = (w - gradient(F)).l2_norm();
  return r;
}

// ---------------------------------------------------------------------------
// Pointwise diagnostics

GridVector sample(const VectorField& v, int n) { return to_grid(v, n); }

ScalarGridReport proportionality_factor(const VectorField& v, int n) {
  const GridVector gv = sample(v, n);
  const GridVector gc = sample(curl(v), n);
  const Eigen::ArrayXd norm2 = gv[0].square() + gv[1].square() + gv[2].square();
  const double max_norm = std::sqrt(norm2.maxCoeff());
  const double min_norm_on_grid = std::sqrt(norm2.minCoeff());
  if (!(max_norm > 0.0) || min_norm_on_grid <= 1e-8 * max_norm)
    throw VanishingField("proportionality factor undefined: |v| vanishes on the grid (min |v| = " +
                         std::to_string(min_norm_on_grid) + ")");
  ScalarGridReport report;
  report.grid = UniformGrid{n};
  report.values = (gv[0] * gc[0] + gv[1] * gc[1] + gv[2] * gc[2]) / norm2;
  report.min = report.values.minCoeff();
  report.max = report.values.maxCoeff();
  return report;
}

double min_norm(const VectorField& v, int n) {
  const UniformGrid grid{n};
  const GridVector gv = sample(v, n);
  const Eigen::ArrayXd norm2 = gv[0].square() + gv[1].square() + gv[2].square();
  Eigen::Index best_idx = 0;
  double best = norm2.minCoeff(&best_idx);
  Eigen::Vector3d x = grid.point(std::size_t(best_idx));

  // Pattern search on |v|^2 starting at a tenth of the grid spacing; the step
  // halves whenever a full sweep over the axes brings no improvement.
  double step = grid.spacing() / 10.0;
  const double min_step = grid.spacing() * 1e-9;
  for (int iter = 0; iter < 100000 && step > min_step && best > 0.0; ++iter) {
    bool improved = false;
    for (int axis = 0; axis < 3; ++axis)
      for (const double dir : {1.0, -1.0}) {
        Eigen::Vector3d trial = x;
        trial[axis] += dir * step;
        const double val = v.evaluate(trial).squaredNorm();
        if (val < best) {
          best = val;
          x = trial;
          improved = true;
        }
      }
    if (!improved) step *= 0.5;
  }
  return std::sqrt(best);
}

std::vector<Eigen::Vector3d> evaluate(const VectorField& v, const std::vector<Eigen::Vector3d>& points) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<Eigen::Vector3d> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    Eigen::Vector3d wrapped;
    for (int i = 0; i < 3; ++i) wrapped[i] = p[i] - two_pi * std::floor(p[i] / two_pi);
    out.push_back(v.evaluate(wrapped));
  }
  return out;
}

}  // namespace beltrami
