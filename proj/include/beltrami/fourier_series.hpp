#pragma once

#include "beltrami/lattice.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>

namespace beltrami {

using Complex = std::complex<double>;
using Vector3c = Eigen::Matrix<Complex, 3, 1>;

template <typename Coeff>
struct CoeffTraits;

template <>
struct CoeffTraits<Complex> {
  using Real = double;
  static Complex zero() { return {0.0, 0.0}; }
  static Complex conj(const Complex& c) { return std::conj(c); }
  static double squared_norm(const Complex& c) { return std::norm(c); }
  static double abs_max(const Complex& c) { return std::abs(c); }
  static Complex from_real(double r) { return {r, 0.0}; }
  static double real_part(const Complex& c) { return c.real(); }
};

template <>
struct CoeffTraits<Vector3c> {
  using Real = Eigen::Vector3d;
  static Vector3c zero() { return Vector3c::Zero(); }
  static Vector3c conj(const Vector3c& c) { return c.conjugate(); }
  static double squared_norm(const Vector3c& c) { return c.squaredNorm(); }
  static double abs_max(const Vector3c& c) { return c.cwiseAbs().maxCoeff(); }
  static Vector3c from_real(const Eigen::Vector3d& r) { return r.cast<Complex>(); }
  static Eigen::Vector3d real_part(const Vector3c& c) { return c.real(); }
};

/// Truncated Fourier series  f(x) = sum_k c_k exp(i k.x)  of a real function on
/// the torus (R / 2 pi Z)^3. Every stored mode is paired with its conjugate at
/// -k; modes with |k|_inf above the truncation radius are never stored.
template <typename Coeff>
class FourierSeries {
 public:
  using Traits = CoeffTraits<Coeff>;
  using Real = typename Traits::Real;
  using ModeMap = std::map<WaveVector, Coeff>;

  FourierSeries() = default;
  explicit FourierSeries(int truncation) : truncation_(truncation) {
    if (truncation < 0) throw std::invalid_argument("negative truncation radius");
  }

  int truncation() const { return truncation_; }

  /// Largest |k|_inf among stored modes (0 for an empty series).
  int degree() const {
    int d = 0;
    for (const auto& [k, c] : modes_) d = std::max(d, k.sup_norm());
    return d;
  }

  /// Per-axis degree: max |k_axis| among stored modes.
  int degree(int axis) const {
    int d = 0;
    for (const auto& [k, c] : modes_) d = std::max(d, std::abs(k[axis]));
    return d;
  }

  void set_truncation(int truncation) {
    if (truncation < degree()) throw std::invalid_argument("truncation below stored degree");
    truncation_ = truncation;
  }

  const ModeMap& modes() const { return modes_; }
  bool empty() const { return modes_.empty(); }

  Coeff coeff(const WaveVector& k) const {
    auto it = modes_.find(k);
    return it == modes_.end() ? Traits::zero() : it->second;
  }

  /// Adds c exp(i k.x) + conj(c) exp(-i k.x); for k = 0 only Re(c) is added.
  void add_real_mode(const WaveVector& k, const Coeff& c) {
    if (k.sup_norm() > truncation_) throw std::out_of_range("mode beyond truncation radius");
    if (k.is_zero()) {
      accumulate(k, Traits::from_real(Traits::real_part(c)));
      return;
    }
    accumulate(k, c);
    accumulate(-k, Traits::conj(c));
  }

  /// Adds amplitude * cos(k.x).
  void add_cos(const WaveVector& k, const Real& amplitude) {
    if (k.is_zero()) {
      add_real_mode(k, Traits::from_real(amplitude));
      return;
    }
    add_real_mode(k, Coeff(Traits::from_real(amplitude) * Complex(0.5, 0.0)));
  }

  /// Adds amplitude * sin(k.x).
  void add_sin(const WaveVector& k, const Real& amplitude) {
    if (k.is_zero()) return;
    add_real_mode(k, Coeff(Traits::from_real(amplitude) * Complex(0.0, -0.5)));
  }

  /// Raw write of a single coefficient; the caller maintains the pairing.
  void set_raw(const WaveVector& k, const Coeff& c) {
    if (k.sup_norm() > truncation_) throw std::out_of_range("mode beyond truncation radius");
    modes_[k] = c;
  }

  Real evaluate(const Eigen::Vector3d& x) const {
    Real acc = Traits::real_part(Traits::zero());
    for (const auto& [k, c] : modes_) {
      if (k.is_zero()) {
        acc += Traits::real_part(c);
      } else if (k.is_canonical()) {
        const double phase = k.as_vector().dot(x);
        acc += 2.0 * Traits::real_part(c * Complex(std::cos(phase), std::sin(phase)));
      }
    }
    return acc;
  }

  /// Root-mean-square norm over the torus (Parseval).
  double l2_norm() const {
    double s = 0.0;
    for (const auto& [k, c] : modes_) s += Traits::squared_norm(c);
    return std::sqrt(s);
  }

  /// max over stored k of |c(-k) - conj(c(k))|.
  double reality_defect() const {
    double worst = 0.0;
    for (const auto& [k, c] : modes_) {
      worst = std::max(worst, Traits::abs_max(coeff(-k) - Traits::conj(c)));
      if (k.is_zero()) worst = std::max(worst, Traits::abs_max(c - Traits::conj(c)));
    }
    return worst;
  }

  /// Largest coefficient magnitude (sup of the coefficient sequence).
  double max_coeff() const {
    double worst = 0.0;
    for (const auto& [k, c] : modes_) worst = std::max(worst, Traits::abs_max(c));
    return worst;
  }

  void prune(double tol = 0.0) {
    std::erase_if(modes_, [tol](const auto& kv) { return Traits::abs_max(kv.second) <= tol; });
  }

  FourierSeries& operator+=(const FourierSeries& o) {
    truncation_ = std::max(truncation_, o.truncation_);
    for (const auto& [k, c] : o.modes_) accumulate(k, c);
    return *this;
  }
  FourierSeries& operator-=(const FourierSeries& o) {
    truncation_ = std::max(truncation_, o.truncation_);
    for (const auto& [k, c] : o.modes_) accumulate(k, Coeff(-c));
    return *this;
  }
  FourierSeries& operator*=(double s) {
    for (auto& [k, c] : modes_) c *= s;
    return *this;
  }

  friend FourierSeries operator+(FourierSeries a, const FourierSeries& b) { return a += b; }
  friend FourierSeries operator-(FourierSeries a, const FourierSeries& b) { return a -= b; }
  friend FourierSeries operator*(FourierSeries a, double s) { return a *= s; }
  friend FourierSeries operator*(double s, FourierSeries a) { return a *= s; }

  /// Applies op(k, c) -> Coeff to every mode. Used for the diagonal operators
  /// (derivatives, Poisson inverses) whose symbols respect the reality pairing.
  template <typename Op>
  auto map_modes(Op&& op) const {
    using Out = std::decay_t<decltype(op(WaveVector{}, std::declval<Coeff>()))>;
    FourierSeries<Out> out(truncation_);
    for (const auto& [k, c] : modes_) out.set_raw(k, op(k, c));
    return out;
  }

 private:
  void accumulate(const WaveVector& k, const Coeff& c) {
    auto [it, inserted] = modes_.try_emplace(k, c);
    if (!inserted) it->second += c;
  }

  int truncation_ = 0;
  ModeMap modes_;
};

using ScalarField = FourierSeries<Complex>;
using VectorField = FourierSeries<Vector3c>;

/// Exact product of two scalar series by discrete convolution of their modes.
inline ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  ScalarField out(a.truncation() + b.truncation());
  for (const auto& [ka, ca] : a.modes())
    for (const auto& [kb, cb] : b.modes()) {
      const Complex c = ca * cb;
      if (c != Complex(0.0, 0.0)) {
        const WaveVector k = ka + kb;
        out.set_raw(k, out.coeff(k) + c);
      }
    }
  return out;
}

inline ScalarField constant_field(double value) {
  ScalarField f(0);
  f.add_cos({0, 0, 0}, value);
  return f;
}

inline ScalarField component(const VectorField& v, int axis) {
  return v.map_modes([axis](const WaveVector&, const Vector3c& c) { return c[axis]; });
}

inline VectorField from_components(const ScalarField& a, const ScalarField& b, const ScalarField& c) {
  VectorField v(std::max({a.truncation(), b.truncation(), c.truncation()}));
  const ScalarField* parts[3] = {&a, &b, &c};
  for (int i = 0; i < 3; ++i)
    for (const auto& [k, coef] : parts[i]->modes()) {
      Vector3c cur = v.coeff(k);
      cur[i] += coef;
      v.set_raw(k, cur);
    }
  return v;
}

/// d/dx_axis: multiplies c_k by i k_axis.
template <typename Coeff>
FourierSeries<Coeff> partial(const FourierSeries<Coeff>& f, int axis) {
  auto out = f.map_modes([axis](const WaveVector& k, const Coeff& c) {
    return Coeff(c * Complex(0.0, double(k[axis])));
  });
  out.prune();
  return out;
}

inline double mean(const ScalarField& f) { return f.coeff({0, 0, 0}).real(); }

/// Integral over [0, 2 pi)^3 of a scalar series (only the mean survives).
inline double integral(const ScalarField& f) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  return mean(f) * kTwoPi * kTwoPi * kTwoPi;
}

}  // namespace beltrami
