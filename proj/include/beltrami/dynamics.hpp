#pragma once

#include "beltrami/errors.hpp"
#include "beltrami/fourier_series.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace beltrami {

/// Fast pointwise evaluation of a vector field and its Jacobian by exact
/// trigonometric summation over the canonical modes.
class FieldEvaluator {
 public:
  explicit FieldEvaluator(const VectorField& v);

  Eigen::Vector3d value(const Eigen::Vector3d& x) const;
  /// J(i, j) = d v_i / d x_j.
  Eigen::Matrix3d jacobian(const Eigen::Vector3d& x) const;
  void value_and_jacobian(const Eigen::Vector3d& x, Eigen::Vector3d& value, Eigen::Matrix3d& jac) const;

 private:
  Eigen::Vector3d constant_ = Eigen::Vector3d::Zero();
  Eigen::Matrix3Xd waves_;
  Eigen::Matrix3Xd cos_amp_;
  Eigen::Matrix3Xd sin_amp_;
};

struct IntegratorStats {
  long steps = 0;
  long rejected = 0;
  long evaluations = 0;
  double tol = 0.0;
};

/// Dormand-Prince 5(4) embedded pair with the free 4th-order dense output,
/// for autonomous systems x' = f(x). The local error estimate is controlled
/// in the max norm against an absolute tolerance.
template <int Dim, typename Rhs>
class DormandPrince {
 public:
  using State = Eigen::Matrix<double, Dim, 1>;

  DormandPrince(Rhs rhs, const State& x0, double t0, double tol)
      : rhs_(std::move(rhs)), t_(t0), t_prev_(t0), x_(x0), x_prev_(x0) {
    if (!(tol > 0.0)) throw std::invalid_argument("integrator tolerance must be positive");
    stats_.tol = tol;
    k1_ = eval(x_);
    h_ = std::min(0.1, 0.5 * std::pow(tol, 0.2));
  }

  double t() const { return t_; }
  double t_prev() const { return t_prev_; }
  const State& x() const { return x_; }
  const IntegratorStats& stats() const { return stats_; }

  /// Restarts from a new state at the current time (keeps the step size).
  void reset(const State& x) {
    x_ = x;
    x_prev_ = x;
    t_prev_ = t_;
    k1_ = eval(x_);
  }

  /// One accepted step that does not pass t_end. Returns false at t_end.
  bool step(double t_end) {
    if (t_ >= t_end) return false;
    for (;;) {
      const double h = std::min(h_, t_end - t_);
      if (h < 1e-12 * std::max(1.0, std::abs(t_)))
        throw StepSizeUnderflow("step size underflow at t = " + std::to_string(t_));

      const State k2 = eval(x_ + h * (a21 * k1_));
      const State k3 = eval(x_ + h * (a31 * k1_ + a32 * k2));
      const State k4 = eval(x_ + h * (a41 * k1_ + a42 * k2 + a43 * k3));
      const State k5 = eval(x_ + h * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4));
      const State k6 = eval(x_ + h * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const State x_new = x_ + h * (b1 * k1_ + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const State k7 = eval(x_new);
      const State err = h * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double ratio = err.cwiseAbs().maxCoeff() / stats_.tol;

      if (ratio <= 1.0) {
        // Dense output coefficients.
        const State dx = x_new - x_;
        const State bspl = h * k1_ - dx;
        r1_ = x_;
        r2_ = dx;
        r3_ = bspl;
        r4_ = dx - h * k7 - bspl;
        r5_ = h * (d1 * k1_ + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        x_prev_ = x_;
        t_prev_ = t_;
        x_ = x_new;
        t_ += h;
        k1_ = k7;
        ++stats_.steps;
        const double fac = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
        if (h == h_ || fac < 1.0) h_ = h * fac;
        return true;
      }
      ++stats_.rejected;
      h_ = h * std::clamp(0.9 * std::pow(ratio, -0.2), 0.1, 1.0);
    }
  }

  /// Continuous extension on [t_prev, t].
  State dense(double t) const {
    if (t_ == t_prev_) return x_;
    const double s = (t - t_prev_) / (t_ - t_prev_);
    const double s1 = 1.0 - s;
    return r1_ + s * (r2_ + s1 * (r3_ + s * (r4_ + s1 * r5_)));
  }

 private:
  State eval(const State& x) {
    ++stats_.evaluations;
    return rhs_(x);
  }

  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                          a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                          a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                          b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
  static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  Rhs rhs_;
  double t_, t_prev_;
  double h_ = 0.0;
  State x_, x_prev_, k1_;
  State r1_, r2_, r3_, r4_, r5_;
  IntegratorStats stats_;
};

template <int Dim, typename Rhs>
auto make_integrator(Rhs rhs, const Eigen::Matrix<double, Dim, 1>& x0, double tol) {
  return DormandPrince<Dim, Rhs>(std::move(rhs), x0, 0.0, tol);
}

/// Wraps each component into [0, 2 pi).
Eigen::Vector3d wrap_torus(const Eigen::Vector3d& x);

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::Vector3d> points;  ///< wrapped into [0, 2 pi)^3
  Eigen::Vector3d final_state = Eigen::Vector3d::Zero();  ///< unwrapped lift at time T
  IntegratorStats stats;
};

/// Flow line of v from x0 over [0, T], one sample per accepted step.
Trajectory integrate(const VectorField& v, const Eigen::Vector3d& x0, double T, double tol);

/// Endpoint (unwrapped lift) of the flow at time T without storing samples.
Eigen::Vector3d flow_map(const VectorField& v, const Eigen::Vector3d& x0, double T, double tol);

struct SectionPlane {
  int axis = 2;
  double level = 1.5707963267948966;  ///< pi / 2
  int direction = +1;                  ///< sign of the crossing velocity component
};

struct PoincareSection {
  SectionPlane plane;
  std::vector<Eigen::Vector2d> points;  ///< the two remaining coordinates, wrapped
  std::vector<Eigen::Vector3d> states;  ///< full crossing states, wrapped
  std::vector<double> times;
  double max_level_residual = 0.0;      ///< worst |x_axis - level| at recorded crossings
  IntegratorStats stats;
};

/// First N crossings of the plane in the declared direction, located by
/// bisection on the dense output. Throws NoCrossings when none occur before
/// time_budget; returns the crossings found so far otherwise.
PoincareSection poincare(const VectorField& v, const SectionPlane& plane, const Eigen::Vector3d& x0, int N,
                         double tol = 1e-10, double time_budget = 1e5);

/// Fraction of occupied cells of a bins x bins partition of [0, 2 pi)^2.
double section_occupancy(const std::vector<Eigen::Vector2d>& points, int bins = 64);

struct LyapunovEstimate {
  double lambda_max = 0.0;
  std::vector<std::pair<double, double>> history;  ///< (t, running estimate)
  double renorm_interval = 0.0;
  double band = 0.0;  ///< spread of the running estimate over the last 10% of the history
  IntegratorStats stats;
};

/// Largest Lyapunov exponent by tangent-flow integration with periodic
/// renormalization. The Jacobian comes from exact spectral differentiation.
LyapunovEstimate lyapunov_max(const VectorField& v, const Eigen::Vector3d& x0, double T, double renorm,
                              double tol = 1e-9);

/// Fundamental matrix of the variational equation along the flow line.
Eigen::Matrix3d tangent_map(const VectorField& v, const Eigen::Vector3d& x0, double T, double tol);

/// det of the tangent map at time T, propagated with QR re-orthonormalization
/// every `renorm` time units so that chaotic stretching does not swamp it.
double tangent_determinant(const VectorField& v, const Eigen::Vector3d& x0, double T, double tol,
                           double renorm = 1.0);

struct FirstIntegralReport {
  double range_gap = 0.0;       ///< sup F - inf F on the grid
  double derivative_sup = 0.0;  ///< sup |grad F . v| on the grid
};

FirstIntegralReport first_integral_report(const VectorField& v, const ScalarField& F, int grid);

/// Uniform point of [0, 2 pi)^3 drawn from the counter-based stream.
Eigen::Vector3d torus_point(std::uint64_t seed, std::uint64_t index);

/// Standard seed `index` near the hyperbolic stagnation line x1 = 3 pi / 2,
/// x3 = 0 of H = cos x3 + B sin x1 (the H = B separatrix at C = 0):
/// offsets of at most 0.01 in x1 and x3, x2 uniform.
Eigen::Vector3d separatrix_seed(std::uint64_t index);

}  // namespace beltrami
