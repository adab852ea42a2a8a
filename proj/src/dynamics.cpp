#include "beltrami/dynamics.hpp"

#include "beltrami/rng.hpp"
#include "beltrami/spectral.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <cmath>
#include <numbers>

namespace beltrami {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

FieldEvaluator::FieldEvaluator(const VectorField& v) {
  std::vector<std::pair<WaveVector, Vector3c>> modes;
  for (const auto& [k, c] : v.modes()) {
    if (k.is_zero())
      constant_ = c.real();
    else if (k.is_canonical())
      modes.emplace_back(k, c);
  }
  const auto n = Eigen::Index(modes.size());
  waves_.resize(3, n);
  cos_amp_.resize(3, n);
  sin_amp_.resize(3, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    waves_.col(j) = modes[std::size_t(j)].first.as_vector();
    // 2 Re(c e^{i phase}) = 2 Re c cos(phase) - 2 Im c sin(phase)
    cos_amp_.col(j) = 2.0 * modes[std::size_t(j)].second.real();
    sin_amp_.col(j) = -2.0 * modes[std::size_t(j)].second.imag();
  }
}

Eigen::Vector3d FieldEvaluator::value(const Eigen::Vector3d& x) const {
  Eigen::Vector3d out = constant_;
  for (Eigen::Index j = 0; j < waves_.cols(); ++j) {
    const double phase = waves_.col(j).dot(x);
    out += std::cos(phase) * cos_amp_.col(j) + std::sin(phase) * sin_amp_.col(j);
  }
  return out;
}

Eigen::Matrix3d FieldEvaluator::jacobian(const Eigen::Vector3d& x) const {
  Eigen::Vector3d v;
  Eigen::Matrix3d j;
  value_and_jacobian(x, v, j);
  return j;
}

void FieldEvaluator::value_and_jacobian(const Eigen::Vector3d& x, Eigen::Vector3d& value,
                                        Eigen::Matrix3d& jac) const {
  value = constant_;
  jac.setZero();
  for (Eigen::Index j = 0; j < waves_.cols(); ++j) {
    const double phase = waves_.col(j).dot(x);
    const double c = std::cos(phase), s = std::sin(phase);
    value += c * cos_amp_.col(j) + s * sin_amp_.col(j);
    jac += (c * sin_amp_.col(j) - s * cos_amp_.col(j)) * waves_.col(j).transpose();
  }
}

Eigen::Vector3d wrap_torus(const Eigen::Vector3d& x) {
  Eigen::Vector3d w;
  for (int i = 0; i < 3; ++i) {
    w[i] = x[i] - kTwoPi * std::floor(x[i] / kTwoPi);
    if (w[i] >= kTwoPi) w[i] = 0.0;
  }
  return w;
}

namespace {

void check_horizon(double T, double tol) {
  if (!(T > 0.0)) throw std::invalid_argument("integration time must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
}

}  // namespace

Trajectory integrate(const VectorField& v, const Eigen::Vector3d& x0, double T, double tol) {
  check_horizon(T, tol);
  const FieldEvaluator field(v);
  auto rk = make_integrator<3>([&field](const Eigen::Vector3d& x) { return field.value(x); }, x0, tol);
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.points.push_back(wrap_torus(x0));
  while (rk.step(T)) {
    traj.times.push_back(rk.t());
    traj.points.push_back(wrap_torus(rk.x()));
  }
  traj.final_state = rk.x();
  traj.stats = rk.stats();
  return traj;
}

Eigen::Vector3d flow_map(const VectorField& v, const Eigen::Vector3d& x0, double T, double tol) {
  check_horizon(T, tol);
  const FieldEvaluator field(v);
  auto rk = make_integrator<3>([&field](const Eigen::Vector3d& x) { return field.value(x); }, x0, tol);
  while (rk.step(T)) {
  }
  return rk.x();
}

PoincareSection poincare(const VectorField& v, const SectionPlane& plane, const Eigen::Vector3d& x0, int N,
                         double tol, double time_budget) {
  if (N < 1) throw std::invalid_argument("poincare: N must be at least 1");
  if (plane.axis < 0 || plane.axis > 2) throw std::invalid_argument("poincare: axis must be 0, 1 or 2");
  if (plane.direction != 1 && plane.direction != -1)
    throw std::invalid_argument("poincare: direction must be +1 or -1");
  check_horizon(time_budget, tol);

  const FieldEvaluator field(v);
  auto rk = make_integrator<3>([&field](const Eigen::Vector3d& x) { return field.value(x); }, x0, tol);
  const int a = plane.axis;
  const int o1 = a == 0 ? 1 : 0;
  const int o2 = a == 2 ? 1 : 2;

  PoincareSection sec;
  sec.plane = plane;
  // Crossing index of the lift: levels sit at c + 2 pi m.
  auto sheet = [&](double s) { return std::floor((s - plane.level) / kTwoPi); };

  while (int(sec.points.size()) < N && rk.step(time_budget)) {
    const double s_prev = rk.dense(rk.t_prev())[a];
    const double s_now = rk.x()[a];
    const double m_prev = sheet(s_prev), m_now = sheet(s_now);
    if (m_prev == m_now) continue;
    const int dir = s_now > s_prev ? 1 : -1;
    if (dir != plane.direction) continue;

    // Levels strictly crossed in this step, in time order.
    const double first = dir > 0 ? m_prev + 1 : m_prev;
    const double count = std::abs(m_now - m_prev);
    for (int c = 0; c < int(count) && int(sec.points.size()) < N; ++c) {
      const double target = plane.level + kTwoPi * (first + dir * c);
      double lo = rk.t_prev(), hi = rk.t();
      double g_lo = rk.dense(lo)[a] - target;
      Eigen::Vector3d state = rk.x();
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        state = rk.dense(mid);
        const double g = state[a] - target;
        if (std::abs(g) <= 1e-14 * std::max(1.0, std::abs(target)) || hi - lo <= 1e-15 * std::max(1.0, mid))
          break;
        if ((g < 0.0) == (g_lo < 0.0)) {
          lo = mid;
          g_lo = g;
        } else {
          hi = mid;
        }
      }
      const double t_cross = 0.5 * (lo + hi);
      state = rk.dense(t_cross);
      if (field.value(state)[a] * plane.direction <= 0.0) continue;
      sec.max_level_residual = std::max(sec.max_level_residual, std::abs(state[a] - target));
      const Eigen::Vector3d w = wrap_torus(state);
      sec.times.push_back(t_cross);
      sec.states.push_back(w);
      sec.points.emplace_back(w[o1], w[o2]);
    }
  }
  sec.stats = rk.stats();
  if (sec.points.empty())
    throw NoCrossings("no crossing of x" + std::to_string(a + 1) + " = " + std::to_string(plane.level) +
                      " within time " + std::to_string(time_budget));
  return sec;
}

double section_occupancy(const std::vector<Eigen::Vector2d>& points, int bins) {
  if (bins < 1) throw std::invalid_argument("section_occupancy: bins must be positive");
  std::vector<char> hit(std::size_t(bins) * std::size_t(bins), 0);
  for (const auto& p : points) {
    auto cell = [bins](double s) {
      const double w = s - kTwoPi * std::floor(s / kTwoPi);
      return std::min(bins - 1, int(w / kTwoPi * bins));
    };
    hit[std::size_t(cell(p[0])) * std::size_t(bins) + std::size_t(cell(p[1]))] = 1;
  }
  std::size_t n = 0;
  for (char h : hit) n += std::size_t(h);
  return double(n) / double(hit.size());
}

LyapunovEstimate lyapunov_max(const VectorField& v, const Eigen::Vector3d& x0, double T, double renorm,
                              double tol) {
  check_horizon(T, tol);
  if (!(renorm > 0.0) || renorm >= T) throw std::invalid_argument("lyapunov_max: need 0 < renorm < T");

  using State = Eigen::Matrix<double, 6, 1>;
  const FieldEvaluator field(v);
  auto rhs = [&field](const State& y) {
    Eigen::Vector3d val;
    Eigen::Matrix3d jac;
    field.value_and_jacobian(y.head<3>(), val, jac);
    State out;
    out.head<3>() = val;
    out.tail<3>() = jac * y.tail<3>();
    return out;
  };
  State y0;
  y0.head<3>() = x0;
  y0.tail<3>() = Eigen::Vector3d::Ones().normalized();
  auto rk = make_integrator<6>(rhs, y0, tol);

  LyapunovEstimate est;
  est.renorm_interval = renorm;
  double log_sum = 0.0;
  const auto intervals = long(std::floor(T / renorm + 1e-9));
  for (long i = 1; i <= intervals; ++i) {
    const double t_end = double(i) * renorm;
    while (rk.step(t_end)) {
    }
    State y = rk.x();
    const double stretch = y.tail<3>().norm();
    log_sum += std::log(stretch);
    y.tail<3>() /= stretch;
    rk.reset(y);
    est.history.emplace_back(t_end, log_sum / t_end);
  }
  est.lambda_max = est.history.back().second;
  const std::size_t tail = std::max<std::size_t>(1, est.history.size() / 10);
  double lo = est.lambda_max, hi = est.lambda_max;
  for (std::size_t i = est.history.size() - tail; i < est.history.size(); ++i) {
    lo = std::min(lo, est.history[i].second);
    hi = std::max(hi, est.history[i].second);
  }
  est.band = hi - lo;
  est.stats = rk.stats();
  return est;
}

namespace {

auto variational_rhs(const FieldEvaluator& field) {
  return [&field](const Eigen::Matrix<double, 12, 1>& y) {
    Eigen::Vector3d val;
    Eigen::Matrix3d jac;
    field.value_and_jacobian(y.head<3>(), val, jac);
    Eigen::Matrix<double, 12, 1> out;
    out.head<3>() = val;
    Eigen::Map<const Eigen::Matrix3d> phi(y.data() + 3);
    Eigen::Map<Eigen::Matrix3d>(out.data() + 3) = jac * phi;
    return out;
  };
}

Eigen::Matrix<double, 12, 1> variational_start(const Eigen::Vector3d& x0) {
  Eigen::Matrix<double, 12, 1> y;
  y.head<3>() = x0;
  Eigen::Map<Eigen::Matrix3d>(y.data() + 3) = Eigen::Matrix3d::Identity();
  return y;
}

}  // namespace

Eigen::Matrix3d tangent_map(const VectorField& v, const Eigen::Vector3d& x0, double T, double tol) {
  check_horizon(T, tol);
  const FieldEvaluator field(v);
  auto rk = make_integrator<12>(variational_rhs(field), variational_start(x0), tol);
  while (rk.step(T)) {
  }
  return Eigen::Map<const Eigen::Matrix3d>(rk.x().data() + 3);
}

double tangent_determinant(const VectorField& v, const Eigen::Vector3d& x0, double T, double tol,
                           double renorm) {
  check_horizon(T, tol);
  if (!(renorm > 0.0)) throw std::invalid_argument("tangent_determinant: renorm must be positive");
  const FieldEvaluator field(v);
  auto rk = make_integrator<12>(variational_rhs(field), variational_start(x0), tol);
  // Phi(T) = Q_n R_n ... R_1, so det = det(Q_n) prod det(R_k).
  double log_det = 0.0, sign = 1.0;
  for (long i = 1;; ++i) {
    const double t_end = std::min(T, double(i) * renorm);
    while (rk.step(t_end)) {
    }
    Eigen::Matrix<double, 12, 1> y = rk.x();
    Eigen::Map<Eigen::Matrix3d> phi(y.data() + 3);
    const Eigen::HouseholderQR<Eigen::Matrix3d> qr(phi);
    const Eigen::Vector3d r = qr.matrixQR().diagonal();
    log_det += r.cwiseAbs().array().log().sum();
    if (r.prod() < 0.0) sign = -sign;
    phi = qr.householderQ();
    if (t_end >= T) return sign * phi.determinant() * std::exp(log_det);
    rk.reset(y);
  }
}

FirstIntegralReport first_integral_report(const VectorField& v, const ScalarField& F, int grid) {
  if (grid < 1) throw std::invalid_argument("first_integral_report: grid must be positive");
  FirstIntegralReport r;
  const GridVector gv = sample(v, grid);
  const GridVector gf = sample(gradient(F), grid);
  const Eigen::ArrayXd f = to_grid(F, grid);
  r.range_gap = f.maxCoeff() - f.minCoeff();
  r.derivative_sup = (gv[0] * gf[0] + gv[1] * gf[1] + gv[2] * gf[2]).abs().maxCoeff();
  return r;
}

Eigen::Vector3d torus_point(std::uint64_t seed, std::uint64_t index) {
  Eigen::Vector3d x;
  for (int i = 0; i < 3; ++i) x[i] = kTwoPi * counter_uniform(seed, 3 * index + std::uint64_t(i));
  return x;
}

Eigen::Vector3d separatrix_seed(std::uint64_t index) {
  constexpr std::uint64_t stream = 0x5E9A2A7E;
  const Eigen::Vector3d u = torus_point(stream, index) / kTwoPi;
  return {1.5 * std::numbers::pi + 0.02 * (u[0] - 0.5), kTwoPi * u[1], 0.02 * (u[2] - 0.5)};
}

}  // namespace beltrami
