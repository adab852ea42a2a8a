#include "beltrami/grid_transform.hpp"

#include <unsupported/Eigen/FFT>

#include <numbers>
#include <stdexcept>
#include <vector>

namespace beltrami {
namespace {

int wrap_index(int k, int n) { return ((k % n) + n) % n; }

// In-place unscaled 3D DFT along all axes. sign = -1 forward, +1 inverse.
void dft3(Eigen::ArrayXcd& data, int n, int sign) {
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  std::vector<Complex> line(n), out(n);
  const std::size_t strides[3] = {std::size_t(n) * n, std::size_t(n), 1};
  for (int axis = 0; axis < 3; ++axis) {
    const std::size_t stride = strides[axis];
    const std::size_t o1 = strides[(axis + 1) % 3];
    const std::size_t o2 = strides[(axis + 2) % 3];
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const std::size_t base = a * o1 + b * o2;
        for (int j = 0; j < n; ++j) line[j] = data[base + j * stride];
        if (sign < 0)
          fft.fwd(out, line);
        else
          fft.inv(out, line);
        for (int j = 0; j < n; ++j) data[base + j * stride] = out[j];
      }
  }
}

}  // namespace

double UniformGrid::spacing() const { return 2.0 * std::numbers::pi / n; }

Eigen::Vector3d UniformGrid::point(std::size_t idx) const {
  const std::size_t i3 = idx % n;
  const std::size_t i2 = (idx / n) % n;
  const std::size_t i1 = idx / (std::size_t(n) * n);
  const double h = spacing();
  return {h * double(i1), h * double(i2), h * double(i3)};
}

Eigen::ArrayXd to_grid(const ScalarField& f, int n) {
  if (n < 1) throw std::invalid_argument("to_grid: empty grid");
  Eigen::ArrayXcd data = Eigen::ArrayXcd::Zero(std::size_t(n) * n * n);
  const UniformGrid grid{n};
  for (const auto& [k, c] : f.modes())
    data[grid.index(wrap_index(k.x, n), wrap_index(k.y, n), wrap_index(k.z, n))] += c;
  dft3(data, n, +1);
  return data.real();
}

GridVector to_grid(const VectorField& v, int n) {
  return {to_grid(component(v, 0), n), to_grid(component(v, 1), n), to_grid(component(v, 2), n)};
}

Eigen::ArrayXcd grid_coefficients(const Eigen::ArrayXd& values, int n) {
  const UniformGrid grid{n};
  if (std::size_t(values.size()) != grid.size()) throw std::invalid_argument("grid size mismatch");
  Eigen::ArrayXcd data = values.cast<Complex>();
  dft3(data, n, -1);
  data /= double(grid.size());
  return data;
}

ScalarField from_grid(const Eigen::ArrayXd& values, int n, int truncation) {
  if (2 * truncation >= n) throw std::invalid_argument("from_grid: truncation at or above Nyquist");
  const Eigen::ArrayXcd coeffs = grid_coefficients(values, n);
  const UniformGrid grid{n};
  ScalarField f(truncation);
  for (int a = -truncation; a <= truncation; ++a)
    for (int b = -truncation; b <= truncation; ++b)
      for (int c = -truncation; c <= truncation; ++c) {
        const WaveVector k{a, b, c};
        if (!k.is_canonical()) continue;
        Complex ck = coeffs[grid.index(wrap_index(a, n), wrap_index(b, n), wrap_index(c, n))];
        if (k.is_zero()) ck = ck.real();
        f.add_real_mode(k, ck);
      }
  return f;
}

VectorField from_grid(const GridVector& values, int n, int truncation) {
  return from_components(from_grid(values[0], n, truncation), from_grid(values[1], n, truncation),
                         from_grid(values[2], n, truncation));
}

int product_grid_size(int truncation_a, int truncation_b) {
  const int n = 2 * (truncation_a + truncation_b) + 1;
  return n % 2 == 0 ? n : n + 1;
}

}  // namespace beltrami
