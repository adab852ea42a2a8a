#pragma once

#include "beltrami/fourier_series.hpp"

#include <Eigen/Core>

#include <array>

namespace beltrami {

/// Uniform periodic grid with n nodes per axis at x_j = 2 pi j / n. Values are
/// stored flat with the x1 index slowest: idx = (i1 * n + i2) * n + i3.
struct UniformGrid {
  int n = 0;

  std::size_t size() const { return std::size_t(n) * n * n; }
  double spacing() const;
  Eigen::Vector3d point(std::size_t idx) const;
  std::size_t index(int i1, int i2, int i3) const {
    return (std::size_t(i1) * n + i2) * n + i3;
  }
};

using GridVector = std::array<Eigen::ArrayXd, 3>;

/// Samples a series on the grid by inverse FFT. Modes above the Nyquist
/// index fold onto their aliases, which agree with them at the nodes.
Eigen::ArrayXd to_grid(const ScalarField& f, int n);
GridVector to_grid(const VectorField& v, int n);

/// Fourier coefficients of grid samples, keeping modes with |k|_inf <= truncation.
/// Requires 2 * truncation < n.
ScalarField from_grid(const Eigen::ArrayXd& values, int n, int truncation);
VectorField from_grid(const GridVector& values, int n, int truncation);

/// Raw DFT coefficients mean(f exp(-i k.x)) on the full n^3 index cube.
Eigen::ArrayXcd grid_coefficients(const Eigen::ArrayXd& values, int n);

/// Smallest even node count that represents the exact product of two series
/// with the given truncation radii without aliasing.
int product_grid_size(int truncation_a, int truncation_b);

}  // namespace beltrami
