#pragma once

#include "beltrami/fourier_series.hpp"
#include "beltrami/grid_transform.hpp"
#include "beltrami/lattice.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <vector>

namespace beltrami {

struct ABCParams {
  double A = 1.0;
  double B = 1.0;
  double C = 1.0;
};

/// u_ABC = (A sin x3 + C cos x2, B sin x1 + A cos x3, C sin x2 + B cos x1).
VectorField make_abc(const ABCParams& p);

/// Flat-metric differential operators, applied mode by mode.
VectorField curl(const VectorField& v);
ScalarField divergence(const VectorField& v);
VectorField gradient(const ScalarField& f);
/// -Laplacian inverse restricted to zero-mean functions: c_k / |k|^2, mean dropped.
ScalarField inverse_neg_laplacian(const ScalarField& f);

/// Real L2 inner product normalized by the torus volume (mean of u.v).
double inner_product(const VectorField& a, const VectorField& b);

/// Real orthonormal eigenbasis of curl with eigenvalue sqrt(n). One pair of
/// fields per +-k pair of the shell, built from the positive-helicity frame.
/// Throws NoSuchEigenvalue for an empty shell.
std::vector<VectorField> helicity_basis(std::int64_t n);

/// Complex positive-helicity vector h(k) = (e1 + i e2) / sqrt(2) with
/// i k x h = |k| h; e1(-k) = e1(k) and h(-k) = conj(h(k)).
Vector3c helicity_vector(const WaveVector& k);

/// Gaussian combination of the helicity basis with unit expected squared L2 norm.
VectorField random_beltrami(std::int64_t n, std::uint64_t seed);

/// Pseudo-spectral products on an alias-free grid.
VectorField cross_product(const VectorField& a, const VectorField& b);
VectorField advection(const VectorField& v);  // (v . grad) v

/// Zero-mean F with Laplacian F = div(v x curl v).
ScalarField bernoulli(const VectorField& v);
/// Zero-mean p = -Laplacian^{-1} div((v . grad) v).
ScalarField pressure(const VectorField& v);

struct SteadyResidual {
  double euler = 0.0;      ///< ||(v . grad) v + grad p||
  double bernoulli = 0.0;  ///< ||v x curl v - grad F||
};
SteadyResidual steady_residual(const VectorField& v);

/// Pointwise scalar samples on a uniform grid.
struct ScalarGridReport {
  UniformGrid grid;
  Eigen::ArrayXd values;
  double min = 0.0;
  double max = 0.0;
  double gap() const { return max - min; }
};

/// f = (v . curl v) / |v|^2 on the grid. Throws VanishingField when
/// min |v| <= 1e-8 max |v|.
ScalarGridReport proportionality_factor(const VectorField& v, int grid);

/// Minimum of |v| over the grid followed by a local coordinate-descent
/// refinement around the grid minimizer.
double min_norm(const VectorField& v, int grid);

/// Exact trigonometric summation at arbitrary points (inputs wrapped mod 2 pi).
std::vector<Eigen::Vector3d> evaluate(const VectorField& v, const std::vector<Eigen::Vector3d>& points);

/// Grid samples of a vector field.
GridVector sample(const VectorField& v, int n);

/// Maximum coefficientwise |curl u - lambda u| over a family, with the curl
/// operator injectable for mutation checks.
using CurlOperator = std::function<VectorField(const VectorField&)>;
double eigen_residual(const std::vector<VectorField>& family, double lambda,
                      const CurlOperator& op = curl);
/// max |G - I| for the Gram matrix of the family.
double gram_deviation(const std::vector<VectorField>& family);

}  // namespace beltrami
