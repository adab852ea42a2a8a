// One-off long-run oracle for the chaos threshold. Prints the per-seed
// estimates and theta = half the median positive estimate.
#include "beltrami/dynamics.hpp"
#include "beltrami/spectral.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <vector>

int main(int argc, char** argv) {
  using namespace beltrami;
  const double T = argc > 1 ? std::atof(argv[1]) : 1e5;
  const int seeds = argc > 2 ? std::atoi(argv[2]) : 20;
  const VectorField v = make_abc({1.0, 0.5, 0.1});

  std::vector<double> positive;
  for (int i = 0; i < seeds; ++i) {
    const LyapunovEstimate est = lyapunov_max(v, separatrix_seed(std::uint64_t(i)), T, 1.0, 1e-9);
    std::printf("seed %2d  lambda_max %.6f  band %.2e\n", i, est.lambda_max, est.band);
    if (est.lambda_max > 0.0) positive.push_back(est.lambda_max);
  }
  if (positive.empty()) {
    std::puts("no positive estimate");
    return 1;
  }
  std::sort(positive.begin(), positive.end());
  const std::size_t m = positive.size();
  const double median = m % 2 ? positive[m / 2] : 0.5 * (positive[m / 2 - 1] + positive[m / 2]);
  std::printf("T %.0f  seeds %d  median %.6f  theta %.6f\n", T, seeds, median, 0.5 * median);
  return 0;
}
