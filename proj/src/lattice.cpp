#include "beltrami/lattice.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace beltrami {

int WaveVector::sup_norm() const {
  return std::max({std::abs(x), std::abs(y), std::abs(z)});
}

bool WaveVector::is_canonical() const {
  if (x != 0) return x > 0;
  if (y != 0) return y > 0;
  return z >= 0;
}

std::vector<WaveVector> EigenShell::canonical() const {
  std::vector<WaveVector> reps;
  for (const auto& k : vectors)
    if (k.is_canonical()) reps.push_back(k);
  return reps;
}

EigenShell lattice_shell(std::int64_t n) {
  if (n < 0) throw std::invalid_argument("lattice_shell: n must be nonnegative");
  EigenShell shell;
  shell.n = n;
  auto r = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  while (std::int64_t{r} * r < n) ++r;
  // Loop order yields lexicographic output directly.
  for (int a = -r; a <= r; ++a)
    for (int b = -r; b <= r; ++b)
      for (int c = -r; c <= r; ++c) {
        WaveVector k{a, b, c};
        if (k.norm2() == n) shell.vectors.push_back(k);
      }
  return shell;
}

bool admissible_mod8(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("admissible_mod8: n must be positive");
  switch (n % 8) {
    case 1: case 2: case 3: case 5: case 6: return true;
    default: return false;
  }
}

AdmissibilityReport admissibility(std::int64_t n) {
  AdmissibilityReport r;
  r.n = n;
  r.admissible_mod8 = admissible_mod8(n);
  const auto shell = lattice_shell(n);
  r.shell_nonempty = !shell.empty();
  r.multiplicity = shell.multiplicity();
  return r;
}

}  // namespace beltrami
