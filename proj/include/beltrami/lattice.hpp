#pragma once

#include <Eigen/Core>

#include <compare>
#include <cstdint>
#include <vector>

namespace beltrami {

/// Integer wave vector k in Z^3. Ordering is lexicographic in (x, y, z).
struct WaveVector {
  int x = 0;
  int y = 0;
  int z = 0;

  auto operator<=>(const WaveVector&) const = default;

  WaveVector operator-() const { return {-x, -y, -z}; }
  WaveVector operator+(const WaveVector& o) const { return {x + o.x, y + o.y, z + o.z}; }
  WaveVector operator-(const WaveVector& o) const { return {x - o.x, y - o.y, z - o.z}; }

  int operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  std::int64_t norm2() const {
    return std::int64_t{x} * x + std::int64_t{y} * y + std::int64_t{z} * z;
  }
  int sup_norm() const;
  bool is_zero() const { return x == 0 && y == 0 && z == 0; }

  /// True when k is the representative of the pair {k, -k}: its first
  /// nonzero component is positive. The zero vector is canonical.
  bool is_canonical() const;

  Eigen::Vector3d as_vector() const { return {double(x), double(y), double(z)}; }
};

/// All k with |k|^2 = n, sorted lexicographically.
struct EigenShell {
  std::int64_t n = 0;
  std::vector<WaveVector> vectors;

  std::size_t multiplicity() const { return vectors.size(); }
  bool empty() const { return vectors.empty(); }
  /// Canonical representatives, one per +-k pair, ascending.
  std::vector<WaveVector> canonical() const;
};

EigenShell lattice_shell(std::int64_t n);

/// Residue rule for admissible curl eigenvalues sqrt(n): n mod 8 in {1,2,3,5,6}.
bool admissible_mod8(std::int64_t n);

/// Both admissibility predicates side by side; they disagree on n = 0, 4 mod 8.
struct AdmissibilityReport {
  std::int64_t n = 0;
  bool admissible_mod8 = false;
  bool shell_nonempty = false;
  std::size_t multiplicity = 0;
  bool predicates_agree() const { return admissible_mod8 == shell_nonempty; }
};

AdmissibilityReport admissibility(std::int64_t n);

}  // namespace beltrami
