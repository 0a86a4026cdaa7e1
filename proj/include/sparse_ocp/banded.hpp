#pragma once

#include <span>
#include <vector>

namespace sparse_ocp {

/// Square banded matrix in LAPACK general-band layout, with room for the
/// fill-in produced by partial pivoting.
class BandedMatrix {
 public:
  BandedMatrix(int n, int lower, int upper);

  int size() const { return n_; }
  int lower() const { return kl_; }
  int upper() const { return ku_; }

  void add(int row, int col, double value) { ab_[index(row, col)] += value; }
  double get(int row, int col) const;

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// y = A^T x
  void multiply_transposed(std::span<const double> x, std::span<double> y) const;

 private:
  friend class BandedLU;
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(col) * ld_ + (kl_ + ku_ + row - col);
  }

  int n_, kl_, ku_, ld_;
  std::vector<double> ab_;
};

/// LU factorization with partial pivoting (dgbtrf); immutable once built, so
/// concurrent solves on one factorization are safe.
class BandedLU {
 public:
  explicit BandedLU(BandedMatrix matrix);

  /// Overwrites rhs with A^{-1} rhs, or A^{-T} rhs when transposed.
  void solve(std::span<double> rhs, bool transposed = false) const;

 private:
  BandedMatrix lu_;
  std::vector<int> pivots_;
};

}  // namespace sparse_ocp
