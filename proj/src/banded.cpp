#include "sparse_ocp/banded.hpp"

#include <lapacke.h>

#include <algorithm>
#include <string>

#include "sparse_ocp/error.hpp"

namespace sparse_ocp {

BandedMatrix::BandedMatrix(int n, int lower, int upper)
    : n_(n), kl_(lower), ku_(upper), ld_(2 * lower + upper + 1),
      ab_(static_cast<std::size_t>(ld_) * n, 0.0) {}

double BandedMatrix::get(int row, int col) const {
  if (row - col > kl_ || col - row > ku_) return 0.0;
  return ab_[index(row, col)];
}

void BandedMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    const int lo = std::max(0, i - kl_), hi = std::min(n_ - 1, i + ku_);
    for (int j = lo; j <= hi; ++j) s += ab_[index(i, j)] * x[j];
    y[i] = s;
  }
}

void BandedMatrix::multiply_transposed(std::span<const double> x, std::span<double> y) const {
  for (int j = 0; j < n_; ++j) {
    double s = 0.0;
    const int lo = std::max(0, j - ku_), hi = std::min(n_ - 1, j + kl_);
    for (int i = lo; i <= hi; ++i) s += ab_[index(i, j)] * x[i];
    y[j] = s;
  }
}

BandedLU::BandedLU(BandedMatrix matrix) : lu_(std::move(matrix)), pivots_(lu_.n_) {
  const lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, lu_.n_, lu_.n_, lu_.kl_, lu_.ku_,
                                         lu_.ab_.data(), lu_.ld_, pivots_.data());
  if (info > 0) throw SingularMatrix("banded LU: zero pivot at row " + std::to_string(info));
  if (info < 0) throw SingularMatrix("banded LU: invalid argument " + std::to_string(-info));
}

void BandedLU::solve(std::span<double> rhs, bool transposed) const {
  // dgbtrs does not modify the factors; the const_cast only satisfies the C API.
  const lapack_int info =
      LAPACKE_dgbtrs(LAPACK_COL_MAJOR, transposed ? 'T' : 'N', lu_.n_, lu_.kl_, lu_.ku_, 1,
                     const_cast<double*>(lu_.ab_.data()), lu_.ld_,
                     const_cast<int*>(pivots_.data()), rhs.data(), lu_.n_);
  if (info != 0) throw SingularMatrix("banded solve failed");
}

}  // namespace sparse_ocp
