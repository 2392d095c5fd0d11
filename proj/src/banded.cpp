#include "ymflow/banded.hpp"

#include <lapacke.h>

#include <algorithm>
#include <string>

#include "ymflow/errors.hpp"

namespace ymflow {

static_assert(sizeof(lapack_int) == sizeof(int), "banded wrapper assumes 32-bit LAPACK integers");

BandedMatrix::BandedMatrix(std::size_t n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1), ab_(static_cast<std::size_t>(ldab_) * n, 0.0) {}

bool BandedMatrix::in_band(std::size_t i, std::size_t j) const {
  const long d = static_cast<long>(j) - static_cast<long>(i);
  return d <= ku_ && -d <= kl_ && i < n_ && j < n_;
}

// Column-major band storage with kl extra rows for the fill-in of the LU.
double& BandedMatrix::at(std::size_t i, std::size_t j) {
  if (!in_band(i, j)) throw DomainError("banded entry outside the band");
  factored_ = false;
  return ab_[j * ldab_ + static_cast<std::size_t>(kl_ + ku_) + i - j];
}

double BandedMatrix::get(std::size_t i, std::size_t j) const {
  if (!in_band(i, j)) return 0.0;
  return ab_[j * ldab_ + static_cast<std::size_t>(kl_ + ku_) + i - j];
}

void BandedMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (factored_) throw DomainError("multiply after factorisation");
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i > static_cast<std::size_t>(kl_) ? i - kl_ : 0;
    const std::size_t j1 = std::min(n_ - 1, i + ku_);
    double s = 0.0;
    for (std::size_t j = j0; j <= j1; ++j) s += get(i, j) * x[j];
    y[i] = s;
  }
}

void BandedMatrix::factor() {
  ipiv_.assign(n_, 0);
  const lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, static_cast<lapack_int>(n_), static_cast<lapack_int>(n_),
                                         kl_, ku_, ab_.data(), ldab_, ipiv_.data());
  if (info != 0) throw AccuracyError("banded LU failed (info " + std::to_string(info) + ")");
  factored_ = true;
}

void BandedMatrix::solve(std::span<double> b) const {
  if (!factored_) throw DomainError("banded solve before factorisation");
  const lapack_int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', static_cast<lapack_int>(n_), kl_, ku_, 1,
                                         ab_.data(), ldab_, ipiv_.data(), b.data(), static_cast<lapack_int>(n_));
  if (info != 0) throw AccuracyError("banded solve failed (info " + std::to_string(info) + ")");
}

}  // namespace ymflow
