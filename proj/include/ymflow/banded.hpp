#pragma once

// General banded matrix in LAPACK band storage with an LU factorisation.

#include <cstddef>
#include <span>
#include <vector>

namespace ymflow {

class BandedMatrix {
 public:
  BandedMatrix(std::size_t n, int kl, int ku);

  std::size_t size() const { return n_; }
  int kl() const { return kl_; }
  int ku() const { return ku_; }

  /// Entry (i, j); must lie inside the band.
  double& at(std::size_t i, std::size_t j);
  double get(std::size_t i, std::size_t j) const;
  bool in_band(std::size_t i, std::size_t j) const;

  /// y = A x (before factorisation).
  void multiply(std::span<const double> x, std::span<double> y) const;

  /// LU with partial pivoting (dgbtrf). Throws AccuracyError on a zero pivot.
  void factor();
  bool factored() const { return factored_; }
  /// Solve in place (dgbtrs); requires factor().
  void solve(std::span<double> b) const;

 private:
  std::size_t n_;
  int kl_, ku_, ldab_;
  std::vector<double> ab_;
  std::vector<int> ipiv_;
  bool factored_ = false;
};

}  // namespace ymflow
