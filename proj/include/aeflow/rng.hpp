#pragma once

#include "aeflow/types.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

namespace aeflow {

/// SplitMix64: counter-based generator (output k depends only on seed and k),
/// identical streams on every platform. Used for all sampled oracles so that
/// failures reproduce from the seed recorded in the run manifest.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  std::complex<double> normal_complex() { return {normal(), normal()}; }

  /// Independent stream for worker i, derived from this seed.
  SplitMix64 stream(std::uint64_t i) const {
    SplitMix64 mix(state_ ^ (0xd1342543de82ef95ull * (i + 1)));
    mix.next_u64();
    return mix;
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

/// Ginibre matrix with i.i.d. standard complex normal entries.
inline ComplexMatrix ginibre(SplitMix64& rng, Index rows, Index cols) {
  ComplexMatrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = rng.normal_complex();
  return g;
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phase fix
/// Q <- Q diag(r_ii/|r_ii|).
inline ComplexMatrix haar_unitary(SplitMix64& rng, Index d) {
  const ComplexMatrix g = ginibre(rng, d, d);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < d; ++i) {
    const std::complex<double> rii = r(i, i);
    const double a = std::abs(rii);
    q.col(i) *= (a > 0.0) ? rii / a : std::complex<double>(1.0, 0.0);
  }
  return q;
}

/// Hilbert-Schmidt random state of rank k (full rank by default).
inline DensityMatrix random_density_matrix(SplitMix64& rng, Index d, Index rank = 0) {
  if (rank <= 0) rank = d;
  const ComplexMatrix g = ginibre(rng, d, rank);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace();
  rho = (rho + ComplexMatrix(rho.adjoint())) / 2.0;
  return DensityMatrix(std::move(rho));
}

}  // namespace aeflow
