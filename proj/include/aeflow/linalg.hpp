#pragma once

#include "aeflow/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace aeflow {

/// Kronecker product with subsystem-A-major indexing: composite (i,j) -> i*d_B + j.
inline ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = 0; k < a.cols(); ++k)
      out.block(i * b.rows(), k * b.cols(), b.rows(), b.cols()) = a(i, k) * b;
  return out;
}

inline ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b,
                                    const ComplexMatrix& c) {
  return tensor_product(tensor_product(a, b), c);
}

inline ComplexMatrix identity(Index d) { return ComplexMatrix::Identity(d, d); }

namespace detail {

inline void check_dims(const ComplexMatrix& m, const std::vector<Index>& dims) {
  const Index total = std::accumulate(dims.begin(), dims.end(), Index{1},
                                      [](Index a, Index b) { return a * b; });
  if (!is_square(m) || m.rows() != total)
    throw DomainError("partial_trace: dimension product does not match matrix");
}

}  // namespace detail

/// Partial trace keeping the subsystems listed in `keep` (indices into `dims`),
/// in their original order. The trace of the input is preserved.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<Index>& dims,
                                   std::vector<Index> keep) {
  detail::check_dims(m, dims);
  std::sort(keep.begin(), keep.end());
  const Index n = static_cast<Index>(dims.size());
  for (Index k : keep)
    if (k < 0 || k >= n) throw DomainError("partial_trace: keep index out of range");

  std::vector<Index> traced;
  for (Index s = 0; s < n; ++s)
    if (!std::binary_search(keep.begin(), keep.end(), s)) traced.push_back(s);

  // Stride of subsystem s in the composite (A-major) index.
  std::vector<Index> stride(n, 1);
  for (Index s = n - 2; s >= 0; --s) stride[s] = stride[s + 1] * dims[s + 1];

  Index dk = 1;
  for (Index s : keep) dk *= dims[s];
  Index dt = 1;
  for (Index s : traced) dt *= dims[s];

  // Composite offsets for every kept and traced multi-index.
  auto offsets = [&](const std::vector<Index>& subs, Index count) {
    std::vector<Index> offs(count, 0);
    for (Index v = 0; v < count; ++v) {
      Index rem = v;
      for (Index si = static_cast<Index>(subs.size()) - 1; si >= 0; --si) {
        const Index s = subs[si];
        offs[v] += (rem % dims[s]) * stride[s];
        rem /= dims[s];
      }
    }
    return offs;
  };
  const std::vector<Index> keep_off = offsets(keep, dk);
  const std::vector<Index> trace_off = offsets(traced, dt);

  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (Index r = 0; r < dk; ++r)
    for (Index c = 0; c < dk; ++c)
      for (Index t = 0; t < dt; ++t)
        out(r, c) += m(keep_off[r] + trace_off[t], keep_off[c] + trace_off[t]);
  return out;
}

struct EigenSystem {
  RealVector eigenvalues;   // ascending
  ComplexMatrix eigenvectors;  // orthonormal columns
};

/// Hermitian eigendecomposition, eigenvalues ascending.
inline EigenSystem eig_hermitian(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix());
  if (es.info() != Eigen::Success)
    throw NumericalError("eig_hermitian: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

inline EigenSystem eig_hermitian(const ComplexMatrix& m) {
  return eig_hermitian(HermitianOperator(m));
}

/// U = exp(-i H t) with hbar = 1, computed spectrally.
inline UnitaryOperator propagator(const HermitianOperator& h, double t) {
  const EigenSystem es = eig_hermitian(h);
  ComplexVector phases(es.eigenvalues.size());
  for (Index i = 0; i < phases.size(); ++i)
    phases(i) = std::exp(std::complex<double>(0.0, -es.eigenvalues(i) * t));
  ComplexMatrix u = es.eigenvectors * phases.asDiagonal() * es.eigenvectors.adjoint();
  return UnitaryOperator(std::move(u));
}

/// (1/2) sum of singular values of a - b; for Hermitian difference this is
/// half the sum of absolute eigenvalues.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw DomainError("trace_distance: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.matrix() - b.matrix(),
                                                  Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline double trace_distance_raw(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix d = a - b;
  d = (d + d.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(d, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline double real_trace(const ComplexMatrix& m) { return m.trace().real(); }

/// Tr[obs * state], real part (observable assumed Hermitian).
inline double expectation(const ComplexMatrix& obs, const ComplexMatrix& state) {
  return (obs * state).trace().real();
}

inline ComplexMatrix conjugate_by(const ComplexMatrix& u, const ComplexMatrix& m) {
  return u * m * u.adjoint();
}

}  // namespace aeflow
