#pragma once

#include "aeflow/entropy.hpp"
#include "aeflow/linalg.hpp"
#include "aeflow/model.hpp"
#include "aeflow/types.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace aeflow {

/// Projection onto the block-diagonal part: sum_nu P_nu rho P_nu. Coherences
/// between distinct energy eigenspaces are erased; trace and positivity are
/// preserved.
inline DensityMatrix block_dephase(const DensityMatrix& rho, const BlockStructure& blocks) {
  if (rho.dim() != blocks.dim) throw DomainError("block_dephase: dimension mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(rho.dim(), rho.dim());
  for (const EnergyBlock& block : blocks.blocks) {
    const ComplexMatrix coeff = block.basis.adjoint() * rho.matrix() * block.basis;
    out += block.basis * coeff * block.basis.adjoint();
  }
  out = (out + ComplexMatrix(out.adjoint())) / 2.0;
  return DensityMatrix(std::move(out));
}

/// How one block's descending populations were assigned to its basis vectors.
struct BlockAssignment {
  double energy = 0.0;
  RealVector populations;              // descending
  RealVector target_a_energies;       // ascending, paired with populations
  std::vector<Index> target_sources;  // basis index receiving each population
};

struct OptimalFlowResult {
  double delta_e_a = 0.0;
  UnitaryOperator unitary;
  DensityMatrix sigma_a;      // final marginal on A
  RealVector occupations;     // q over A's energy eigenbasis (ascending energies)
  std::vector<BlockAssignment> assignments;
};

namespace detail {

inline void check_bipartite(const CompositeSystem& system) {
  if (system.subsystem_count() != 2)
    throw DomainError("optimal flow: bipartite system required");
}

/// Occupation weights of |v> on A's energy levels: w_i = sum_j |<eps_i, j|v>|^2.
inline RealVector a_level_weights(const ComplexVector& v, const ComplexMatrix& a_basis,
                                  Index d_a, Index d_b) {
  RealVector w = RealVector::Zero(d_a);
  for (Index i = 0; i < d_a; ++i) {
    for (Index j = 0; j < d_b; ++j) {
      std::complex<double> amp = 0.0;
      for (Index k = 0; k < d_a; ++k) amp += std::conj(a_basis(k, i)) * v(k * d_b + j);
      w(i) += std::norm(amp);
    }
  }
  return w;
}

}  // namespace detail

/// Optimal local energy change on A over energy-preserving unitaries.
/// Within each degenerate block the populations are diagonalized and the
/// descending eigenvalues are paired with the block basis in ascending
/// local-A energy, so the largest population lands on the lowest A level.
inline OptimalFlowResult optimal_energy_preserving(const DensityMatrix& rho,
                                                   const CompositeSystem& system,
                                                   const BlockStructure& blocks) {
  detail::check_bipartite(system);
  if (rho.dim() != system.dim() || blocks.dim != system.dim())
    throw DomainError("optimal_energy_preserving: dimension mismatch");

  const Index d_a = system.local_dim(0);
  const Index d_b = system.local_dim(1);
  const EigenSystem es_a = eig_hermitian(system.local_hamiltonian(0));

  ComplexMatrix u = ComplexMatrix::Zero(system.dim(), system.dim());
  RealVector q = RealVector::Zero(d_a);
  std::vector<BlockAssignment> assignments;

  for (const EnergyBlock& block : blocks.blocks) {
    const Index m = block.multiplicity();
    ComplexMatrix sub = block.basis.adjoint() * rho.matrix() * block.basis;
    sub = (sub + ComplexMatrix(sub.adjoint())) / 2.0;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sub);

    BlockAssignment record;
    record.energy = block.energy;
    record.populations.resize(m);
    record.target_a_energies.resize(m);

    // Block basis columns are stored by non-increasing local-A energy and
    // eigenvalues come out ascending, so sending eigenvector n to column n
    // pairs the largest population with the lowest A level.
    for (Index n = 0; n < m; ++n) {
      const ComplexVector phi = block.basis * es.eigenvectors().col(n);
      u += block.basis.col(n) * phi.adjoint();

      const double p = es.eigenvalues()(n);
      record.populations(m - 1 - n) = p;
      record.target_a_energies(m - 1 - n) = block.local_a_energies(n);
      const RealVector w =
          detail::a_level_weights(block.basis.col(n), es_a.eigenvectors, d_a, d_b);
      q += p * w;
    }
    record.target_sources.assign(block.source_indices.rbegin(),
                                 block.source_indices.rend());
    assignments.push_back(std::move(record));
  }

  UnitaryOperator u_star(std::move(u));
  const ComplexMatrix sigma = conjugate_by(u_star.matrix(), rho.matrix());
  DensityMatrix sigma_a(system.marginal(sigma, 0));

  const double e_before = system.local_energy(rho.matrix(), 0);
  const double e_after = q.dot(es_a.eigenvalues);

  OptimalFlowResult out{e_after - e_before, std::move(u_star), std::move(sigma_a),
                        std::move(q), std::move(assignments)};
  return out;
}

/// Full exchange ledger for sigma = u rho u^dag.
inline ExchangeLedger delta_e_for_unitary(const DensityMatrix& rho, const UnitaryOperator& u,
                                          const CompositeSystem& system) {
  detail::check_bipartite(system);
  if (u.dim() != rho.dim() || rho.dim() != system.dim())
    throw DomainError("delta_e_for_unitary: dimension mismatch");
  ComplexMatrix sigma = conjugate_by(u.matrix(), rho.matrix());
  sigma = (sigma + ComplexMatrix(sigma.adjoint())) / 2.0;
  return make_exchange_ledger(rho, DensityMatrix(std::move(sigma)), system);
}

/// Optimal local energy change on A over arbitrary unitaries: the descending
/// global spectrum is split into d_A consecutive groups of d_B and the groups
/// are placed on A's levels in ascending energy order.
inline OptimalFlowResult optimal_arbitrary_unitary(const DensityMatrix& rho,
                                                   const CompositeSystem& system) {
  detail::check_bipartite(system);
  if (rho.dim() != system.dim())
    throw DomainError("optimal_arbitrary_unitary: dimension mismatch");
  const Index d_a = system.local_dim(0);
  const Index d_b = system.local_dim(1);

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix());
  const EigenSystem es_a = eig_hermitian(system.local_hamiltonian(0));
  const EigenSystem es_b = eig_hermitian(system.local_hamiltonian(1));

  // Product energy basis |eps_i^A, eps_j^B> at composite slot i*d_B + j.
  ComplexMatrix u = ComplexMatrix::Zero(system.dim(), system.dim());
  RealVector q = RealVector::Zero(d_a);
  for (Index i = 0; i < d_a; ++i) {
    for (Index j = 0; j < d_b; ++j) {
      const Index rank = i * d_b + j;                    // alpha(i, j)
      const Index src = system.dim() - 1 - rank;         // descending eigenvalue
      ComplexVector target(system.dim());
      for (Index k = 0; k < d_a; ++k)
        for (Index l = 0; l < d_b; ++l)
          target(k * d_b + l) = es_a.eigenvectors(k, i) * es_b.eigenvectors(l, j);
      u += target * es.eigenvectors().col(src).adjoint();
      q(i) += es.eigenvalues()(src);
    }
  }

  UnitaryOperator u_opt(std::move(u));
  const ComplexMatrix sigma = conjugate_by(u_opt.matrix(), rho.matrix());
  DensityMatrix sigma_a(system.marginal(sigma, 0));
  const double e_before = system.local_energy(rho.matrix(), 0);
  const double e_after = q.dot(es_a.eigenvalues);

  OptimalFlowResult out{e_after - e_before, std::move(u_opt), std::move(sigma_a),
                        std::move(q), {}};
  return out;
}

}  // namespace aeflow
