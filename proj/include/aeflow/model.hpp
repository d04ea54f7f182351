#pragma once

#include "aeflow/linalg.hpp"
#include "aeflow/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

namespace aeflow {

/// Non-interacting composite: local Hamiltonians H_x and H0 = sum of the
/// identity-padded local terms. Units: energy with hbar = k_B = 1.
class CompositeSystem {
 public:
  explicit CompositeSystem(std::vector<HermitianOperator> locals)
      : locals_(std::move(locals)), h0_(build_h0(locals_)) {
    for (const auto& h : locals_) dims_.push_back(h.dim());
  }

  Index subsystem_count() const { return static_cast<Index>(dims_.size()); }
  const std::vector<Index>& dims() const { return dims_; }
  Index local_dim(Index s) const { return dims_[static_cast<std::size_t>(s)]; }
  Index dim() const { return h0_.dim(); }
  const HermitianOperator& local_hamiltonian(Index s) const {
    return locals_[static_cast<std::size_t>(s)];
  }
  const HermitianOperator& h0() const { return h0_; }

  /// H_s padded with identities on the other subsystems.
  ComplexMatrix lifted_local(Index s) const {
    ComplexMatrix out = ComplexMatrix::Ones(1, 1);
    for (Index i = 0; i < subsystem_count(); ++i)
      out = tensor_product(out, i == s ? locals_[static_cast<std::size_t>(i)].matrix()
                                       : identity(dims_[static_cast<std::size_t>(i)]));
    return out;
  }

  ComplexMatrix marginal(const ComplexMatrix& state, Index s) const {
    return partial_trace(state, dims_, {s});
  }

  /// Tr[H_s rho_s] evaluated on the joint state.
  double local_energy(const ComplexMatrix& state, Index s) const {
    return expectation(locals_[static_cast<std::size_t>(s)].matrix(), marginal(state, s));
  }

 private:
  static HermitianOperator build_h0(const std::vector<HermitianOperator>& locals) {
    if (locals.empty()) throw DomainError("CompositeSystem: no subsystems");
    Index total = 1;
    for (const auto& h : locals) total *= h.dim();
    ComplexMatrix h0 = ComplexMatrix::Zero(total, total);
    for (std::size_t s = 0; s < locals.size(); ++s) {
      ComplexMatrix term = ComplexMatrix::Ones(1, 1);
      for (std::size_t i = 0; i < locals.size(); ++i)
        term = tensor_product(term, i == s ? locals[i].matrix() : identity(locals[i].dim()));
      h0 += term;
    }
    return HermitianOperator(std::move(h0));
  }

  std::vector<HermitianOperator> locals_;
  HermitianOperator h0_;
  std::vector<Index> dims_;
};

/// H = epsilon |1><1| on a qubit.
inline HermitianOperator qubit_hamiltonian(double epsilon) {
  ComplexMatrix h = ComplexMatrix::Zero(2, 2);
  h(1, 1) = epsilon;
  return HermitianOperator(std::move(h));
}

/// Two resonant qubits A, B with gap epsilon.
inline CompositeSystem two_qubit_system(double epsilon) {
  return CompositeSystem({qubit_hamiltonian(epsilon), qubit_hamiltonian(epsilon)});
}

/// gamma = exp(-beta H)/Z, computed spectrally with a ground-energy shift.
/// beta is capped at beta_max (default 1e4 divided by the spectral range),
/// beyond which the state equals the ground projector to machine precision.
inline DensityMatrix gibbs_state(double beta, const HermitianOperator& h,
                                 double beta_max = 0.0) {
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw DomainError("gibbs_state: beta must be finite and >= 0");
  const EigenSystem es = eig_hermitian(h);
  const double range = es.eigenvalues(es.eigenvalues.size() - 1) - es.eigenvalues(0);
  if (beta_max <= 0.0) beta_max = (range > 0.0) ? 1e4 / range : beta;
  beta = std::min(beta, beta_max);
  RealVector w = (-beta * (es.eigenvalues.array() - es.eigenvalues(0))).exp();
  w /= w.sum();
  ComplexMatrix rho =
      es.eigenvectors * w.cast<std::complex<double>>().asDiagonal() * es.eigenvectors.adjoint();
  rho = (rho + ComplexMatrix(rho.adjoint())) / 2.0;
  return DensityMatrix(std::move(rho));
}

/// ln Z for exp(-beta H), evaluated with the same shift as gibbs_state.
inline double log_partition_function(double beta, const HermitianOperator& h) {
  const EigenSystem es = eig_hermitian(h);
  const double e0 = es.eigenvalues(0);
  double z = 0.0;
  for (Index i = 0; i < es.eigenvalues.size(); ++i)
    z += std::exp(-beta * (es.eigenvalues(i) - e0));
  return std::log(z) - beta * e0;
}

struct BellStates {
  DensityMatrix phi_plus;   // (|00> + |11>)/sqrt(2)
  DensityMatrix psi_minus;  // (|01> - |10>)/sqrt(2)
};

inline BellStates bell_states() {
  ComplexVector phi = ComplexVector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  ComplexVector psi = ComplexVector::Zero(4);
  psi(1) = 1.0 / std::sqrt(2.0);
  psi(2) = -1.0 / std::sqrt(2.0);
  return {DensityMatrix(phi * phi.adjoint()), DensityMatrix(psi * psi.adjoint())};
}

/// Parameters of the correlated two-qubit family: a product of Gibbs states
/// mixed with the two Bell states phi+ and psi-.
struct CorrelatedStateParams {
  double lambda = 0.0;
  double theta = 0.0;
  double beta_a = 2.0;
  double beta_b = 1.8;
  double epsilon = 1.0;

  void validate() const {
    if (lambda < 0.0 || theta < 0.0 || lambda + theta > 1.0 + 1e-12)
      throw DomainError("CorrelatedStateParams: need lambda, theta >= 0, lambda+theta <= 1");
    if (beta_a < beta_b)
      throw DomainError("CorrelatedStateParams: beta_a must be >= beta_b (A colder)");
    if (!(epsilon > 0.0)) throw DomainError("CorrelatedStateParams: epsilon must be > 0");
  }
};

/// (1-lambda-theta) gamma_A x gamma_B + lambda phi+ + theta psi-.
inline DensityMatrix rho_lambda_theta(const CorrelatedStateParams& p) {
  p.validate();
  const HermitianOperator h = qubit_hamiltonian(p.epsilon);
  const DensityMatrix ga = gibbs_state(p.beta_a, h);
  const DensityMatrix gb = gibbs_state(p.beta_b, h);
  const BellStates bell = bell_states();
  ComplexMatrix rho = (1.0 - p.lambda - p.theta) * tensor_product(ga.matrix(), gb.matrix()) +
                      p.lambda * bell.phi_plus.matrix() + p.theta * bell.psi_minus.matrix();
  return DensityMatrix(std::move(rho));
}

/// Inverse temperature of a full-rank qubit state diagonal in the energy
/// eigenbasis of h: beta = ln(p0/p1)/gap. Population inversion gives a
/// negative value; the caller decides what to do with it.
inline double effective_inverse_temperature(const DensityMatrix& rho,
                                            const HermitianOperator& h) {
  if (rho.dim() != 2 || h.dim() != 2)
    throw DomainError("effective_inverse_temperature: qubit inputs required");
  const EigenSystem es = eig_hermitian(h);
  const double gap = es.eigenvalues(1) - es.eigenvalues(0);
  if (gap <= 1e-12)
    throw DomainError("effective_inverse_temperature: degenerate Hamiltonian");
  const ComplexMatrix in_basis = es.eigenvectors.adjoint() * rho.matrix() * es.eigenvectors;
  if (std::abs(in_basis(0, 1)) > 1e-10)
    throw DomainError("effective_inverse_temperature: state not diagonal in energy basis");
  const double p0 = in_basis(0, 0).real();
  const double p1 = in_basis(1, 1).real();
  if (p0 < 1e-14 || p1 < 1e-14)
    throw DomainError("effective_inverse_temperature: rank-deficient state");
  return std::log(p0 / p1) / gap;
}

/// Truncated bosonic annihilation operator, a|k> = sqrt(k)|k-1>.
inline ComplexMatrix annihilation_operator(Index n_fock) {
  ComplexMatrix a = ComplexMatrix::Zero(n_fock, n_fock);
  for (Index k = 1; k < n_fock; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

struct TavisCummingsModel {
  CompositeSystem system;   // A (qubit), B (qubit), C (cavity, n_fock levels)
  HermitianOperator v;      // g sum_i (a sigma_i^dag + a^dag sigma_i)
  double epsilon = 1.0;
  double g = 0.0;

  const HermitianOperator& h0() const { return system.h0(); }
};

/// Two resonant qubits coupled to one cavity mode truncated at n_fock levels.
/// Ordering A x B x C. The truncated a, a^dag are formed first and V built
/// from them, so [h0, v] = 0 holds exactly; the top Fock sector simply has no
/// outgoing coupling.
inline TavisCummingsModel tavis_cummings(double epsilon, double g, Index n_fock) {
  if (n_fock < 2) throw DomainError("tavis_cummings: n_fock must be >= 2");
  const ComplexMatrix a = annihilation_operator(n_fock);
  const ComplexMatrix ad = a.adjoint();
  ComplexMatrix number_c = ad * a;
  number_c = (number_c + ComplexMatrix(number_c.adjoint())) / 2.0;

  ComplexMatrix lower = ComplexMatrix::Zero(2, 2);  // sigma = |0><1|
  lower(0, 1) = 1.0;
  const ComplexMatrix raise = lower.adjoint();
  const ComplexMatrix i2 = identity(2);

  CompositeSystem system({qubit_hamiltonian(epsilon), qubit_hamiltonian(epsilon),
                          HermitianOperator(epsilon * number_c)});

  ComplexMatrix v = g * (tensor_product(raise, i2, a) + tensor_product(lower, i2, ad) +
                         tensor_product(i2, raise, a) + tensor_product(i2, lower, ad));
  return {std::move(system), HermitianOperator(std::move(v)), epsilon, g};
}

/// One degenerate eigenspace of H0.
struct EnergyBlock {
  double energy = 0.0;
  ComplexMatrix basis;            // dim x multiplicity, orthonormal columns
  RealVector local_a_energies;    // <b_n|H_A x 1|b_n> per column, non-increasing
  // A-major index of each column in the energy-product enumeration (equals the
  // computational composite index when the locals are diagonal with ascending
  // entries).
  std::vector<Index> source_indices;

  Index multiplicity() const { return basis.cols(); }
  ComplexMatrix projector() const { return basis * basis.adjoint(); }
};

/// Degenerate eigenspaces of H0 with per-block bases sorted by non-increasing
/// local-A energy (ties broken by original basis index, stable).
struct BlockStructure {
  std::vector<EnergyBlock> blocks;
  Index dim = 0;
};

/// Group the spectrum of H0 into degenerate blocks. Energies within
/// tol * max(1, |E|_max) of each other share a block. H0 is non-interacting,
/// so every eigenspace is spanned by products of local eigenvectors; the block
/// bases are built from those energy-product vectors, which carry a definite
/// local-A energy even inside degenerate blocks.
inline BlockStructure degenerate_blocks(const CompositeSystem& system,
                                        double tolerance = tol::degeneracy) {
  const Index d = system.dim();
  const ComplexMatrix ha_lifted = system.lifted_local(0);

  // Product eigenbasis: vector k (A-major over local levels) has energy
  // sum_s eps_{i_s}^{(s)} and column kron_s v_{i_s}^{(s)}.
  std::vector<EigenSystem> local_es;
  for (Index s = 0; s < system.subsystem_count(); ++s)
    local_es.push_back(eig_hermitian(system.local_hamiltonian(s)));

  RealVector energies = RealVector::Zero(d);
  ComplexMatrix basis(d, d);
  for (Index k = 0; k < d; ++k) {
    ComplexMatrix column = ComplexMatrix::Ones(1, 1);
    Index rem = k;
    Index stride = d;
    for (Index s = 0; s < system.subsystem_count(); ++s) {
      stride /= system.local_dim(s);
      const Index level = rem / stride;
      rem %= stride;
      energies(k) += local_es[static_cast<std::size_t>(s)].eigenvalues(level);
      column = tensor_product(
          column, local_es[static_cast<std::size_t>(s)].eigenvectors.col(level));
    }
    basis.col(k) = column;
  }

  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return energies(i) < energies(j); });

  const double scale = std::max(1.0, energies.cwiseAbs().maxCoeff());
  BlockStructure out;
  out.dim = d;
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t stop = start + 1;
    while (stop < order.size() &&
           energies(order[stop]) - energies(order[stop - 1]) <= tolerance * scale)
      ++stop;

    std::vector<Index> members(order.begin() + static_cast<std::ptrdiff_t>(start),
                               order.begin() + static_cast<std::ptrdiff_t>(stop));
    std::vector<double> a_energy(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) {
      const auto col = basis.col(members[k]);
      a_energy[k] = (col.adjoint() * ha_lifted * col)(0, 0).real();
    }
    std::vector<std::size_t> perm(members.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t i, std::size_t j) { return a_energy[i] > a_energy[j]; });

    EnergyBlock block;
    const Index m = static_cast<Index>(members.size());
    block.basis.resize(d, m);
    block.local_a_energies.resize(m);
    double mean_energy = 0.0;
    for (Index k = 0; k < m; ++k) {
      const Index src = members[perm[static_cast<std::size_t>(k)]];
      block.basis.col(k) = basis.col(src);
      block.local_a_energies(k) = a_energy[perm[static_cast<std::size_t>(k)]];
      block.source_indices.push_back(src);
      mean_energy += energies(src);
    }
    block.energy = mean_energy / static_cast<double>(m);
    out.blocks.push_back(std::move(block));
    start = stop;
  }
  return out;
}

}  // namespace aeflow
