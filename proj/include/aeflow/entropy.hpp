#pragma once

#include "aeflow/linalg.hpp"
#include "aeflow/model.hpp"
#include "aeflow/types.hpp"

#include <cmath>
#include <limits>

namespace aeflow {

// All entropies in nats.

namespace detail {

/// Eigenvalues in [-psd_tol, 0) are clipped to 0 before logarithms.
inline double clip_probability(double p) {
  if (p < 0.0 && p >= -tol::psd_eigenvalue) return 0.0;
  return p;
}

}  // namespace detail

/// S(rho) = -Tr[rho ln rho], with 0 ln 0 = 0.
inline double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = detail::clip_probability(es.eigenvalues()(i));
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

/// S(rho||sigma) = Tr[rho (ln rho - ln sigma)]. Returns +infinity when rho has
/// more than 1e-10 population on the numerical null space of sigma.
inline double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DomainError("relative_entropy: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es_s(sigma.matrix());
  double cross = 0.0;      // Tr[rho ln sigma], over sigma's support
  double null_mass = 0.0;  // population of rho outside sigma's support
  for (Index j = 0; j < es_s.eigenvalues().size(); ++j) {
    const double mu = detail::clip_probability(es_s.eigenvalues()(j));
    const auto w = es_s.eigenvectors().col(j);
    const double overlap = (w.adjoint() * rho.matrix() * w)(0, 0).real();
    if (mu <= tol::entropy_support)
      null_mass += std::max(0.0, overlap);
    else
      cross += overlap * std::log(mu);
  }
  if (null_mass > 1e-10) return std::numeric_limits<double>::infinity();
  return -von_neumann_entropy(rho) - cross;
}

/// I(A:B) = S(rho_A) + S(rho_B) - S(rho_AB).
inline double mutual_information(const DensityMatrix& rho_ab, Index d_a, Index d_b) {
  if (rho_ab.dim() != d_a * d_b) throw DomainError("mutual_information: dimension mismatch");
  const DensityMatrix rho_a(partial_trace(rho_ab.matrix(), {d_a, d_b}, {0}));
  const DensityMatrix rho_b(partial_trace(rho_ab.matrix(), {d_a, d_b}, {1}));
  return von_neumann_entropy(rho_a) + von_neumann_entropy(rho_b) -
         von_neumann_entropy(rho_ab);
}

/// Same quantity through S(rho_AB || rho_A x rho_B); used as a cross-check.
inline double mutual_information_via_relative_entropy(const DensityMatrix& rho_ab,
                                                      Index d_a, Index d_b) {
  const ComplexMatrix rho_a = partial_trace(rho_ab.matrix(), {d_a, d_b}, {0});
  const ComplexMatrix rho_b = partial_trace(rho_ab.matrix(), {d_a, d_b}, {1});
  return relative_entropy(rho_ab, DensityMatrix(tensor_product(rho_a, rho_b)));
}

/// Bookkeeping for one evolution rho_AB -> sigma_AB on a bipartite system.
/// Energies against the local Hamiltonians; relents against the initial
/// marginals (thermal in every use below).
struct ExchangeLedger {
  double delta_e_a = 0.0;
  double delta_e_b = 0.0;
  double work = 0.0;         // W = dE_A + dE_B
  double delta_s_a = 0.0;
  double delta_s_b = 0.0;
  double delta_s_ab = 0.0;
  double delta_mutual_info = 0.0;  // dI = dS_A + dS_B - dS_AB
  double relent_a = 0.0;           // S(sigma_A || gamma_A)
  double relent_b = 0.0;           // S(sigma_B || gamma_B)
};

inline ExchangeLedger make_exchange_ledger(const DensityMatrix& rho,
                                           const DensityMatrix& sigma,
                                           const CompositeSystem& system) {
  if (system.subsystem_count() != 2)
    throw DomainError("make_exchange_ledger: bipartite system required");
  if (rho.dim() != system.dim() || sigma.dim() != system.dim())
    throw DomainError("make_exchange_ledger: state dimension mismatch");

  const DensityMatrix rho_a(system.marginal(rho.matrix(), 0));
  const DensityMatrix rho_b(system.marginal(rho.matrix(), 1));
  const DensityMatrix sig_a(system.marginal(sigma.matrix(), 0));
  const DensityMatrix sig_b(system.marginal(sigma.matrix(), 1));

  ExchangeLedger out;
  out.delta_e_a = expectation(system.local_hamiltonian(0).matrix(),
                              sig_a.matrix() - rho_a.matrix());
  out.delta_e_b = expectation(system.local_hamiltonian(1).matrix(),
                              sig_b.matrix() - rho_b.matrix());
  out.work = out.delta_e_a + out.delta_e_b;
  out.delta_s_a = von_neumann_entropy(sig_a) - von_neumann_entropy(rho_a);
  out.delta_s_b = von_neumann_entropy(sig_b) - von_neumann_entropy(rho_b);
  out.delta_s_ab = von_neumann_entropy(sigma) - von_neumann_entropy(rho);
  out.delta_mutual_info = out.delta_s_a + out.delta_s_b - out.delta_s_ab;
  out.relent_a = relative_entropy(sig_a, rho_a);
  out.relent_b = relative_entropy(sig_b, rho_b);
  return out;
}

/// Residual of the exact energy-exchange identity
///   (beta_A - beta_B) dE_A = dS_A + dS_B - beta_B W + S(sigma_A||gamma_A)
///                                               + S(sigma_B||gamma_B),
/// with gamma_x = exp(-beta_x H_x)/Z_x. The identity holds for every channel
/// output sigma once the initial marginals are thermal at the declared
/// temperatures; that premise is checked to trace distance 1e-8.
inline double exchange_identity_residual(const DensityMatrix& rho,
                                         const DensityMatrix& sigma,
                                         const CompositeSystem& system, double beta_a,
                                         double beta_b) {
  if (system.subsystem_count() != 2)
    throw DomainError("exchange_identity_residual: bipartite system required");
  const DensityMatrix gamma_a = gibbs_state(beta_a, system.local_hamiltonian(0));
  const DensityMatrix gamma_b = gibbs_state(beta_b, system.local_hamiltonian(1));
  const DensityMatrix rho_a(system.marginal(rho.matrix(), 0));
  const DensityMatrix rho_b(system.marginal(rho.matrix(), 1));
  if (trace_distance(rho_a, gamma_a) > 1e-8 || trace_distance(rho_b, gamma_b) > 1e-8)
    throw DomainError(
        "exchange_identity_residual: initial marginals not thermal at the declared "
        "temperatures");

  const DensityMatrix sig_a(system.marginal(sigma.matrix(), 0));
  const DensityMatrix sig_b(system.marginal(sigma.matrix(), 1));
  const double de_a = expectation(system.local_hamiltonian(0).matrix(),
                                  sig_a.matrix() - gamma_a.matrix());
  const double de_b = expectation(system.local_hamiltonian(1).matrix(),
                                  sig_b.matrix() - gamma_b.matrix());
  const double w = de_a + de_b;
  const double ds_a = von_neumann_entropy(sig_a) - von_neumann_entropy(gamma_a);
  const double ds_b = von_neumann_entropy(sig_b) - von_neumann_entropy(gamma_b);
  const double relents = relative_entropy(sig_a, gamma_a) + relative_entropy(sig_b, gamma_b);
  const double lhs = (beta_a - beta_b) * de_a;
  const double rhs = ds_a + ds_b - beta_b * w + relents;
  return std::abs(lhs - rhs);
}

/// Both sides of the correlation-aware Clausius inequality
///   dE_A (beta_A - beta_B) >= dI - beta_B W.
struct ClausiusCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // lhs - rhs
  bool satisfied = false;
};

inline ClausiusCheck clausius_bound_check(const ExchangeLedger& ledger, double beta_a,
                                          double beta_b) {
  ClausiusCheck out;
  out.lhs = ledger.delta_e_a * (beta_a - beta_b);
  out.rhs = ledger.delta_mutual_info - beta_b * ledger.work;
  out.slack = out.lhs - out.rhs;
  out.satisfied = out.slack >= -1e-9;
  return out;
}

}  // namespace aeflow
