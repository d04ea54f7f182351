#pragma once

#include "aeflow/catalysis.hpp"
#include "aeflow/entropy.hpp"
#include "aeflow/model.hpp"
#include "aeflow/optimal_flow.hpp"
#include "aeflow/rng.hpp"
#include "aeflow/types.hpp"
#include "aeflow/variational_bound.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace aeflow {

/// Energy-preserving unitary sampled Haar-wise inside every degenerate block
/// (one-dimensional blocks get a random phase).
inline UnitaryOperator random_block_unitary(SplitMix64& rng, const BlockStructure& blocks) {
  ComplexMatrix u = ComplexMatrix::Zero(blocks.dim, blocks.dim);
  for (const EnergyBlock& block : blocks.blocks) {
    const Index m = block.multiplicity();
    ComplexMatrix local;
    if (m == 1) {
      local = ComplexMatrix::Constant(
          1, 1, std::exp(std::complex<double>(0.0, rng.uniform(0.0, 2.0 * std::numbers::pi))));
    } else {
      local = haar_unitary(rng, m);
    }
    u += block.basis * local * block.basis.adjoint();
  }
  return UnitaryOperator(std::move(u));
}

/// E(sigma_A) - E(rho_A) for sigma = u rho u^dag, without the entropy terms.
inline double delta_e_a_for_unitary(const DensityMatrix& rho, const ComplexMatrix& u,
                                    const CompositeSystem& system) {
  const ComplexMatrix sigma = conjugate_by(u, rho.matrix());
  const ComplexMatrix ha = system.lifted_local(0);
  return expectation(ha, sigma) - expectation(ha, rho.matrix());
}

struct PropertyReport {
  std::string name;
  long trials = 0;
  double worst_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerifyOptions {
  std::uint64_t seed = 20240817;
  // Negative-control hook: sample general unitaries where the block-dephasing
  // property expects energy-preserving ones, which must make it fail.
  bool inject_energy_violating_unitaries = false;
  long dephasing_pairs = 500;
  long identity_trials = 1000;
  long optimality_states = 40;
  long optimality_samples = 2500;
  long hierarchy_states = 100;
};

inline CorrelatedStateParams random_correlated_params(SplitMix64& rng) {
  CorrelatedStateParams p;
  const double lambda = rng.uniform();
  const double theta = rng.uniform() * (1.0 - lambda);
  p.lambda = lambda;
  p.theta = theta;
  p.beta_b = rng.uniform(0.0, 2.0);
  p.beta_a = p.beta_b + rng.uniform(0.0, 2.0);
  p.epsilon = 1.0;
  return p;
}

/// Cross-module invariant suites; each report carries the worst residual seen.
inline std::vector<PropertyReport> run_verification_suite(const VerifyOptions& options = {}) {
  std::vector<PropertyReport> reports;
  const CompositeSystem ab = two_qubit_system(1.0);
  const BlockStructure blocks = degenerate_blocks(ab);

  {  // Block-dephasing equivalence under energy-preserving unitaries.
    SplitMix64 rng = SplitMix64(options.seed).stream(1);
    PropertyReport rep{"dephasing-equivalence", options.dephasing_pairs, 0.0, 1e-10, false};
    for (long t = 0; t < options.dephasing_pairs; ++t) {
      const DensityMatrix rho = random_density_matrix(rng, 4);
      const UnitaryOperator u = options.inject_energy_violating_unitaries
                                    ? UnitaryOperator(haar_unitary(rng, 4))
                                    : random_block_unitary(rng, blocks);
      const double d1 = delta_e_a_for_unitary(rho, u.matrix(), ab);
      const double d2 = delta_e_a_for_unitary(block_dephase(rho, blocks), u.matrix(), ab);
      rep.worst_residual = std::max(rep.worst_residual, std::abs(d1 - d2));
    }
    rep.pass = rep.worst_residual <= rep.tolerance;
    reports.push_back(rep);
  }

  {  // Energy-exchange identity and Clausius slack across channel types.
    SplitMix64 rng = SplitMix64(options.seed).stream(2);
    const CatalyticProtocol protocol(1.0, 0.1, 3);
    PropertyReport identity{"exchange-identity", options.identity_trials, 0.0, 1e-9, false};
    PropertyReport clausius{"clausius-slack", options.identity_trials, 0.0, 1e-9, false};
    const HermitianOperator hq = qubit_hamiltonian(1.0);
    for (long t = 0; t < options.identity_trials; ++t) {
      const CorrelatedStateParams params = random_correlated_params(rng);
      const DensityMatrix rho = rho_lambda_theta(params);
      const double beta_a =
          effective_inverse_temperature(DensityMatrix(ab.marginal(rho.matrix(), 0)), hq);
      const double beta_b =
          effective_inverse_temperature(DensityMatrix(ab.marginal(rho.matrix(), 1)), hq);

      DensityMatrix sigma = rho;
      switch (t % 3) {
        case 0: {  // energy-preserving unitary
          const UnitaryOperator u = random_block_unitary(rng, blocks);
          sigma = DensityMatrix(conjugate_by(u.matrix(), rho.matrix()));
          break;
        }
        case 1: {  // general unitary, exercises the work term
          const ComplexMatrix u = haar_unitary(rng, 4);
          sigma = DensityMatrix(conjugate_by(u, rho.matrix()));
          break;
        }
        default: {  // catalytic channel output
          const double tau = rng.uniform(0.5, 200.0);
          sigma = protocol.step(rho, tau).sigma_ab_prime;
          break;
        }
      }
      identity.worst_residual = std::max(
          identity.worst_residual, exchange_identity_residual(rho, sigma, ab, beta_a, beta_b));
      const ClausiusCheck check =
          clausius_bound_check(make_exchange_ledger(rho, sigma, ab), beta_a, beta_b);
      clausius.worst_residual = std::max(clausius.worst_residual, -check.slack);
    }
    identity.pass = identity.worst_residual <= identity.tolerance;
    clausius.pass = clausius.worst_residual <= clausius.tolerance;
    reports.push_back(identity);
    reports.push_back(clausius);
  }

  {  // No sampled energy-preserving unitary beats the optimal flow.
    SplitMix64 rng = SplitMix64(options.seed).stream(3);
    PropertyReport rep{"optimal-flow-optimality",
                       options.optimality_states * options.optimality_samples, 0.0, 1e-9,
                       false};
    for (long s = 0; s < options.optimality_states; ++s) {
      const DensityMatrix rho = random_density_matrix(rng, 4);
      const OptimalFlowResult best = optimal_energy_preserving(rho, ab, blocks);
      for (long t = 0; t < options.optimality_samples; ++t) {
        const UnitaryOperator u = random_block_unitary(rng, blocks);
        const double de = delta_e_a_for_unitary(rho, u.matrix(), ab);
        rep.worst_residual = std::max(rep.worst_residual, best.delta_e_a - de);
      }
    }
    rep.pass = rep.worst_residual <= rep.tolerance;
    reports.push_back(rep);
  }

  {  // Arbitrary unitaries reach at least as low as energy-preserving ones.
    SplitMix64 rng = SplitMix64(options.seed).stream(4);
    PropertyReport rep{"unitary-hierarchy", options.hierarchy_states, 0.0, 1e-9, false};
    for (long s = 0; s < options.hierarchy_states; ++s) {
      const DensityMatrix rho = random_density_matrix(rng, 4);
      const double within = optimal_energy_preserving(rho, ab, blocks).delta_e_a;
      const double arbitrary = optimal_arbitrary_unitary(rho, ab).delta_e_a;
      rep.worst_residual = std::max(rep.worst_residual, arbitrary - within);
    }
    rep.pass = rep.worst_residual <= rep.tolerance;
    reports.push_back(rep);
  }

  {  // Catalysis contracts and the variational bound on a coarse sweep grid.
    SweepConfig config;
    config.lambda_grid = SweepConfig::linspace(0.0, 1.0, 6);
    config.theta_grid = SweepConfig::linspace(0.0, 1.0, 6);
    config.tau_points = 100;
    config.refine_iters = 24;
    const std::vector<SweepRecord> records = sweep_lambda_theta(config);

    PropertyReport adv{"catalytic-advantage", static_cast<long>(records.size()), 0.0, 1e-9,
                       false};
    PropertyReport resid{"catalysis-residuals", static_cast<long>(records.size()), 0.0, 1e-9,
                         false};
    std::vector<BoundOrderingRow> rows;
    for (const SweepRecord& rec : records) {
      adv.worst_residual = std::max(adv.worst_residual, -rec.advantage);
      resid.worst_residual = std::max(
          resid.worst_residual, std::max(rec.catalyst_residual, rec.energy_residual));
      rows.push_back({rec.lambda, rec.theta, rec.de_star, rec.de_cat, rec.bound});
      if (!rec.ok) adv.worst_residual = std::numeric_limits<double>::infinity();
    }
    adv.pass = adv.worst_residual <= adv.tolerance;
    resid.pass = resid.worst_residual <= resid.tolerance;
    reports.push_back(adv);
    reports.push_back(resid);

    const BoundOrderingReport ordering = verify_bound_ordering(rows);
    reports.push_back({"bound-ordering", static_cast<long>(rows.size()),
                       ordering.worst_slack, 1e-7, ordering.pass});
  }

  return reports;
}

}  // namespace aeflow
