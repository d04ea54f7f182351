#include "aeflow/entropy.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "aeflow/optimal_flow.hpp"
#include "aeflow/rng.hpp"
#include "aeflow/verify.hpp"
#include "oracles.hpp"

using namespace aeflow;

TEST_CASE("von Neumann entropy: pure, maximally mixed, thermodynamic identity") {
  const BellStates bell = bell_states();
  REQUIRE(von_neumann_entropy(bell.phi_plus) == Catch::Approx(0.0).margin(1e-13));
  REQUIRE(von_neumann_entropy(DensityMatrix(identity(4) / 4.0)) ==
          Catch::Approx(std::log(4.0)));

  // S(gibbs) = beta E + ln Z, both sides computed independently.
  SplitMix64 rng(301);
  ComplexMatrix g = ginibre(rng, 5, 5);
  const HermitianOperator h((g + ComplexMatrix(g.adjoint())) / 2.0);
  const double beta = 0.8;
  const DensityMatrix gamma = gibbs_state(beta, h);
  const double energy = expectation(h.matrix(), gamma.matrix());
  REQUIRE(von_neumann_entropy(gamma) ==
          Catch::Approx(beta * energy + log_partition_function(beta, h)).epsilon(1e-11));
}

TEST_CASE("relative entropy: zero on equals, known value, classical oracle, support") {
  SplitMix64 rng(302);
  const DensityMatrix rho = random_density_matrix(rng, 4);
  REQUIRE(std::abs(relative_entropy(rho, rho)) < 1e-12);

  ComplexMatrix p0 = ComplexMatrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  REQUIRE(relative_entropy(DensityMatrix(p0), DensityMatrix(identity(2) / 2.0)) ==
          Catch::Approx(std::log(2.0)));

  // commuting pair equals the classical KL divergence of the spectra
  RealVector p(4), q(4);
  p << 0.4, 0.3, 0.2, 0.1;
  q << 0.1, 0.2, 0.3, 0.4;
  ComplexMatrix dp = ComplexMatrix::Zero(4, 4), dq = ComplexMatrix::Zero(4, 4);
  for (Index i = 0; i < 4; ++i) {
    dp(i, i) = p(i);
    dq(i, i) = q(i);
  }
  REQUIRE(relative_entropy(DensityMatrix(dp), DensityMatrix(dq)) ==
          Catch::Approx(oracles::classical_kl(p, q)).epsilon(1e-12));

  // support failure: rho has mass outside sigma's support
  const BellStates bell = bell_states();
  REQUIRE(std::isinf(relative_entropy(DensityMatrix(identity(4) / 4.0), bell.phi_plus)));
}

TEST_CASE("mutual information: product, Bell, monotonicity, formula agreement") {
  SplitMix64 rng(303);
  const DensityMatrix a = random_density_matrix(rng, 2);
  const DensityMatrix b = random_density_matrix(rng, 2);
  REQUIRE(mutual_information(DensityMatrix(tensor_product(a.matrix(), b.matrix())), 2, 2) ==
          Catch::Approx(0.0).margin(1e-12));

  REQUIRE(mutual_information(bell_states().phi_plus, 2, 2) ==
          Catch::Approx(2.0 * std::log(2.0)));

  CorrelatedStateParams p;
  p.beta_a = 2.0;
  p.beta_b = 0.5;
  double prev = -1.0;
  for (double lambda : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
    p.lambda = lambda;
    const double mi = mutual_information(rho_lambda_theta(p), 2, 2);
    REQUIRE(mi >= prev - 1e-12);
    REQUIRE(mi >= -1e-12);
    prev = mi;
  }

  for (int t = 0; t < 25; ++t) {
    const DensityMatrix rho = random_density_matrix(rng, 4);
    REQUIRE(mutual_information(rho, 2, 2) ==
            Catch::Approx(mutual_information_via_relative_entropy(rho, 2, 2)).margin(1e-9));
  }
}

TEST_CASE("exchange identity: no evolution, unitary families, work term") {
  const CompositeSystem ab = two_qubit_system(1.0);
  const BlockStructure blocks = degenerate_blocks(ab);
  const HermitianOperator hq = qubit_hamiltonian(1.0);

  CorrelatedStateParams params;
  params.lambda = 0.3;
  params.theta = 0.25;
  params.beta_a = 1.9;
  params.beta_b = 0.6;
  const DensityMatrix rho = rho_lambda_theta(params);
  const double beta_a = effective_inverse_temperature(
      DensityMatrix(ab.marginal(rho.matrix(), 0)), hq);
  const double beta_b = effective_inverse_temperature(
      DensityMatrix(ab.marginal(rho.matrix(), 1)), hq);

  REQUIRE(exchange_identity_residual(rho, rho, ab, beta_a, beta_b) < 1e-12);

  SplitMix64 rng(304);
  for (int t = 0; t < 50; ++t) {
    const UnitaryOperator block_u = random_block_unitary(rng, blocks);
    const DensityMatrix sigma(conjugate_by(block_u.matrix(), rho.matrix()));
    REQUIRE(exchange_identity_residual(rho, sigma, ab, beta_a, beta_b) < 1e-9);

    const ComplexMatrix general = haar_unitary(rng, 4);
    const DensityMatrix sigma2(conjugate_by(general, rho.matrix()));
    REQUIRE(exchange_identity_residual(rho, sigma2, ab, beta_a, beta_b) < 1e-9);
  }

  // wrong declared temperatures must be rejected
  REQUIRE_THROWS_AS(exchange_identity_residual(rho, rho, ab, beta_a + 0.5, beta_b), DomainError);
}

TEST_CASE("clausius bound: identity evolution and thermal product inputs") {
  const CompositeSystem ab = two_qubit_system(1.0);
  CorrelatedStateParams params;
  params.beta_a = 2.0;
  params.beta_b = 0.5;
  const DensityMatrix rho = rho_lambda_theta(params);  // uncorrelated product

  const ExchangeLedger idle = make_exchange_ledger(rho, rho, ab);
  const ClausiusCheck check0 = clausius_bound_check(idle, 2.0, 0.5);
  REQUIRE(check0.lhs == 0.0);
  REQUIRE(check0.rhs == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(check0.satisfied);

  // uncorrelated thermal input under any unitary: dE_A >= 0 up to tolerance
  SplitMix64 rng(305);
  const BlockStructure blocks = degenerate_blocks(ab);
  for (int t = 0; t < 100; ++t) {
    const UnitaryOperator u = random_block_unitary(rng, blocks);
    const ExchangeLedger led = delta_e_for_unitary(rho, u, ab);
    REQUIRE(led.delta_e_a >= -1e-11);
    REQUIRE(clausius_bound_check(led, 2.0, 0.5).satisfied);
  }
}

TEST_CASE("ledger bookkeeping is internally consistent") {
  SplitMix64 rng(306);
  const CompositeSystem ab = two_qubit_system(1.0);
  for (int t = 0; t < 20; ++t) {
    const DensityMatrix rho = random_density_matrix(rng, 4);
    const UnitaryOperator u(haar_unitary(rng, 4));
    const ExchangeLedger led = delta_e_for_unitary(rho, u, ab);
    REQUIRE(led.work == Catch::Approx(led.delta_e_a + led.delta_e_b).margin(1e-12));
    REQUIRE(std::abs(led.delta_s_ab) < 1e-10);  // unitary preserves entropy
    REQUIRE(led.relent_a >= -1e-10);
    REQUIRE(led.relent_b >= -1e-10);
  }
}
