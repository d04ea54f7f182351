#include "aeflow/variational_bound.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "aeflow/catalysis.hpp"
#include "aeflow/rng.hpp"
#include "oracles.hpp"

using namespace aeflow;

TEST_CASE("exponential family: degenerate limits and monotone A-marginal") {
  const CompositeSystem ab = two_qubit_system(1.0);

  REQUIRE(max_abs(exponential_family_state(0.0, 0.0, ab).matrix() - identity(4) / 4.0) <
          1e-14);

  const double beta = 0.9;
  REQUIRE(max_abs(exponential_family_state(0.0, beta, ab).matrix() -
                  gibbs_state(beta, ab.h0()).matrix()) < 1e-13);

  const ExponentialFamily fam(ab);
  double prev = std::numeric_limits<double>::infinity();
  for (double alpha : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    const double ea = fam.moments(alpha, 0.7).energy_a;
    REQUIRE(ea < prev + 1e-12);  // A-excitation decreases with alpha
    prev = ea;
  }

  REQUIRE_THROWS_AS(
      exponential_family_state(std::numeric_limits<double>::infinity(), 0.0, ab), DomainError);
}

TEST_CASE("catalytic bound: maximally mixed input is pinned") {
  const CompositeSystem ab = two_qubit_system(1.0);
  const BoundResult r = catalytic_bound(DensityMatrix(identity(4) / 4.0), ab);
  REQUIRE(std::abs(r.de_bound) < 1e-7);
  REQUIRE(r.converged);
  REQUIRE(r.entropy_residual >= -1e-7);
  REQUIRE(std::abs(r.energy_residual) < 1e-7);
}

TEST_CASE("catalytic bound: pure states reduce to the energy-constrained program") {
  const CompositeSystem ab = two_qubit_system(1.0);
  const ExponentialFamily fam(ab);
  const BellStates bell = bell_states();

  for (const DensityMatrix* rho : {&bell.phi_plus, &bell.psi_minus}) {
    const BoundResult r = catalytic_bound(*rho, ab);
    const double e0 = expectation(ab.h0().matrix(), rho->matrix());
    const double ea0 = expectation(ab.lifted_local(0), rho->matrix());
    const double oracle = oracles::lp_min_energy_a(fam.a_levels(), fam.h_levels(), e0) - ea0;
    REQUIRE(r.de_bound == Catch::Approx(oracle).margin(1e-7));
    REQUIRE_FALSE(r.entropy_binding);
    REQUIRE(r.entropy_residual >= -1e-7);
    REQUIRE(std::abs(r.energy_residual) < 1e-7);
  }
  // phi+ sits at total energy eps, optimal placement is all mass on |01>
  REQUIRE(catalytic_bound(bell.phi_plus, ab).de_bound == Catch::Approx(-0.5).margin(1e-7));
}

TEST_CASE("catalytic bound: feasibility and restart invariance on the family grid") {
  const CompositeSystem ab = two_qubit_system(1.0);
  SplitMix64 rng(601);
  for (int t = 0; t < 30; ++t) {
    CorrelatedStateParams p;
    p.lambda = rng.uniform();
    p.theta = rng.uniform() * (1.0 - p.lambda);
    p.beta_a = 1.0 + rng.uniform();
    p.beta_b = rng.uniform();
    const DensityMatrix rho = rho_lambda_theta(p);
    const BoundResult r = catalytic_bound(rho, ab);
    REQUIRE(r.converged);
    REQUIRE(r.entropy_residual >= -1e-7);
    REQUIRE(std::abs(r.energy_residual) <= 1e-7 * std::max(1.0, max_abs(ab.h0().matrix())));

    BoundOptions restart;
    restart.alpha_start = 3.0;
    restart.lambda_start = -1.0;
    const BoundResult r2 = catalytic_bound(rho, ab, restart);
    REQUIRE(r2.de_bound == Catch::Approx(r.de_bound).margin(1e-7));
  }
}

TEST_CASE("catalytic bound lower-bounds the catalytic protocol on sample points") {
  const CompositeSystem ab = two_qubit_system(1.0);
  const CatalyticProtocol protocol(1.0, 0.1, 3);
  SweepConfig config;
  config.lambda_grid = {0.2, 0.8};
  config.theta_grid = {0.0, 0.6};
  config.tau_points = 120;
  config.refine_iters = 16;

  std::vector<BoundOrderingRow> rows;
  for (double lambda : config.lambda_grid) {
    for (double theta : config.theta_grid) {
      if (lambda + theta > 1.0) continue;
      CorrelatedStateParams p;
      p.lambda = lambda;
      p.theta = theta;
      const DensityMatrix rho = rho_lambda_theta(p);
      const ProtocolResult run = optimize_tau(rho, protocol, config);
      const BoundResult bound = catalytic_bound(rho, ab);
      REQUIRE(bound.de_bound <= run.delta_e_catalytic + 1e-7);
      REQUIRE(run.delta_e_catalytic <= run.delta_e_star + 1e-9);
      rows.push_back({lambda, theta, run.delta_e_star, run.delta_e_catalytic, bound.de_bound});
    }
  }
  const BoundOrderingReport report = verify_bound_ordering(rows);
  REQUIRE(report.pass);
  REQUIRE(report.violations.empty());

  // toy example: the bound must allow at least the realized -1/4 flow
  const ClassicalToyModel toy = make_classical_toy(1.0);
  const BoundResult toy_bound = catalytic_bound(toy.rho_ab, toy.ab);
  REQUIRE(toy_bound.de_bound <= -0.25 + 1e-8);
}

TEST_CASE("verify_bound_ordering reports violations with diagnostics") {
  std::vector<BoundOrderingRow> rows{{0.1, 0.2, 0.0, -0.3, -0.4},
                                     {0.5, 0.1, 0.0, -0.2, -0.1}};
  const BoundOrderingReport report = verify_bound_ordering(rows);
  REQUIRE_FALSE(report.pass);
  REQUIRE(report.violations.size() == 1);
  REQUIRE(report.violations[0].row.lambda == 0.5);
  REQUIRE(report.worst_slack == Catch::Approx(0.1));
}
