#include "aeflow/linalg.hpp"
#include "aeflow/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace aeflow;

namespace {
ComplexMatrix basis_projector(Index d, Index k) {
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  m(k, k) = 1.0;
  return m;
}
}  // namespace

TEST_CASE("tensor product identities") {
  REQUIRE(max_abs(tensor_product(identity(2), identity(2)) - identity(4)) == 0.0);

  const ComplexMatrix p = tensor_product(basis_projector(2, 0), basis_projector(2, 1));
  REQUIRE(p.rows() == 4);
  REQUIRE(p(1, 1) == std::complex<double>(1.0, 0.0));
  REQUIRE(max_abs(p - basis_projector(4, 1)) == 0.0);
}

TEST_CASE("tensor product matches the four-index definition") {
  SplitMix64 rng(101);
  const ComplexMatrix a = ginibre(rng, 2, 2);
  const ComplexMatrix b = ginibre(rng, 2, 2);
  const ComplexMatrix t = tensor_product(a, b);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j)
      for (Index k = 0; k < 2; ++k)
        for (Index l = 0; l < 2; ++l)
          REQUIRE(std::abs(t(i * 2 + j, k * 2 + l) - a(i, k) * b(j, l)) < 1e-15);
}

TEST_CASE("partial trace of a Bell state gives the maximally mixed marginal") {
  ComplexVector phi = ComplexVector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  const ComplexMatrix rho = phi * phi.adjoint();
  const ComplexMatrix marginal = partial_trace(rho, {2, 2}, {0});
  REQUIRE(max_abs(marginal - identity(2) / 2.0) < 1e-15);
}

TEST_CASE("partial trace factorizes product inputs") {
  SplitMix64 rng(102);
  const DensityMatrix a = random_density_matrix(rng, 2);
  const DensityMatrix b = random_density_matrix(rng, 3);
  const ComplexMatrix joint = tensor_product(a.matrix(), b.matrix());
  REQUIRE(max_abs(partial_trace(joint, {2, 3}, {0}) - a.matrix()) < 1e-14);
  REQUIRE(max_abs(partial_trace(joint, {2, 3}, {1}) - b.matrix()) < 1e-14);
}

TEST_CASE("tripartite partial trace recovers the kept factor") {
  SplitMix64 rng(103);
  const DensityMatrix a = random_density_matrix(rng, 2);
  const DensityMatrix b = random_density_matrix(rng, 2);
  const DensityMatrix c = random_density_matrix(rng, 3);
  const ComplexMatrix joint = tensor_product(a.matrix(), b.matrix(), c.matrix());
  REQUIRE(max_abs(partial_trace(joint, {2, 2, 3}, {2}) - c.matrix()) < 1e-12);
  REQUIRE(max_abs(partial_trace(joint, {2, 2, 3}, {0, 1}) -
                  tensor_product(a.matrix(), b.matrix())) < 1e-12);
}

TEST_CASE("partial trace preserves the trace and rejects bad dimensions") {
  SplitMix64 rng(104);
  const DensityMatrix rho = random_density_matrix(rng, 6);
  const ComplexMatrix reduced = partial_trace(rho.matrix(), {2, 3}, {1});
  REQUIRE(std::abs(reduced.trace() - rho.matrix().trace()) < 1e-14);
  REQUIRE_THROWS_AS(partial_trace(rho.matrix(), {2, 2}, {0}), DomainError);
}

TEST_CASE("hermitian eigendecomposition: diagonal and symmetric cases") {
  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  d(2, 2) = 2.0;
  const EigenSystem es = eig_hermitian(d);
  REQUIRE(es.eigenvalues(0) == Catch::Approx(1.0));
  REQUIRE(es.eigenvalues(1) == Catch::Approx(2.0));
  REQUIRE(es.eigenvalues(2) == Catch::Approx(3.0));

  ComplexMatrix x = ComplexMatrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  const EigenSystem es_x = eig_hermitian(x);
  REQUIRE(es_x.eigenvalues(0) == Catch::Approx(-1.0));
  REQUIRE(es_x.eigenvalues(1) == Catch::Approx(1.0));
}

TEST_CASE("hermitian eigendecomposition reconstructs and is orthonormal") {
  SplitMix64 rng(105);
  ComplexMatrix g = ginibre(rng, 5, 5);
  const HermitianOperator h((g + ComplexMatrix(g.adjoint())) / 2.0);
  const EigenSystem es = eig_hermitian(h);
  const ComplexMatrix rebuilt = es.eigenvectors *
                                es.eigenvalues.cast<std::complex<double>>().asDiagonal() *
                                es.eigenvectors.adjoint();
  REQUIRE(max_abs(rebuilt - h.matrix()) < 1e-10 * std::max(1.0, max_abs(h.matrix())));
  REQUIRE(unitarity_defect(es.eigenvectors) < 1e-10);
  REQUIRE_THROWS_AS(eig_hermitian(ComplexMatrix(ginibre(rng, 3, 3))), DomainError);
}

TEST_CASE("propagator: diagonal phases, identity at t = 0, group property") {
  ComplexMatrix h = ComplexMatrix::Zero(2, 2);
  h(1, 1) = 0.7;
  const UnitaryOperator u = propagator(HermitianOperator(h), 1.3);
  REQUIRE(std::abs(u.matrix()(0, 0) - 1.0) < 1e-14);
  REQUIRE(std::abs(u.matrix()(1, 1) - std::exp(std::complex<double>(0, -0.7 * 1.3))) < 1e-14);

  SplitMix64 rng(106);
  ComplexMatrix g = ginibre(rng, 4, 4);
  const HermitianOperator hr((g + ComplexMatrix(g.adjoint())) / 2.0);
  REQUIRE(max_abs(propagator(hr, 0.0).matrix() - identity(4)) < 1e-12);
  const ComplexMatrix round_trip = propagator(hr, 0.9).matrix() * propagator(hr, -0.9).matrix();
  REQUIRE(max_abs(round_trip - identity(4)) < 1e-10);
}

TEST_CASE("propagator conjugation preserves spectrum and trace") {
  SplitMix64 rng(107);
  const DensityMatrix rho = random_density_matrix(rng, 4);
  ComplexMatrix g = ginibre(rng, 4, 4);
  const UnitaryOperator u = propagator(HermitianOperator((g + ComplexMatrix(g.adjoint())) / 2.0), 2.1);
  const ComplexMatrix sigma = conjugate_by(u.matrix(), rho.matrix());
  REQUIRE(std::abs(sigma.trace() - std::complex<double>(1.0, 0.0)) < 1e-12);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> e1(rho.matrix(), Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> e2((sigma + ComplexMatrix(sigma.adjoint())) / 2.0,
                                                  Eigen::EigenvaluesOnly);
  REQUIRE((e1.eigenvalues() - e2.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("trace distance: coincidence, orthogonal states, spectral oracle") {
  SplitMix64 rng(108);
  const DensityMatrix rho = random_density_matrix(rng, 3);
  REQUIRE(trace_distance(rho, rho) == 0.0);

  const DensityMatrix p0(basis_projector(2, 0));
  const DensityMatrix p1(basis_projector(2, 1));
  REQUIRE(trace_distance(p0, p1) == Catch::Approx(1.0));

  const DensityMatrix a = random_density_matrix(rng, 4);
  const DensityMatrix b = random_density_matrix(rng, 4);
  const double d = trace_distance(a, b);
  REQUIRE(d >= 0.0);
  REQUIRE(d <= 1.0 + 1e-12);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.matrix() - b.matrix(),
                                                  Eigen::EigenvaluesOnly);
  REQUIRE(d == Catch::Approx(0.5 * es.eigenvalues().cwiseAbs().sum()));
  REQUIRE_THROWS_AS(trace_distance(p0, rho), DomainError);
}

TEST_CASE("type invariants reject malformed inputs") {
  SplitMix64 rng(109);
  REQUIRE_THROWS_AS(HermitianOperator(ginibre(rng, 3, 3)), DomainError);
  REQUIRE_THROWS_AS(UnitaryOperator(ginibre(rng, 3, 3)), DomainError);
  REQUIRE_THROWS_AS(DensityMatrix(identity(2)), DomainError);        // trace 2
  REQUIRE_THROWS_AS(DensityMatrix(-1.0 * identity(1)), DomainError);  // negative
  REQUIRE_NOTHROW(UnitaryOperator(haar_unitary(rng, 5)));
}
