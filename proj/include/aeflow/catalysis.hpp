#pragma once

#include "aeflow/entropy.hpp"
#include "aeflow/linalg.hpp"
#include "aeflow/model.hpp"
#include "aeflow/optimal_flow.hpp"
#include "aeflow/types.hpp"
#include "aeflow/variational_bound.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace aeflow {

// Column-major vectorization: vec(M)(r + d*c) = M(r, c).
inline ComplexVector vec(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

inline ComplexMatrix unvec(const ComplexVector& v, Index d) {
  return Eigen::Map<const ComplexMatrix>(v.data(), d, d);
}

/// Matrix of the linear map omega -> Tr_AB[u (rho_AB x omega) u^dag] acting on
/// vectorized d_C x d_C operators. Column k + d_C*l holds the image of |k><l|.
inline ComplexMatrix reduced_channel_matrix(const DensityMatrix& rho_ab,
                                            const UnitaryOperator& u, Index d_c) {
  const Index d_ab = rho_ab.dim();
  if (u.dim() != d_ab * d_c)
    throw DomainError("reduced_channel_matrix: dimensions do not factor as d_AB * d_C");
  const std::vector<Index> dims{d_ab, d_c};
  ComplexMatrix t(d_c * d_c, d_c * d_c);
  for (Index l = 0; l < d_c; ++l) {
    for (Index k = 0; k < d_c; ++k) {
      ComplexMatrix e = ComplexMatrix::Zero(d_c, d_c);
      e(k, l) = 1.0;
      const ComplexMatrix image =
          partial_trace(conjugate_by(u.matrix(), tensor_product(rho_ab.matrix(), e)), dims, {1});
      t.col(k + d_c * l) = vec(image);
    }
  }
  return t;
}

struct CatalystSolution {
  DensityMatrix omega;
  double residual = 0.0;      // trace_distance(omega, channel(omega))
  Index fixed_space_dim = 0;  // eigenvalue-1 multiplicity of the channel
  double tau = 0.0;
  bool unique = true;
};

namespace detail {

inline DensityMatrix project_to_state(ComplexMatrix x, double clip_tol) {
  x = (x + ComplexMatrix(x.adjoint())) / 2.0;
  const std::complex<double> tr = x.trace();
  if (std::abs(tr) < 1e-10)
    throw NumericalError("fixed_point_catalyst: traceless candidate for the fixed point");
  x /= tr;
  x = (x + ComplexMatrix(x.adjoint())) / 2.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(x);
  RealVector w = es.eigenvalues();
  for (Index i = 0; i < w.size(); ++i) {
    if (w(i) < -clip_tol)
      throw NumericalError("fixed_point_catalyst: candidate not positive semidefinite");
    w(i) = std::max(w(i), 0.0);
  }
  w /= w.sum();
  ComplexMatrix rho =
      es.eigenvectors() * w.cast<std::complex<double>>().asDiagonal() * es.eigenvectors().adjoint();
  rho = (rho + ComplexMatrix(rho.adjoint())) / 2.0;
  return DensityMatrix(std::move(rho));
}

}  // namespace detail

/// Fixed point of the reduced channel, from the eigenvalue-1 eigenspace of its
/// matrix. A unique eigenvector is normalized directly; a degenerate fixed
/// space yields the spectral-projector image of the maximally mixed state (the
/// maximum-entropy representative) and is flagged non-unique.
inline CatalystSolution fixed_point_catalyst(const DensityMatrix& rho_ab,
                                             const UnitaryOperator& u, Index d_c,
                                             double tau = 0.0) {
  const ComplexMatrix t = reduced_channel_matrix(rho_ab, u, d_c);
  Eigen::ComplexEigenSolver<ComplexMatrix> es(t);
  if (es.info() != Eigen::Success)
    throw NumericalError("fixed_point_catalyst: channel eigensolver failed");

  double best = std::numeric_limits<double>::infinity();
  Index fixed_dim = 0;
  Index best_index = 0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double dist = std::abs(es.eigenvalues()(i) - std::complex<double>(1.0, 0.0));
    if (dist < best) {
      best = dist;
      best_index = i;
    }
    if (dist <= 1e-9) ++fixed_dim;
  }
  if (best > 1e-6)
    throw NumericalError("fixed_point_catalyst: no channel eigenvalue near 1");
  if (fixed_dim == 0) fixed_dim = 1;  // eigenvalue within (1e-9, 1e-6]: treat as simple

  CatalystSolution out{DensityMatrix(identity(d_c) / static_cast<double>(d_c)), 0.0,
                       fixed_dim, tau, fixed_dim == 1};
  if (fixed_dim == 1) {
    out.omega = detail::project_to_state(unvec(es.eigenvectors().col(best_index), d_c), 1e-8);
  } else {
    // Spectral projector onto the eigenvalue-1 cluster applied to 1/d_C.
    ComplexVector sel = ComplexVector::Zero(es.eigenvalues().size());
    for (Index i = 0; i < es.eigenvalues().size(); ++i)
      if (std::abs(es.eigenvalues()(i) - std::complex<double>(1.0, 0.0)) <= 1e-9)
        sel(i) = 1.0;
    const ComplexMatrix& v = es.eigenvectors();
    const ComplexVector mixed = vec(identity(d_c) / static_cast<double>(d_c));
    const ComplexVector projected = v * sel.asDiagonal() * v.partialPivLu().solve(mixed);
    out.omega = detail::project_to_state(unvec(projected, d_c), 1e-7);
  }

  const ComplexMatrix image = unvec(t * vec(out.omega.matrix()), d_c);
  out.residual = trace_distance_raw(out.omega.matrix(), image);
  if (out.residual > tol::fixed_point)
    throw NumericalError("fixed_point_catalyst: residual " + std::to_string(out.residual) +
                         " above tolerance");
  return out;
}

/// One full run of the two-step protocol: (1) couple AB to the fixed-point
/// catalyst through the joint unitary, (2) apply the optimal energy-preserving
/// unitary for the post-interaction AB state.
struct ProtocolStep {
  CatalystSolution catalyst;
  DensityMatrix sigma_ab;        // Tr_C after step 1
  DensityMatrix sigma_ab_prime;  // after step 2
  double delta_e_a = 0.0;
  double catalyst_residual = 0.0;
  double energy_residual = 0.0;  // worst of step-1 (ABC) and step-2 (AB) energy drift
};

inline ProtocolStep run_catalytic_step(const DensityMatrix& rho_ab,
                                       const UnitaryOperator& u_joint,
                                       const CompositeSystem& abc,
                                       const CompositeSystem& ab,
                                       const BlockStructure& ab_blocks, double tau = 0.0) {
  const Index d_c = abc.local_dim(2);
  CatalystSolution catalyst = fixed_point_catalyst(rho_ab, u_joint, d_c, tau);

  const ComplexMatrix joint0 = tensor_product(rho_ab.matrix(), catalyst.omega.matrix());
  const ComplexMatrix joint1 = conjugate_by(u_joint.matrix(), joint0);
  const std::vector<Index> dims{ab.local_dim(0), ab.local_dim(1), d_c};

  ComplexMatrix sab = partial_trace(joint1, dims, {0, 1});
  sab = (sab + ComplexMatrix(sab.adjoint())) / 2.0;
  DensityMatrix sigma_ab(std::move(sab));
  const ComplexMatrix sigma_c = partial_trace(joint1, dims, {2});

  const OptimalFlowResult flow = optimal_energy_preserving(sigma_ab, ab, ab_blocks);
  ComplexMatrix sprime = conjugate_by(flow.unitary.matrix(), sigma_ab.matrix());
  sprime = (sprime + ComplexMatrix(sprime.adjoint())) / 2.0;
  DensityMatrix sigma_ab_prime(std::move(sprime));

  const double e_step1 =
      std::abs(expectation(abc.h0().matrix(), joint1) - expectation(abc.h0().matrix(), joint0));
  const double e_step2 = std::abs(expectation(ab.h0().matrix(), sigma_ab_prime.matrix()) -
                                  expectation(ab.h0().matrix(), sigma_ab.matrix()));

  ProtocolStep out{std::move(catalyst), std::move(sigma_ab), std::move(sigma_ab_prime),
                   0.0, 0.0, std::max(e_step1, e_step2)};
  out.delta_e_a =
      ab.local_energy(out.sigma_ab_prime.matrix(), 0) - ab.local_energy(rho_ab.matrix(), 0);
  out.catalyst_residual =
      trace_distance_raw(out.catalyst.omega.matrix(), sigma_c);
  return out;
}

/// Sweep and scan configuration. Times are in units of 1/g (the stored values
/// are g*tau); energies in units of epsilon unless overridden.
struct SweepConfig {
  std::vector<double> lambda_grid;
  std::vector<double> theta_grid;
  double epsilon = 1.0;
  double g = 0.1;
  double beta_a = 2.0;
  double beta_b = 1.8;
  Index n_fock = 3;
  double gtau_min = 0.05;
  double gtau_max = 20.0;
  Index tau_points = 400;
  Index refine_iters = 40;
  double degeneracy_tol = tol::degeneracy;
  bool with_bound = true;

  void validate() const {
    if (lambda_grid.empty() || theta_grid.empty())
      throw DomainError("SweepConfig: empty parameter grid");
    if (!(gtau_max > gtau_min) || !(gtau_min > 0.0))
      throw DomainError("SweepConfig: need gtau_max > gtau_min > 0");
    if (tau_points < 2) throw DomainError("SweepConfig: need at least 2 tau points");
    if (n_fock < 2) throw DomainError("SweepConfig: n_fock must be >= 2");
    if (!(g > 0.0)) throw DomainError("SweepConfig: g must be > 0");
  }

  static std::vector<double> linspace(double lo, double hi, Index n) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    if (n == 1) {
      out.push_back(lo);
      return out;
    }
    for (Index i = 0; i < n; ++i)
      out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
  }
};

/// Shared, immutable protocol engine: the joint Hamiltonian is diagonalized
/// once and U(tau) is assembled per sample. Safe to use from several sweep
/// workers concurrently.
class CatalyticProtocol {
 public:
  CatalyticProtocol(double epsilon, double g, Index n_fock,
                    double degeneracy_tol = tol::degeneracy)
      : model_(tavis_cummings(epsilon, g, n_fock)),
        ab_(two_qubit_system(epsilon)),
        ab_blocks_(degenerate_blocks(ab_, degeneracy_tol)),
        evolution_(eig_hermitian(
            HermitianOperator(model_.h0().matrix() + model_.v.matrix()))) {}

  const CompositeSystem& ab() const { return ab_; }
  const CompositeSystem& abc() const { return model_.system; }
  const BlockStructure& ab_blocks() const { return ab_blocks_; }
  const TavisCummingsModel& model() const { return model_; }

  UnitaryOperator unitary_at(double tau) const {
    ComplexVector phases(evolution_.eigenvalues.size());
    for (Index i = 0; i < phases.size(); ++i)
      phases(i) = std::exp(std::complex<double>(0.0, -evolution_.eigenvalues(i) * tau));
    return UnitaryOperator(evolution_.eigenvectors * phases.asDiagonal() *
                           evolution_.eigenvectors.adjoint());
  }

  ProtocolStep step(const DensityMatrix& rho_ab, double tau) const {
    return run_catalytic_step(rho_ab, unitary_at(tau), model_.system, ab_, ab_blocks_, tau);
  }

 private:
  TavisCummingsModel model_;
  CompositeSystem ab_;
  BlockStructure ab_blocks_;
  EigenSystem evolution_;
};

struct TauSample {
  double tau = 0.0;  // absolute time
  double delta_e_a = 0.0;
  double catalyst_residual = 0.0;
  double energy_residual = 0.0;
  Index fixed_space_dim = 0;
};

struct ProtocolResult {
  double tau_star = 0.0;           // 0 marks the do-nothing (tau -> 0) limit
  double delta_e_at_tau_star = 0.0;
  double delta_e_catalytic = 0.0;  // min over the scan, never above delta_e_star
  double delta_e_star = 0.0;       // optimal flow without the catalyst
  double catalyst_residual = 0.0;
  double energy_residual = 0.0;
  std::vector<TauSample> trace;
  std::optional<ProtocolStep> best_step;
};

/// Protocol with a tau-independent joint unitary; the classical toy scenario
/// runs through the same scan machinery with this engine.
class ConstantUnitaryProtocol {
 public:
  ConstantUnitaryProtocol(UnitaryOperator u, CompositeSystem abc, CompositeSystem ab,
                          double degeneracy_tol = tol::degeneracy)
      : u_(std::move(u)),
        abc_(std::move(abc)),
        ab_(std::move(ab)),
        ab_blocks_(degenerate_blocks(ab_, degeneracy_tol)) {}

  const CompositeSystem& ab() const { return ab_; }
  const CompositeSystem& abc() const { return abc_; }
  const BlockStructure& ab_blocks() const { return ab_blocks_; }

  ProtocolStep step(const DensityMatrix& rho_ab, double tau) const {
    return run_catalytic_step(rho_ab, u_, abc_, ab_, ab_blocks_, tau);
  }

 private:
  UnitaryOperator u_;
  CompositeSystem abc_;
  CompositeSystem ab_;
  BlockStructure ab_blocks_;
};

/// Coarse scan over tau followed by golden-section refinement around the best
/// sample. The tau -> 0 limit (plain optimal unitary, no cavity interaction)
/// is always included as a candidate, and ties prefer the smaller tau.
template <class Protocol>
inline ProtocolResult optimize_tau(const DensityMatrix& rho_ab, const Protocol& protocol,
                                   const SweepConfig& config) {
  config.validate();
  const OptimalFlowResult base = optimal_energy_preserving(rho_ab, protocol.ab(),
                                                           protocol.ab_blocks());

  ProtocolResult out;
  out.delta_e_star = base.delta_e_a;
  out.tau_star = 0.0;
  out.delta_e_at_tau_star = base.delta_e_a;
  out.delta_e_catalytic = base.delta_e_a;

  auto consider = [&](double tau, const ProtocolStep& step) {
    const bool better = step.delta_e_a < out.delta_e_catalytic ||
                        (step.delta_e_a == out.delta_e_catalytic && tau < out.tau_star);
    if (better) {
      out.tau_star = tau;
      out.delta_e_at_tau_star = step.delta_e_a;
      out.delta_e_catalytic = step.delta_e_a;
      out.catalyst_residual = step.catalyst_residual;
      out.energy_residual = step.energy_residual;
      out.best_step = step;
    }
  };

  const std::vector<double> gtaus =
      SweepConfig::linspace(config.gtau_min, config.gtau_max, config.tau_points);
  out.trace.reserve(gtaus.size());
  Index best_scan_index = -1;
  double best_scan_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < gtaus.size(); ++i) {
    const double tau = gtaus[i] / config.g;
    const ProtocolStep step = protocol.step(rho_ab, tau);
    out.trace.push_back({tau, step.delta_e_a, step.catalyst_residual, step.energy_residual,
                         step.catalyst.fixed_space_dim});
    if (step.delta_e_a < best_scan_value) {
      best_scan_value = step.delta_e_a;
      best_scan_index = static_cast<Index>(i);
    }
    consider(tau, step);
  }

  if (best_scan_index >= 0 && config.refine_iters > 0) {
    const std::size_t b = static_cast<std::size_t>(best_scan_index);
    double lo = (b == 0) ? config.gtau_min : gtaus[b - 1];
    double hi = (b + 1 == gtaus.size()) ? config.gtau_max : gtaus[b + 1];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    ProtocolStep s1 = protocol.step(rho_ab, x1 / config.g);
    ProtocolStep s2 = protocol.step(rho_ab, x2 / config.g);
    consider(x1 / config.g, s1);
    consider(x2 / config.g, s2);
    for (Index it = 0; it < config.refine_iters; ++it) {
      if (s1.delta_e_a <= s2.delta_e_a) {
        hi = x2;
        x2 = x1;
        s2 = s1;
        x1 = hi - inv_phi * (hi - lo);
        s1 = protocol.step(rho_ab, x1 / config.g);
        consider(x1 / config.g, s1);
      } else {
        lo = x1;
        x1 = x2;
        s1 = s2;
        x2 = lo + inv_phi * (hi - lo);
        s2 = protocol.step(rho_ab, x2 / config.g);
        consider(x2 / config.g, s2);
      }
    }
  }
  return out;
}

/// Classically correlated three-qubit example: rho_AB mixes |00> and |11>
/// evenly, every local gap is epsilon, and an explicit permutation inside the
/// degenerate sectors of H0 moves energy from A to B while the maximally mixed
/// catalyst returns exactly.
struct ClassicalToyModel {
  CompositeSystem abc;
  CompositeSystem ab;
  DensityMatrix rho_ab;
  UnitaryOperator permutation;
  double epsilon = 1.0;
};

inline ClassicalToyModel make_classical_toy(double epsilon = 1.0) {
  const HermitianOperator hq = qubit_hamiltonian(epsilon);
  CompositeSystem abc({hq, hq, hq});
  CompositeSystem ab({hq, hq});

  ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
  rho(0, 0) = 0.5;
  rho(3, 3) = 0.5;

  // Basis |ijk> at index 4i + 2j + k. Cycle (|001> |010>) inside the
  // one-excitation sector and (|110> |011> |101>) inside the two-excitation
  // sector; identity elsewhere.
  ComplexMatrix u = ComplexMatrix::Zero(8, 8);
  u(0, 0) = u(4, 4) = u(7, 7) = 1.0;
  u(2, 1) = 1.0;  // |001> -> |010>
  u(1, 2) = 1.0;  // |010> -> |001>
  u(3, 6) = 1.0;  // |110> -> |011>
  u(5, 3) = 1.0;  // |011> -> |101>
  u(6, 5) = 1.0;  // |101> -> |110>

  return {std::move(abc), std::move(ab), DensityMatrix(std::move(rho)),
          UnitaryOperator(std::move(u)), epsilon};
}

inline ProtocolStep run_classical_toy(const ClassicalToyModel& toy) {
  const BlockStructure blocks = degenerate_blocks(toy.ab);
  return run_catalytic_step(toy.rho_ab, toy.permutation, toy.abc, toy.ab, blocks);
}

struct SweepRecord {
  double lambda = 0.0;
  double theta = 0.0;
  double de_star = 0.0;
  double de_cat = 0.0;
  double gtau_star = 0.0;  // tau_star in units of 1/g
  double advantage = 0.0;  // de_star - de_cat, >= 0 up to tolerance
  double catalyst_residual = 0.0;
  double energy_residual = 0.0;
  double bound = 0.0;
  bool ok = false;
  std::string error;
};

/// One record per admissible grid point (lambda + theta <= 1). Grid points are
/// independent work items distributed over `threads` workers; each worker
/// writes only its own slots, so the output order is fixed by the grid.
inline std::vector<SweepRecord> sweep_lambda_theta(const SweepConfig& config,
                                                   Index threads = 0) {
  config.validate();
  const CatalyticProtocol protocol(config.epsilon, config.g, config.n_fock,
                                   config.degeneracy_tol);

  std::vector<std::pair<double, double>> points;
  for (double lambda : config.lambda_grid)
    for (double theta : config.theta_grid)
      if (lambda + theta <= 1.0 + 1e-12) points.emplace_back(lambda, theta);

  std::vector<SweepRecord> records(points.size());
  std::atomic<std::size_t> cursor{0};

  auto worker = [&]() {
    for (std::size_t i = cursor.fetch_add(1); i < points.size(); i = cursor.fetch_add(1)) {
      SweepRecord& rec = records[i];
      rec.lambda = points[i].first;
      rec.theta = points[i].second;
      try {
        CorrelatedStateParams params{rec.lambda, rec.theta, config.beta_a, config.beta_b,
                                     config.epsilon};
        const DensityMatrix rho = rho_lambda_theta(params);
        const ProtocolResult result = optimize_tau(rho, protocol, config);
        rec.de_star = result.delta_e_star;
        rec.de_cat = result.delta_e_catalytic;
        rec.gtau_star = result.tau_star * config.g;
        rec.advantage = rec.de_star - rec.de_cat;
        rec.catalyst_residual = result.catalyst_residual;
        rec.energy_residual = result.energy_residual;
        if (config.with_bound)
          rec.bound = catalytic_bound(rho, protocol.ab()).de_bound;
        rec.ok = true;
      } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
        rec.de_star = rec.de_cat = rec.gtau_star = rec.advantage = rec.bound =
            std::numeric_limits<double>::quiet_NaN();
      }
    }
  };

  Index n_threads = threads > 0 ? threads
                                : static_cast<Index>(std::thread::hardware_concurrency());
  n_threads = std::max<Index>(1, std::min<Index>(n_threads, static_cast<Index>(points.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (Index t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return records;
}

}  // namespace aeflow
