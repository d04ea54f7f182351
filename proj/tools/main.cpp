// aeflow command line: scenario runs, parameter sweeps, verification suites.
// Emits CSV/JSON data with 17-significant-digit cells plus a JSON run manifest.

#include "aeflow/catalysis.hpp"
#include "aeflow/entropy.hpp"
#include "aeflow/io.hpp"
#include "aeflow/model.hpp"
#include "aeflow/optimal_flow.hpp"
#include "aeflow/variational_bound.hpp"
#include "aeflow/verify.hpp"
#include "aeflow/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

struct RunConfig {
  std::string scenario = "optimal";
  double lambda = 0.3;
  double theta = 0.0;
  double beta_a = 2.0;
  double beta_b = 1.8;
  double g = 0.1;
  double epsilon = 1.0;
  aeflow::Index n_fock = 3;
  double tau_min = 0.05;   // units of 1/g
  double tau_max = 20.0;   // units of 1/g
  aeflow::Index tau_points = 400;
  aeflow::Index refine_iters = 40;
  aeflow::Index grid = 25;
  std::uint64_t seed = 20240817;
  std::string out;
  std::string format = "csv";
  aeflow::Index threads = 0;
  double degeneracy_tol = aeflow::tol::degeneracy;
  bool inject_fault = false;
};

void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j = json::parse(in);
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("scenario", cfg.scenario);
  get("lambda", cfg.lambda);
  get("theta", cfg.theta);
  get("beta_a", cfg.beta_a);
  get("beta_b", cfg.beta_b);
  get("g", cfg.g);
  get("epsilon", cfg.epsilon);
  get("n_fock", cfg.n_fock);
  get("tau_min", cfg.tau_min);
  get("tau_max", cfg.tau_max);
  get("tau_points", cfg.tau_points);
  get("refine_iters", cfg.refine_iters);
  get("grid", cfg.grid);
  get("seed", cfg.seed);
  get("out", cfg.out);
  get("format", cfg.format);
  get("threads", cfg.threads);
  get("degeneracy_tol", cfg.degeneracy_tol);
}

json config_echo(const RunConfig& cfg) {
  return json{{"scenario", cfg.scenario},
              {"lambda", cfg.lambda},
              {"theta", cfg.theta},
              {"beta_a", cfg.beta_a},
              {"beta_b", cfg.beta_b},
              {"g", cfg.g},
              {"epsilon", cfg.epsilon},
              {"n_fock", cfg.n_fock},
              {"tau_min", cfg.tau_min},
              {"tau_max", cfg.tau_max},
              {"tau_points", cfg.tau_points},
              {"refine_iters", cfg.refine_iters},
              {"grid", cfg.grid},
              {"seed", cfg.seed},
              {"out", cfg.out},
              {"format", cfg.format},
              {"threads", cfg.threads},
              {"degeneracy_tol", cfg.degeneracy_tol}};
}

std::string default_out(const RunConfig& cfg) {
  if (!cfg.out.empty()) return cfg.out;
  return cfg.scenario + (cfg.format == "json" ? ".json" : ".csv");
}

void write_data(const RunConfig& cfg, const std::string& path, const aeflow::Table& table) {
  aeflow::write_file(path,
                     cfg.format == "json" ? aeflow::to_json_rows(table) : aeflow::to_csv(table));
}

void write_manifest(const RunConfig& cfg, const std::string& data_path,
                    const json& residuals, double wall_seconds) {
  json manifest{{"schema_version", 1},
                {"config", config_echo(cfg)},
                {"residuals", residuals},
                {"wall_time_seconds", wall_seconds},
                {"versions", {{"aeflow", aeflow::k_version}, {"eigen", aeflow::eigen_version()}}}};
  aeflow::write_file(data_path + ".manifest.json", manifest.dump(2) + "\n");
}

aeflow::SweepConfig sweep_config_from(const RunConfig& cfg) {
  aeflow::SweepConfig sc;
  sc.lambda_grid = aeflow::SweepConfig::linspace(0.0, 1.0, cfg.grid);
  sc.theta_grid = aeflow::SweepConfig::linspace(0.0, 1.0, cfg.grid);
  sc.epsilon = cfg.epsilon;
  sc.g = cfg.g;
  sc.beta_a = cfg.beta_a;
  sc.beta_b = cfg.beta_b;
  sc.n_fock = cfg.n_fock;
  sc.gtau_min = cfg.tau_min;
  sc.gtau_max = cfg.tau_max;
  sc.tau_points = cfg.tau_points;
  sc.refine_iters = cfg.refine_iters;
  sc.degeneracy_tol = cfg.degeneracy_tol;
  sc.with_bound = true;
  return sc;
}

aeflow::DensityMatrix state_from(const RunConfig& cfg) {
  aeflow::CorrelatedStateParams p{cfg.lambda, cfg.theta, cfg.beta_a, cfg.beta_b, cfg.epsilon};
  return aeflow::rho_lambda_theta(p);
}

int run_optimal(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const aeflow::CompositeSystem ab = aeflow::two_qubit_system(cfg.epsilon);
  const aeflow::BlockStructure blocks = aeflow::degenerate_blocks(ab, cfg.degeneracy_tol);
  const aeflow::DensityMatrix rho = state_from(cfg);
  const aeflow::OptimalFlowResult star = aeflow::optimal_energy_preserving(rho, ab, blocks);
  const aeflow::OptimalFlowResult arb = aeflow::optimal_arbitrary_unitary(rho, ab);

  const aeflow::HermitianOperator hq = aeflow::qubit_hamiltonian(cfg.epsilon);
  const double beta_eff_a = aeflow::effective_inverse_temperature(
      aeflow::DensityMatrix(ab.marginal(rho.matrix(), 0)), hq);
  const double beta_eff_b = aeflow::effective_inverse_temperature(
      aeflow::DensityMatrix(ab.marginal(rho.matrix(), 1)), hq);

  aeflow::Table table;
  table.columns = {"lambda",          "theta",           "dE_star", "dE_arbitrary",
                   "q_star_ground",   "q_star_excited",  "beta_a_nominal",
                   "beta_b_nominal",  "beta_a_effective", "beta_b_effective"};
  table.rows = {{cfg.lambda, cfg.theta, star.delta_e_a, arb.delta_e_a, star.occupations(0),
                 star.occupations(1), cfg.beta_a, cfg.beta_b, beta_eff_a, beta_eff_b}};
  const std::string path = default_out(cfg);
  write_data(cfg, path, table);

  const aeflow::ComplexMatrix commutator =
      star.unitary.matrix() * ab.h0().matrix() - ab.h0().matrix() * star.unitary.matrix();
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, path,
                 json{{"unitarity_defect", aeflow::unitarity_defect(star.unitary.matrix())},
                      {"h0_commutator_max", aeflow::max_abs(commutator)}},
                 wall);
  std::cout << "optimal: dE_star = " << aeflow::format_cell(star.delta_e_a) << " -> " << path
            << "\n";
  return 0;
}

int run_catalytic(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const aeflow::CatalyticProtocol protocol(cfg.epsilon, cfg.g, cfg.n_fock, cfg.degeneracy_tol);
  const aeflow::DensityMatrix rho = state_from(cfg);
  const aeflow::SweepConfig sc = sweep_config_from(cfg);
  const aeflow::ProtocolResult result = aeflow::optimize_tau(rho, protocol, sc);

  aeflow::Table table;
  table.columns = {"gtau", "dE_A", "catalyst_residual", "energy_residual", "fixed_space_dim"};
  double worst_cat = 0.0, worst_energy = 0.0;
  for (const aeflow::TauSample& s : result.trace) {
    table.rows.push_back({s.tau * cfg.g, s.delta_e_a, s.catalyst_residual, s.energy_residual,
                          static_cast<double>(s.fixed_space_dim)});
    worst_cat = std::max(worst_cat, s.catalyst_residual);
    worst_energy = std::max(worst_energy, s.energy_residual);
  }
  const std::string path = default_out(cfg);
  write_data(cfg, path, table);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, path,
                 json{{"dE_star", result.delta_e_star},
                      {"dE_catalytic", result.delta_e_catalytic},
                      {"gtau_star", result.tau_star * cfg.g},
                      {"worst_catalyst_residual", worst_cat},
                      {"worst_energy_residual", worst_energy}},
                 wall);
  std::cout << "catalytic: dE_cat = " << aeflow::format_cell(result.delta_e_catalytic)
            << " at gtau = " << aeflow::format_cell(result.tau_star * cfg.g) << " -> " << path
            << "\n";
  return 0;
}

int run_sweep(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const aeflow::SweepConfig sc = sweep_config_from(cfg);
  const std::vector<aeflow::SweepRecord> records = aeflow::sweep_lambda_theta(sc, cfg.threads);

  aeflow::Table table;
  table.columns = {"lambda",    "theta",           "dE_star",         "dE_cat", "tau_star",
                   "advantage", "catalyst_residual", "energy_residual", "bound"};
  double worst_cat = 0.0, worst_energy = 0.0, min_advantage = 0.0;
  long failures = 0;
  std::vector<aeflow::BoundOrderingRow> rows;
  for (const aeflow::SweepRecord& r : records) {
    table.rows.push_back({r.lambda, r.theta, r.de_star, r.de_cat, r.gtau_star, r.advantage,
                          r.catalyst_residual, r.energy_residual, r.bound});
    if (!r.ok) {
      ++failures;
      continue;
    }
    worst_cat = std::max(worst_cat, r.catalyst_residual);
    worst_energy = std::max(worst_energy, r.energy_residual);
    min_advantage = std::min(min_advantage, r.advantage);
    rows.push_back({r.lambda, r.theta, r.de_star, r.de_cat, r.bound});
  }
  const aeflow::BoundOrderingReport ordering = aeflow::verify_bound_ordering(rows);

  const std::string path = default_out(cfg);
  write_data(cfg, path, table);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, path,
                 json{{"grid_points", records.size()},
                      {"failed_points", failures},
                      {"worst_catalyst_residual", worst_cat},
                      {"worst_energy_residual", worst_energy},
                      {"min_advantage", min_advantage},
                      {"bound_ordering_worst_slack", ordering.worst_slack},
                      {"bound_ordering_pass", ordering.pass}},
                 wall);
  std::cout << "sweep: " << records.size() << " grid points (" << failures << " failed) -> "
            << path << "\n";
  return failures == 0 ? 0 : 2;
}

int run_bound(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const aeflow::CompositeSystem ab = aeflow::two_qubit_system(cfg.epsilon);
  const aeflow::DensityMatrix rho = state_from(cfg);
  const aeflow::BoundResult bound = aeflow::catalytic_bound(rho, ab);
  if (!bound.converged) {
    std::cerr << "bound: root finder did not converge; best feasible point reported\n";
  }

  aeflow::Table table;
  table.columns = {"lambda", "theta",           "dE_bound",        "alpha",
                   "lambda_multiplier", "entropy_residual", "energy_residual",
                   "entropy_binding"};
  table.rows = {{cfg.lambda, cfg.theta, bound.de_bound, bound.alpha, bound.lambda,
                 bound.entropy_residual, bound.energy_residual,
                 bound.entropy_binding ? 1.0 : 0.0}};
  const std::string path = default_out(cfg);
  write_data(cfg, path, table);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, path,
                 json{{"entropy_residual", bound.entropy_residual},
                      {"energy_residual", bound.energy_residual},
                      {"converged", bound.converged}},
                 wall);
  std::cout << "bound: dE_bound = " << aeflow::format_cell(bound.de_bound) << " -> " << path
            << "\n";
  return bound.converged ? 0 : 2;
}

int run_toy(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const aeflow::ClassicalToyModel toy = aeflow::make_classical_toy(cfg.epsilon);
  const aeflow::ProtocolStep step = aeflow::run_classical_toy(toy);
  const aeflow::ComplexMatrix sigma_a = toy.ab.marginal(step.sigma_ab_prime.matrix(), 0);
  const aeflow::ComplexMatrix sigma_b = toy.ab.marginal(step.sigma_ab_prime.matrix(), 1);

  aeflow::Table table;
  table.columns = {"dE_A",           "sigma_a_ground", "sigma_a_excited", "sigma_b_ground",
                   "sigma_b_excited", "catalyst_residual", "energy_residual"};
  table.rows = {{step.delta_e_a, sigma_a(0, 0).real(), sigma_a(1, 1).real(),
                 sigma_b(0, 0).real(), sigma_b(1, 1).real(), step.catalyst_residual,
                 step.energy_residual}};
  const std::string path = default_out(cfg);
  write_data(cfg, path, table);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, path,
                 json{{"catalyst_residual", step.catalyst_residual},
                      {"energy_residual", step.energy_residual},
                      {"fixed_space_dim", step.catalyst.fixed_space_dim}},
                 wall);
  std::cout << "toy: dE_A = " << aeflow::format_cell(step.delta_e_a) << " -> " << path << "\n";
  return 0;
}

int run_verify(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  aeflow::VerifyOptions options;
  options.seed = cfg.seed;
  options.inject_energy_violating_unitaries = cfg.inject_fault;
  const std::vector<aeflow::PropertyReport> reports = aeflow::run_verification_suite(options);

  json props = json::array();
  bool all_pass = true;
  for (const aeflow::PropertyReport& r : reports) {
    props.push_back({{"property", r.name},
                     {"trials", r.trials},
                     {"worst_residual", r.worst_residual},
                     {"tolerance", r.tolerance},
                     {"pass", r.pass}});
    all_pass = all_pass && r.pass;
    std::cerr << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  trials=" << r.trials
              << "  worst=" << aeflow::format_cell(r.worst_residual) << "\n";
  }
  json report{{"schema_version", 1},
              {"seed", cfg.seed},
              {"fault_injected", cfg.inject_fault},
              {"properties", props},
              {"pass", all_pass}};
  std::cout << report.dump(2) << "\n";
  if (!cfg.out.empty()) aeflow::write_file(cfg.out, report.dump(2) + "\n");
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!cfg.out.empty()) write_manifest(cfg, cfg.out, json{{"pass", all_pass}}, wall);
  std::cerr << (all_pass ? "verify: all properties pass\n" : "verify: FAILURES present\n");
  return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;

  // The config file provides defaults; explicit flags override it.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        apply_config_file(argv[i + 1], cfg);
      } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
      }
    }
  }

  CLI::App app{"anomalous energy flow toolkit"};
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags override it)");
  app.add_option("--scenario", cfg.scenario, "optimal|catalytic|sweep|bound|toy|verify")
      ->check(CLI::IsMember({"optimal", "catalytic", "sweep", "bound", "toy", "verify"}));
  app.add_option("--lambda", cfg.lambda, "phi+ weight of the correlated state");
  app.add_option("--theta", cfg.theta, "psi- weight of the correlated state");
  app.add_option("--beta-a", cfg.beta_a, "inverse temperature of A (colder)");
  app.add_option("--beta-b", cfg.beta_b, "inverse temperature of B");
  app.add_option("--g", cfg.g, "cavity coupling in units of epsilon");
  app.add_option("--epsilon", cfg.epsilon, "qubit gap (energy unit)");
  app.add_option("--n-fock", cfg.n_fock, "cavity Fock levels")->check(CLI::Range(2, 64));
  app.add_option("--tau-min", cfg.tau_min, "scan start, units of 1/g");
  app.add_option("--tau-max", cfg.tau_max, "scan end, units of 1/g");
  app.add_option("--tau-points", cfg.tau_points, "coarse scan points");
  app.add_option("--refine-iters", cfg.refine_iters, "golden-section refinement iterations");
  app.add_option("--grid", cfg.grid, "sweep grid size per axis");
  app.add_option("--seed", cfg.seed, "seed for sampled verification oracles");
  app.add_option("--out", cfg.out, "output path (default <scenario>.<format>)");
  app.add_option("--format", cfg.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", cfg.threads, "sweep worker threads (0 = hardware)");
  app.add_option("--degeneracy-tol", cfg.degeneracy_tol, "relative block-grouping tolerance");
  app.add_flag("--inject-fault", cfg.inject_fault,
               "verify only: sample energy-violating unitaries (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  try {
    if (cfg.scenario == "optimal") return run_optimal(cfg);
    if (cfg.scenario == "catalytic") return run_catalytic(cfg);
    if (cfg.scenario == "sweep") return run_sweep(cfg);
    if (cfg.scenario == "bound") return run_bound(cfg);
    if (cfg.scenario == "toy") return run_toy(cfg);
    if (cfg.scenario == "verify") return run_verify(cfg);
    std::cerr << "config error: unknown scenario " << cfg.scenario << "\n";
    return 1;
  } catch (const aeflow::DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const aeflow::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
