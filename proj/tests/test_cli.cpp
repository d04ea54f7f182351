#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

const std::string k_cli = AEFLOW_CLI_PATH;

int run_cli(const std::string& args) {
  const std::string cmd = k_cli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::istringstream cs(line);
    std::string cell;
    while (std::getline(cs, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

fs::path temp_dir() {
  const fs::path dir = fs::current_path() / "cli_test_tmp";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("cli: toy scenario emits the exact reference values") {
  const fs::path out = temp_dir() / "toy.csv";
  REQUIRE(run_cli("--scenario toy --out " + out.string()) == 0);

  const auto rows = parse_csv(slurp(out));
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0][0] == "dE_A");
  REQUIRE(std::stod(rows[1][0]) == Catch::Approx(-0.25).margin(1e-12));

  const nlohmann::json manifest = nlohmann::json::parse(slurp(out.string() + ".manifest.json"));
  REQUIRE(manifest.at("schema_version").get<int>() == 1);
  REQUIRE(manifest.at("config").at("scenario").get<std::string>() == "toy");
  REQUIRE(manifest.contains("residuals"));
  REQUIRE(manifest.contains("wall_time_seconds"));
}

TEST_CASE("cli: sweep header is stable and the (0,0) grid is inert") {
  const fs::path out = temp_dir() / "sweep_one.csv";
  REQUIRE(run_cli("--scenario sweep --grid 1 --tau-points 40 --refine-iters 8 --out " +
                  out.string()) == 0);
  const auto rows = parse_csv(slurp(out));
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0] ==
          std::vector<std::string>{"lambda", "theta", "dE_star", "dE_cat", "tau_star",
                                   "advantage", "catalyst_residual", "energy_residual",
                                   "bound"});
  REQUIRE(std::stod(rows[1][2]) == Catch::Approx(0.0).margin(1e-10));  // dE_star
  REQUIRE(std::stod(rows[1][3]) == Catch::Approx(0.0).margin(1e-10));  // dE_cat
}

TEST_CASE("cli: identical config and seed give byte-identical output") {
  const fs::path out1 = temp_dir() / "sweep_a.csv";
  const fs::path out2 = temp_dir() / "sweep_b.csv";
  const std::string args = "--scenario sweep --grid 3 --tau-points 40 --refine-iters 8 "
                           "--seed 7 --threads 2 --out ";
  REQUIRE(run_cli(args + out1.string()) == 0);
  REQUIRE(run_cli(args + out2.string()) == 0);
  REQUIRE(slurp(out1) == slurp(out2));
}

TEST_CASE("cli: json data format carries the same cells") {
  const fs::path out = temp_dir() / "toy.json";
  REQUIRE(run_cli("--scenario toy --format json --out " + out.string()) == 0);
  const nlohmann::json rows = nlohmann::json::parse(slurp(out));
  REQUIRE(rows.is_array());
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0].at("dE_A").get<double>() == Catch::Approx(-0.25).margin(1e-12));
}

TEST_CASE("cli: config file provides defaults, flags override") {
  const fs::path cfg = temp_dir() / "run.json";
  {
    std::ofstream out(cfg);
    out << R"({"scenario": "toy", "epsilon": 2.0})";
  }
  const fs::path out = temp_dir() / "toy_scaled.csv";
  REQUIRE(run_cli("--config " + cfg.string() + " --out " + out.string()) == 0);
  auto rows = parse_csv(slurp(out));
  REQUIRE(std::stod(rows[1][0]) == Catch::Approx(-0.5).margin(1e-12));  // -eps/4, eps = 2

  const fs::path out2 = temp_dir() / "toy_flag.csv";
  REQUIRE(run_cli("--config " + cfg.string() + " --epsilon 1.0 --out " + out2.string()) == 0);
  rows = parse_csv(slurp(out2));
  REQUIRE(std::stod(rows[1][0]) == Catch::Approx(-0.25).margin(1e-12));
}

TEST_CASE("cli: errors map to the documented exit codes") {
  REQUIRE(run_cli("--scenario nonsense") == 1);
  REQUIRE(run_cli("--scenario optimal --lambda 0.9 --theta 0.9") == 1);
  REQUIRE(run_cli("--no-such-flag") == 1);
}

TEST_CASE("cli: optimal scenario reports nominal and effective temperatures") {
  const fs::path out = temp_dir() / "optimal.csv";
  REQUIRE(run_cli("--scenario optimal --lambda 0 --theta 1 --out " + out.string()) == 0);
  const auto rows = parse_csv(slurp(out));
  REQUIRE(rows[0][2] == "dE_star");
  REQUIRE(rows[0][8] == "beta_a_effective");
  REQUIRE(std::stod(rows[1][2]) == Catch::Approx(-0.5).margin(1e-12));
  REQUIRE(std::stod(rows[1][8]) == Catch::Approx(0.0).margin(1e-12));  // psi- marginal is I/2
}

TEST_CASE("cli: bound scenario solves the pure Bell case exactly") {
  const fs::path out = temp_dir() / "bound.csv";
  REQUIRE(run_cli("--scenario bound --lambda 1 --theta 0 --out " + out.string()) == 0);
  const auto rows = parse_csv(slurp(out));
  REQUIRE(rows[0][2] == "dE_bound");
  REQUIRE(std::stod(rows[1][2]) == Catch::Approx(-0.5).margin(1e-7));
  REQUIRE(std::stod(rows[1][7]) == 0.0);  // entropy constraint not binding for a pure state
}

TEST_CASE("cli: catalytic scenario writes one row per scanned tau") {
  const fs::path out = temp_dir() / "catalytic.csv";
  REQUIRE(run_cli("--scenario catalytic --lambda 0.5 --theta 0 --tau-points 25 "
                  "--refine-iters 4 --out " +
                  out.string()) == 0);
  const auto rows = parse_csv(slurp(out));
  REQUIRE(rows.size() == 26);
  REQUIRE(rows[0][0] == "gtau");
}
