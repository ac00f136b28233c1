#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "hcl/io.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const fs::path& log = {}) {
  std::string cmd = std::string(HCLAB_BIN) + " " + args;
  if (!log.empty()) cmd += " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "hclab_cli_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("well-formed text") {
    const auto kv = hcl::parse_config_text("L = 3\n# comment\nn=2\n\nmu_T = 0.5 # inline\n");
    CHECK(kv.at("L") == "3");
    CHECK(kv.at("n") == "2");
    CHECK(kv.at("mu_T") == "0.5");
  }
  SUBCASE("duplicate keys are rejected") {
    CHECK_THROWS_AS(hcl::parse_config_text("L = 3\nL = 4\n"), std::invalid_argument);
  }
  SUBCASE("lines without an equals sign are rejected") {
    CHECK_THROWS_AS(hcl::parse_config_text("L 3\n"), std::invalid_argument);
  }
  SUBCASE("unknown keys fail the schema check") {
    const auto kv = hcl::parse_config_text("L = 3\nlambda_typo = 4\n");
    CHECK_THROWS_AS(hcl::reject_unknown_keys(kv), std::invalid_argument);
    CHECK_NOTHROW(hcl::reject_unknown_keys(hcl::parse_config_text("L = 3\nlambda = 4\n")));
  }
}

TEST_CASE("float formatting survives a round trip") {
  for (double v : {1.0 / 3.0, 0.1, 6.2172822834099332, 1e-300, -2.5e17}) {
    const std::string s = hcl::format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("enumerate prints the space size and exits cleanly") {
  const auto dir = fresh_dir("enumerate");
  const auto log = dir / "out.txt";
  const int code = run_cli("enumerate --L 3 --n 3 --out-dir " + dir.string(), log);
  CHECK(code == 0);
  const std::string out = slurp(log);
  CHECK(out.find("35") != std::string::npos);
  CHECK(fs::exists(dir / "sectors.csv"));
  CHECK(slurp(dir / "sectors.csv") == "k,size\n1,5\n2,20\n3,10\n");
}

TEST_CASE("usage errors exit with code 1") {
  const auto dir = fresh_dir("usage");
  CHECK(run_cli("enumerate --L 3 --n 99 --out-dir " + dir.string(), dir / "a.txt") == 1);
  CHECK(run_cli("no-such-subcommand", dir / "b.txt") == 1);
  CHECK(run_cli("enumerate --unknown-flag 3", dir / "c.txt") == 1);
}

TEST_CASE("unknown config keys exit with code 1 and name the key") {
  const auto dir = fresh_dir("badcfg");
  std::ofstream(dir / "plan.cfg") << "L = 3\nn = 2\nwavelength = 4\n";
  const auto log = dir / "out.txt";
  const int code =
      run_cli("mc-run --config " + (dir / "plan.cfg").string() + " --out-dir " + dir.string(),
              log);
  CHECK(code == 1);
  CHECK(slurp(log).find("wavelength") != std::string::npos);
}

TEST_CASE("inadmissible Combes-Thomas parameters quote the condition") {
  const auto dir = fresh_dir("ct_bad");
  const auto log = dir / "out.txt";
  const int code = run_cli(
      "ct-verify --L 3 --n 2 --g 2 --mu-T 0.1 --E 0 --realizations 1 --out-dir " + dir.string(),
      log);
  CHECK(code == 1);
  const std::string out = slurp(log);
  CHECK(out.find("4g - E") != std::string::npos);
  CHECK(out.find("12 e^{mu_T}") != std::string::npos);
}

TEST_CASE("xxz-check emits residuals and exits 0") {
  const auto dir = fresh_dir("xxz");
  const int code = run_cli(
      "xxz-check --L 2 --n 2 --g 2 --realizations 5 --seed 7 --out-dir " + dir.string(),
      dir / "out.txt");
  CHECK(code == 0);
  const std::string csv = slurp(dir / "xxz_residuals.csv");
  CHECK(csv.find("realization,seed,N,n,g,lambda,residual,pass") == 0);
  CHECK(csv.find(",0\n") == std::string::npos);  // no failing rows
}

TEST_CASE("repeated runs with a fixed seed are byte-identical") {
  const auto dir_a = fresh_dir("repro_a");
  const auto dir_b = fresh_dir("repro_b");
  const std::string plan =
      "mc-run --L 3 --n 2 --g 8 --lambda 8 --mu 0.05 --mu-T 0.1 --window 0:18.5 "
      "--realizations 40 --seed 99 --out-dir ";
  CHECK(run_cli(plan + dir_a.string(), dir_a / "out.txt") == 0);
  CHECK(run_cli(plan + dir_b.string(), dir_b / "out.txt") == 0);
  CHECK(slurp(dir_a / "decay_curve.csv") == slurp(dir_b / "decay_curve.csv"));
  CHECK(slurp(dir_a / "decay_fit.csv") == slurp(dir_b / "decay_fit.csv"));
  CHECK(!slurp(dir_a / "decay_curve.csv").empty());
}

TEST_CASE("correlator table carries the documented schema") {
  const auto dir = fresh_dir("corr");
  CHECK(run_cli("correlator --L 2 --n 2 --g 2 --lambda 3 --seed 9 --window 0:8 --out-dir " +
                    dir.string(),
                dir / "out.txt") == 0);
  const std::string csv = slurp(dir / "correlator.csv");
  CHECK(csv.find("seed,x_index,y_index,window_lo,window_hi,value") == 0);
}

TEST_CASE("lambda sweeps are sorted ascending") {
  const auto dir = fresh_dir("sweep");
  CHECK(run_cli("mc-run --L 2 --n 2 --g 8 --lambda 5 --mu 0.05 --mu-T 0.1 --window 0:18 "
                "--realizations 10 --seed 3 --fm-lambdas 100,10,31.6 --out-dir " +
                    dir.string(),
                dir / "out.txt") == 0);
  std::istringstream is(slurp(dir / "fm_sweep.csv"));
  std::string line;
  std::getline(is, line);  // header
  double prev = -1;
  int rows = 0;
  while (std::getline(is, line)) {
    const double lam = std::stod(line.substr(0, line.find(',')));
    CHECK(lam > prev);
    prev = lam;
    ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("band edge file carries the droplet band endpoints") {
  const auto dir = fresh_dir("band");
  CHECK(run_cli("spectrum --L 2 --n 1 --g 2 --lambda 0 --band-edges 1,2 --out-dir " +
                    dir.string(),
                dir / "out.txt") == 0);
  std::istringstream is(slurp(dir / "band_edges.csv"));
  std::string line;
  std::getline(is, line);
  CHECK(line == "g,n,band_lo,band_hi");
  const double expected[2][2] = {{2.0, 6.0}, {3.0, 4.0}};
  for (int row = 0; row < 2; ++row) {
    REQUIRE(static_cast<bool>(std::getline(is, line)));
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    REQUIRE(vals.size() == 4);
    CHECK(vals[1] == row + 1);
    CHECK(vals[2] == doctest::Approx(expected[row][0]).epsilon(1e-12));
    CHECK(vals[3] == doctest::Approx(expected[row][1]).epsilon(1e-12));
  }
}

TEST_CASE("default out-dir honors the environment variable") {
  const auto dir = fresh_dir("envdir");
  setenv("HCLAB_OUT_DIR", dir.c_str(), 1);
  const int code = run_cli("enumerate --L 2 --n 1", dir / "out.txt");
  unsetenv("HCLAB_OUT_DIR");
  CHECK(code == 0);
  CHECK(fs::exists(dir / "sectors.csv"));
}

TEST_CASE("manifest digests cover the emitted files") {
  const auto dir = fresh_dir("manifest");
  CHECK(run_cli("spectrum --L 2 --n 2 --g 2 --lambda 1 --seed 5 --band-edges 1,2 "
                "--export-operator --out-dir " +
                    dir.string(),
                dir / "out.txt") == 0);
  const auto manifest = nlohmann::json::parse(slurp(dir / "run_manifest.json"));
  CHECK(manifest.at("version") == hcl::kVersion);
  bool saw_eigenvalues = false;
  for (const auto& entry : manifest.at("outputs")) {
    const std::string name = entry.at("path");
    const std::string body = slurp(dir / name);
    CHECK(entry.at("bytes").get<std::size_t>() == body.size());
    CHECK(entry.at("fnv1a64").get<std::string>() == hcl::fnv1a64_hex(body));
    saw_eigenvalues = saw_eigenvalues || name == "eigenvalues.csv";
  }
  CHECK(saw_eigenvalues);
  CHECK(manifest.contains("manifest_digest"));
}
