#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "fscns/commands.hpp"
#include "oracles.hpp"

using namespace fscns;

namespace {

const std::string kSourceDir = FSCNS_SOURCE_DIR;

std::map<std::string, std::string> parse_report(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return kv;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing: comments, dotted keys, lists, overrides") {
  const auto cfg = KeyValueConfig::from_string(
      "# comment\n"
      "grid.epsilon = 0.02, 0.05\n"
      "replicates=25\n"
      "em.tol = 1e-6  # trailing comment\n");
  CHECK(cfg.get_list("grid.epsilon", {}) == std::vector<double>{0.02, 0.05});
  CHECK(cfg.get_int("replicates", 0) == 25);
  CHECK(cfg.get_double("em.tol", 0.0) == doctest::Approx(1e-6));
  CHECK(cfg.get_or("missing", "fallback") == "fallback");

  CHECK_THROWS_AS(KeyValueConfig::from_string("not a key value line\n"),
                  ParseError);
  CHECK_THROWS_AS(
      [] {
        const auto bad = KeyValueConfig::from_string("replicates = twelve\n");
        return bad.get_int("replicates", 0);
      }(),
      ParseError);

  const auto sim = sim_config_from(KeyValueConfig::from_string(
      "grid.epsilon = 0.05\ngrid.k = 2,3\nreplicates = 7\nseed = 42\n"));
  CHECK(sim.epsilon_grid == std::vector<double>{0.05});
  CHECK(sim.k_grid == std::vector<int>{2, 3});
  CHECK(sim.replicates == 7);
  CHECK(sim.seed == 42);
}

TEST_CASE("grouped csv loader and its error paths") {
  const std::string path = "cli_fit_data_test.csv";
  {
    std::ofstream out(path);
    out << "group,value\n1,0.5\n1,-0.25\n2,3.75\n3,1.5\n3,4.125\n";
  }
  const auto ds = load_grouped_csv(path, SetSize{3});
  CHECK(ds.n1() == 2);
  CHECK(ds.n2() == 1);
  CHECK(ds.n3() == 2);
  CHECK(ds.labeled2[0] == 3.75);
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_grouped_csv("missing_file.csv", SetSize{1}), ParseError);

  const std::string bad = "cli_bad_data_test.csv";
  {
    std::ofstream out(bad);
    out << "1,0.5\n4,2.0\n";
  }
  CHECK_THROWS_AS(load_grouped_csv(bad, SetSize{1}), ParseError);
  std::remove(bad.c_str());
}

TEST_CASE("cmd_fit writes a reproducible report and distinct exit codes") {
  FitOptions opt;
  opt.data_path = kSourceDir + "/tests/data/fit_fixture.csv";
  opt.k = 3;
  opt.weights = Weights{1.0, 1.0, 3.0};
  opt.model = MixtureModel::kGeneralGaussian;
  opt.mode = LikelihoodMode::kNs;
  opt.out_path = "cli_fit_report_test.txt";

  REQUIRE(cmd_fit(opt) == kExitOk);
  const auto report = parse_report(opt.out_path);
  CHECK(report.at("converged") == "true");
  CHECK(report.count("pi_hat") == 1);

  // Byte-identical on a rerun (idempotence given fixed inputs).
  const std::string first = slurp(opt.out_path);
  REQUIRE(cmd_fit(opt) == kExitOk);
  CHECK(first == slurp(opt.out_path));

  // Golden estimates, frozen after the module-level oracles validated the
  // fitter (see tests/data/README).
  const auto golden =
      parse_report(kSourceDir + "/tests/data/fit_fixture.golden");
  for (const auto& key :
       {"pi_hat", "mu1_hat", "sigma1_hat", "mu2_hat", "sigma2_hat",
        "loglik_final"}) {
    CAPTURE(key);
    CHECK(std::abs(std::stod(report.at(key)) - std::stod(golden.at(key))) <=
          1e-10);
  }
  CHECK(report.at("iterations") == golden.at("iterations"));
  std::remove(opt.out_path.c_str());
  std::remove((opt.out_path + ".manifest").c_str());

  FitOptions missing = opt;
  missing.data_path = "no_such_file.csv";
  CHECK(cmd_fit(missing) == kExitParseError);

  // Degenerate configuration: rare model with no information on the rare
  // component.
  const std::string tiny = "cli_fit_tiny_test.csv";
  {
    std::ofstream out(tiny);
    out << "1,0.2\n1,0.4\n";
  }
  FitOptions degen = opt;
  degen.data_path = tiny;
  degen.model = MixtureModel::kRareEvent;
  degen.weights = Weights{1.0, 1.0, 1.0};
  CHECK(cmd_fit(degen) == kExitDegenerate);
  std::remove(tiny.c_str());

  const std::string empty = "cli_fit_empty_test.csv";
  {
    std::ofstream out(empty);
    out << "group,value\n";
  }
  FitOptions insufficient = opt;
  insufficient.data_path = empty;
  CHECK(cmd_fit(insufficient) == kExitInsufficientData);
  std::remove(empty.c_str());
}

TEST_CASE("cmd_fit converges fast at w3=0") {
  FitOptions opt;
  opt.data_path = kSourceDir + "/tests/data/fit_fixture.csv";
  opt.k = 3;
  opt.weights = Weights{1.0, 1.0, 0.0};
  opt.out_path = "cli_fit_w0_test.txt";
  REQUIRE(cmd_fit(opt) == kExitOk);
  const auto report = parse_report(opt.out_path);
  CHECK(std::stoi(report.at("iterations")) <= 2);
  CHECK(report.at("converged") == "true");
  std::remove(opt.out_path.c_str());
  std::remove((opt.out_path + ".manifest").c_str());
}

TEST_CASE("cmd_simulate emits identical csv for identical seeds") {
  SimulateOptions opt;
  opt.overrides = {{"grid.epsilon", "0.05"}, {"grid.delta", "4"},
                   {"grid.tau", "1.5"},      {"grid.k", "3"},
                   {"grid.rho", "0.85"},     {"grid.w3", "3"},
                   {"grid.n3", "60"},        {"replicates", "3"},
                   {"seed", "321"},          {"jobs", "2"}};
  opt.out_path = "cli_sim_test.csv";
  REQUIRE(cmd_simulate(opt) == kExitOk);
  const std::string first = slurp(opt.out_path);
  REQUIRE(cmd_simulate(opt) == kExitOk);
  CHECK(first == slurp(opt.out_path));

  std::istringstream lines(first);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 3);  // header + 2 method rows

  std::remove(opt.out_path.c_str());
  std::remove((opt.out_path + ".manifest").c_str());

  SimulateOptions bad = opt;
  bad.config_path = "missing_config.cfg";
  CHECK(cmd_simulate(bad) == kExitParseError);
}

TEST_CASE("cmd_lemma k=1 coincidence through the CLI surface") {
  LemmaOptions opt;
  opt.k = 1;
  opt.n = 200;
  opt.out_path = "cli_lemma_test.csv";
  REQUIRE(cmd_lemma(opt) == kExitOk);
  std::ifstream in(opt.out_path);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    const auto c1 = line.find(','), c2 = line.find(',', line.find(',') + 1);
    const double correct = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    const double improper = std::stod(line.substr(c2 + 1));
    CHECK(correct == doctest::Approx(improper).epsilon(1e-9));
  }
  std::remove(opt.out_path.c_str());
  std::remove((opt.out_path + ".manifest").c_str());
}

TEST_CASE("cmd_wdbc runs a small grid against the bundled data") {
  WdbcOptions opt;
  opt.overrides = {{"grid.k", "2"},
                   {"grid.w3", "0,2"},
                   {"replicates", "3"},
                   {"data", kSourceDir + "/data/wdbc.data"},
                   {"jobs", "2"},
                   {"seed", "77"}};
  opt.out_path = "cli_wdbc_test.csv";
  REQUIRE(cmd_wdbc(opt) == kExitOk);
  const std::string first = slurp(opt.out_path);
  REQUIRE(cmd_wdbc(opt) == kExitOk);
  CHECK(first == slurp(opt.out_path));
  CHECK(first.find("FSC-NS") != std::string::npos);
  CHECK(first.find("FSC-SRS") != std::string::npos);
  std::remove(opt.out_path.c_str());
  std::remove((opt.out_path + ".manifest").c_str());

  WdbcOptions missing = opt;
  missing.overrides.push_back({"data", "nope.data"});
  CHECK(cmd_wdbc(missing) == kExitParseError);
}

TEST_CASE("cmd_enrichment prints the table and honors --out") {
  EnrichmentOptions opt;
  opt.k_list = {1, 3};
  opt.out_path = "cli_er_test.csv";
  REQUIRE(cmd_enrichment(opt) == kExitOk);
  const std::string text = slurp(opt.out_path);
  CHECK(text.find("k,enrichment_ratio") == 0);
  CHECK(text.find("\n1,1\n") != std::string::npos);
  std::remove(opt.out_path.c_str());
}
