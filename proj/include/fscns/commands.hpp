#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fscns/em.hpp"
#include "fscns/io.hpp"
#include "fscns/sampling.hpp"
#include "fscns/simulate.hpp"
#include "fscns/wdbc.hpp"

namespace fscns {

// Process exit codes; each failure class gets its own value so callers can
// tell parse problems from statistical degeneracy.
enum ExitCode : int {
  kExitOk = 0,
  kExitParseError = 2,
  kExitInsufficientData = 3,
  kExitDegenerate = 4,
  kExitInternalError = 5,
};

// Resolves a data path against FSCNS_DATA_DIR when the file is not found
// where given.
std::string resolve_data_path(const std::string& path);

// Reads the dataset CSV schema: header optional, rows "group,value" with
// group in {1,2,3}.
FscDataset load_grouped_csv(const std::string& path, SetSize k);

struct FitOptions {
  std::string data_path;
  int k = 1;
  Weights weights;
  MixtureModel model = MixtureModel::kGeneralGaussian;
  LikelihoodMode mode = LikelihoodMode::kNs;
  EmConfig em;
  std::uint64_t seed = 0;  // recorded in the manifest only
  std::string out_path;
};

struct SimulateOptions {
  std::optional<std::string> config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string out_path;
};

struct WdbcOptions {
  std::optional<std::string> config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string out_path;
};

struct LemmaOptions {
  MixtureParams psi0{0.40, ComponentParams{0.0, 1.0}, ComponentParams{3.5, 1.2}};
  int k = 3;
  std::size_t n = 2000;
  std::uint64_t seed = 2026;
  bool surfaces = false;
  std::string out_path;
};

struct EnrichmentOptions {
  RareEventParams params{0.05, 4.0, 1.5};
  std::vector<int> k_list{2, 3, 5, 8};
  std::size_t mc_check_draws = 0;  // 0 disables the Monte Carlo cross-check
  std::uint64_t seed = 2026;
  std::string out_path;  // empty writes the table to stdout only
};

int cmd_fit(const FitOptions& opt);
int cmd_simulate(const SimulateOptions& opt);
int cmd_wdbc(const WdbcOptions& opt);
int cmd_lemma(const LemmaOptions& opt);
int cmd_enrichment(const EnrichmentOptions& opt);

// Builds a SimConfig / WdbcConfig from a key-value config plus overrides.
SimConfig sim_config_from(const KeyValueConfig& cfg);
WdbcConfig wdbc_config_from(const KeyValueConfig& cfg);

}  // namespace fscns
