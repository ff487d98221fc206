#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fscns/em.hpp"
#include "fscns/metrics.hpp"
#include "fscns/sampling.hpp"
#include "fscns/simulate.hpp"

namespace fscns {

// One row of the UCI breast-cancer diagnostic file. The measured variable is
// y = log(area_worst); radius_worst is the auxiliary ranking variable.
struct WdbcRecord {
  std::string id;
  char diagnosis = 'B';  // 'M' or 'B'
  double radius_worst = 0.0;
  double area_worst = 0.0;
  double y = 0.0;
};

// Parses the comma-separated UCI layout: id, diagnosis, then 30 features
// (10 means, 10 standard errors, 10 worst) so radius_worst is file column 23
// and area_worst column 26. Enforces the 212 malignant / 357 benign counts
// unless require_canonical_counts is cleared (fixture parsing).
std::vector<WdbcRecord> load_wdbc(const std::string& path,
                                  bool require_canonical_counts = true);

struct WdbcConfig {
  std::vector<int> k_grid{2, 3, 4};
  std::vector<double> w3_grid{0, 2, 4, 6, 8, 10};
  std::size_t n1 = 20;
  std::size_t n2 = 20;
  std::size_t n3 = 80;
  std::size_t replicates = 500;
  std::uint64_t seed = 1894;
  std::string data_path = "data/wdbc.data";
  int jobs = 1;
  EmConfig em;
};

// Imposed-NS resampling of one replicate: n1 malignant-only sets, n2
// benign-only sets, n3 pooled sets, each of size k, all drawn without
// replacement across the replicate; every set contributes the y of its
// radius_worst-maximal unit. Malignant is component 1; truth holds the
// diagnosis (1 = M, 2 = B) of each nominated unlabeled unit.
FscDataset build_replicate(const std::vector<WdbcRecord>& records,
                           const WdbcConfig& config, SetSize k, RngSeed seed);

struct WdbcReplicateOutcome {
  bool aborted = false;
  std::string abort_reason;
  bool converged = false;
  int iterations = 0;
  MetricsReport metrics;
  double pi_hat = 0.0;
};

struct WdbcRow {
  int k = 0;
  double w3 = 0.0;
  Method method = Method::kFscNs;
  std::size_t replicates = 0;
  std::size_t used = 0;
  std::size_t aborted = 0;
  std::size_t nonconverged = 0;
  MetricsReport mean_metrics;
  std::size_t precision_undefined_count = 0;
  std::size_t auc_undefined_count = 0;
  double mean_pi_hat = 0.0;
  double mean_iterations = 0.0;
};

// Fits FSC-NS and FSC-SRS (general Gaussian model, w1 = w2 = 1) on each
// replicate and averages per (k, w3) cell. The positive class is malignant.
std::vector<WdbcRow> run_wdbc(const WdbcConfig& config,
                              const std::vector<WdbcRecord>& records);

std::string wdbc_csv_header();
std::string wdbc_row_csv(const WdbcRow& row, std::uint64_t seed);

}  // namespace fscns
