#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fscns/em.hpp"
#include "fscns/metrics.hpp"
#include "fscns/sampling.hpp"

namespace fscns {

enum class Method { kFscNs, kFscSrs };

std::string method_name(Method m);

// One cell of the simulation design: rare-event truth, set size, ranking
// quality, unlabeled weight, and group sizes.
struct Scenario {
  RareEventParams truth{0.05, 4.0, 1.5};
  SetSize k{3};
  double rho = 0.85;
  double w3 = 3.0;
  std::size_t n1 = 20;
  std::size_t n2 = 10;
  std::size_t n3 = 200;

  // Generating mixture in dataset orientation: component 1 is the N(0,1)
  // background (labeled-1 group), component 2 the rare signal.
  MixtureParams generating_mixture() const {
    return MixtureParams{1.0 - truth.epsilon, ComponentParams{0.0, 1.0},
                         ComponentParams{truth.delta, truth.tau}};
  }
};

struct ReplicateOutcome {
  bool aborted = false;
  std::string abort_reason;
  bool converged = false;
  int iterations = 0;
  MetricsReport metrics;
  RareEventParams estimate;
};

struct ReplicateResult {
  ReplicateOutcome ns;
  ReplicateOutcome srs;
};

// Generates one dataset (stream_id = replicate_index) and fits both methods
// on it with identical initialization.
ReplicateResult run_replicate(const Scenario& scenario,
                              std::uint64_t replicate_index, std::uint64_t seed,
                              const EmConfig& em);

struct SimConfig {
  std::vector<double> epsilon_grid{0.02, 0.05, 0.10};
  std::vector<double> delta_grid{3.0, 4.0, 5.0};
  std::vector<double> tau_grid{1.0, 1.5, 2.0};
  std::vector<int> k_grid{2, 3, 5, 8};
  std::vector<double> rho_grid{1.0, 0.85, 0.60};
  std::vector<double> w3_grid{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<std::size_t> n3_grid{100, 200};
  std::size_t n1 = 20;
  std::size_t n2 = 10;
  std::size_t replicates = 500;
  std::uint64_t seed = 2026;
  int jobs = 1;
  EmConfig em;

  void validate() const;
};

// Aggregate over the non-aborted replicates of one (scenario, method) cell.
struct GridRow {
  Scenario scenario;
  Method method = Method::kFscNs;
  std::size_t replicates = 0;
  std::size_t used = 0;
  std::size_t aborted = 0;
  std::size_t nonconverged = 0;
  MetricsReport mean_metrics;
  std::size_t precision_undefined_count = 0;
  std::size_t auc_undefined_count = 0;
  EstimatorSummary estimation;
  double mean_iterations = 0.0;
};

// Aggregates replicate outcomes in replicate order; exposed for reuse by the
// acceptance suite.
GridRow aggregate_outcomes(const Scenario& scenario, Method method,
                           const std::vector<ReplicateOutcome>& outcomes);

// Runs replicates 0..B-1 of one scenario (optionally across threads) and
// returns the two aggregated method rows.
std::pair<GridRow, GridRow> run_scenario(const Scenario& scenario,
                                         std::size_t replicates,
                                         std::uint64_t seed, const EmConfig& em,
                                         int jobs);

// Full cartesian sweep over the config grids.
std::vector<GridRow> run_grid(const SimConfig& config);

std::string grid_csv_header();
std::string grid_row_csv(const GridRow& row);

// Objective curves over a pi grid for one simulated NS dataset, with the
// other parameters held at truth. Curves are shifted so each maximum is 0.
struct LemmaCurves {
  std::vector<double> pi_grid;
  std::vector<double> correct;    // log_ns_likelihood
  std::vector<double> improper;   // log_improper_likelihood
  double argmax_correct = 0.0;
  double argmax_improper = 0.0;

  bool has_surfaces = false;
  std::vector<double> mu2_grid;
  std::vector<double> sigma2_grid;
  std::vector<std::vector<double>> surface_correct;   // [mu2][sigma2]
  std::vector<std::vector<double>> surface_improper;
  double mu2_hat_correct = 0.0, sigma2_hat_correct = 0.0;
  double mu2_hat_improper = 0.0, sigma2_hat_improper = 0.0;
};

LemmaCurves lemma_demo(const MixtureParams& psi0, SetSize k, std::size_t n,
                       std::uint64_t seed, bool with_surfaces = false);

}  // namespace fscns
