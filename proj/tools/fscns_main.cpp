#include <CLI11.hpp>

#include <string>
#include <vector>

#include "fscns/commands.hpp"

namespace {

std::vector<std::pair<std::string, std::string>> split_overrides(
    const std::vector<std::string>& raw) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& kv : raw) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw CLI::ValidationError("--set expects key=value, got '" + kv + "'");
    }
    out.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractionally supervised classification for maxima "
               "nomination-sampling data"};
  app.require_subcommand(1);

  // fit -----------------------------------------------------------------
  fscns::FitOptions fit;
  std::string fit_model = "general", fit_mode = "ns", fit_init = "kmeans";
  auto* cmd_fit = app.add_subcommand("fit", "Fit one dataset");
  cmd_fit->add_option("--data", fit.data_path, "CSV with columns group,value")
      ->required();
  cmd_fit->add_option("--k", fit.k, "Set size used to collect the data")
      ->required();
  cmd_fit->add_option("--w1", fit.weights.w1, "Labeled-1 weight");
  cmd_fit->add_option("--w2", fit.weights.w2, "Labeled-2 weight");
  cmd_fit->add_option("--w3", fit.weights.w3, "Unlabeled weight");
  cmd_fit->add_option("--model", fit_model, "general | rare");
  cmd_fit->add_option("--mode", fit_mode, "ns | srs");
  cmd_fit->add_option("--tol", fit.em.tol, "Log-likelihood stop tolerance");
  cmd_fit->add_option("--max-iter", fit.em.max_iter, "EM iteration ceiling");
  cmd_fit->add_option("--threshold", fit.em.threshold,
                      "Posterior classification threshold");
  cmd_fit->add_option("--init", fit_init, "kmeans | labeled-moments");
  cmd_fit->add_option("--seed", fit.seed, "Recorded in the manifest");
  cmd_fit->add_option("--out", fit.out_path, "Report path")->required();

  // simulate --------------------------------------------------------------
  fscns::SimulateOptions sim;
  std::vector<std::string> sim_sets;
  std::string sim_config;
  auto* cmd_sim = app.add_subcommand("simulate", "Monte Carlo grid sweep");
  cmd_sim->add_option("--config", sim_config, "Key-value config file");
  cmd_sim->add_option("--set", sim_sets, "Override key=value (repeatable)");
  cmd_sim->add_option("--out", sim.out_path, "Output CSV")->required();

  // wdbc -----------------------------------------------------------------
  fscns::WdbcOptions wdbc;
  std::vector<std::string> wdbc_sets;
  std::string wdbc_config;
  auto* cmd_wdbc = app.add_subcommand("wdbc", "Imposed-NS study on wdbc.data");
  cmd_wdbc->add_option("--config", wdbc_config, "Key-value config file");
  cmd_wdbc->add_option("--set", wdbc_sets, "Override key=value (repeatable)");
  cmd_wdbc->add_option("--out", wdbc.out_path, "Output CSV")->required();

  // lemma ----------------------------------------------------------------
  fscns::LemmaOptions lemma;
  auto* cmd_lemma =
      app.add_subcommand("lemma", "Correct vs misspecified objective curves");
  cmd_lemma->add_option("--pi0", lemma.psi0.pi, "True mixing proportion");
  cmd_lemma->add_option("--mu1", lemma.psi0.comp1.mu, "Component-1 mean");
  cmd_lemma->add_option("--sigma1", lemma.psi0.comp1.sigma, "Component-1 sd");
  cmd_lemma->add_option("--mu2", lemma.psi0.comp2.mu, "Component-2 mean");
  cmd_lemma->add_option("--sigma2", lemma.psi0.comp2.sigma, "Component-2 sd");
  cmd_lemma->add_option("--k", lemma.k, "Set size");
  cmd_lemma->add_option("--n", lemma.n, "NS sample size");
  cmd_lemma->add_option("--seed", lemma.seed, "Generator seed");
  cmd_lemma->add_flag("--surface", lemma.surfaces, "Also emit (mu2,sigma2) grids");
  cmd_lemma->add_option("--out", lemma.out_path, "Curve CSV")->required();

  // enrichment --------------------------------------------------------------
  fscns::EnrichmentOptions enrich;
  std::vector<int> k_list;
  auto* cmd_enrich =
      app.add_subcommand("enrichment", "Rare-class enrichment ratio table");
  cmd_enrich->add_option("--epsilon", enrich.params.epsilon, "Rare proportion");
  cmd_enrich->add_option("--delta", enrich.params.delta, "Rare mean");
  cmd_enrich->add_option("--tau", enrich.params.tau, "Rare sd");
  cmd_enrich->add_option("--k-list", k_list, "Set sizes (repeat or comma list)")
      ->delimiter(',');
  cmd_enrich->add_option("--mc-check", enrich.mc_check_draws,
                         "Cross-check with this many simulated sets");
  cmd_enrich->add_option("--seed", enrich.seed, "Monte Carlo seed");
  cmd_enrich->add_option("--out", enrich.out_path, "Optional output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fscns::kExitParseError;
  }

  try {
    if (*cmd_fit) {
      if (fit_model == "general") {
        fit.model = fscns::MixtureModel::kGeneralGaussian;
      } else if (fit_model == "rare") {
        fit.model = fscns::MixtureModel::kRareEvent;
      } else {
        std::fprintf(stderr, "fit: unknown model '%s'\n", fit_model.c_str());
        return fscns::kExitParseError;
      }
      if (fit_mode == "ns") {
        fit.mode = fscns::LikelihoodMode::kNs;
      } else if (fit_mode == "srs") {
        fit.mode = fscns::LikelihoodMode::kSrs;
      } else {
        std::fprintf(stderr, "fit: unknown mode '%s'\n", fit_mode.c_str());
        return fscns::kExitParseError;
      }
      if (fit_init == "kmeans") {
        fit.em.init = fscns::InitRule::kKmeans;
      } else if (fit_init == "labeled-moments") {
        fit.em.init = fscns::InitRule::kLabeledMoments;
      } else {
        std::fprintf(stderr, "fit: unknown init '%s'\n", fit_init.c_str());
        return fscns::kExitParseError;
      }
      return fscns::cmd_fit(fit);
    }
    if (*cmd_sim) {
      if (!sim_config.empty()) sim.config_path = sim_config;
      sim.overrides = split_overrides(sim_sets);
      return fscns::cmd_simulate(sim);
    }
    if (*cmd_wdbc) {
      if (!wdbc_config.empty()) wdbc.config_path = wdbc_config;
      wdbc.overrides = split_overrides(wdbc_sets);
      return fscns::cmd_wdbc(wdbc);
    }
    if (*cmd_lemma) return fscns::cmd_lemma(lemma);
    if (*cmd_enrich) {
      if (!k_list.empty()) enrich.k_list = k_list;
      return fscns::cmd_enrichment(enrich);
    }
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return fscns::kExitParseError;
  }
  return fscns::kExitParseError;
}
