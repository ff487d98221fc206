#include "fscns/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fscns/metrics.hpp"
#include "fscns/mixture.hpp"

namespace fscns {

namespace {

class Stopwatch {
public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

private:
  std::chrono::steady_clock::time_point start_;
};

int classify_exception(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return kExitParseError;
  if (dynamic_cast<const InsufficientDataError*>(&e)) {
    return kExitInsufficientData;
  }
  if (dynamic_cast<const DegenerateError*>(&e)) return kExitDegenerate;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return kExitParseError;
  return kExitInternalError;
}

int report_failure(const char* command, const std::exception& e) {
  std::cerr << command << ": " << e.what() << "\n";
  return classify_exception(e);
}

KeyValueConfig load_config(const std::optional<std::string>& path,
                           const std::vector<std::pair<std::string, std::string>>&
                               overrides) {
  KeyValueConfig cfg =
      path ? KeyValueConfig::from_file(*path) : KeyValueConfig{};
  for (const auto& [k, v] : overrides) cfg.set(k, v);
  return cfg;
}

std::vector<std::pair<std::string, std::string>> config_echo(
    const KeyValueConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, v] : cfg.entries()) out.emplace_back(k, v);
  return out;
}

}  // namespace

std::string resolve_data_path(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::exists(path)) return path;
  if (!fs::path(path).is_absolute()) {
    if (const char* dir = std::getenv("FSCNS_DATA_DIR")) {
      const fs::path candidate = fs::path(dir) / path;
      if (fs::exists(candidate)) return candidate.string();
    }
  }
  return path;
}

FscDataset load_grouped_csv(const std::string& path, SetSize k) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open data file: " + path);

  FscDataset ds;
  ds.k = k;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (lineno == 1 && line.rfind("group", 0) == 0) continue;  // header
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParseError("data row " + std::to_string(lineno) +
                       ": expected group,value");
    }
    int group = 0;
    double value = 0.0;
    try {
      group = std::stoi(line.substr(0, comma));
      value = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw ParseError("data row " + std::to_string(lineno) + ": bad field");
    }
    if (!std::isfinite(value)) {
      throw ParseError("data row " + std::to_string(lineno) +
                       ": non-finite value");
    }
    switch (group) {
      case 1: ds.labeled1.push_back(value); break;
      case 2: ds.labeled2.push_back(value); break;
      case 3: ds.unlabeled.push_back(value); break;
      default:
        throw ParseError("data row " + std::to_string(lineno) +
                         ": group must be 1, 2 or 3");
    }
  }
  if (ds.labeled1.empty() && ds.labeled2.empty() && ds.unlabeled.empty()) {
    throw InsufficientDataError("data file has no observations: " + path);
  }
  return ds;
}

int cmd_fit(const FitOptions& opt) {
  Stopwatch timer;
  const std::string started = current_timestamp();
  try {
    const std::string data_path = resolve_data_path(opt.data_path);
    FscDataset data = load_grouped_csv(data_path, SetSize{opt.k});

    const FitResult fit =
        opt.mode == LikelihoodMode::kNs
            ? fit_fsc_ns(data, opt.weights, opt.em, opt.model)
            : fit_fsc_srs(data, opt.weights, opt.em, opt.model);

    std::ofstream out(opt.out_path);
    if (!out) throw std::runtime_error("cannot write " + opt.out_path);
    out << "command = fit\n";
    out << "data = " << data_path << "\n";
    out << "k = " << opt.k << "\n";
    out << "model = "
        << (opt.model == MixtureModel::kGeneralGaussian ? "general-gaussian"
                                                        : "rare-event")
        << "\n";
    out << "mode = " << (opt.mode == LikelihoodMode::kNs ? "ns" : "srs") << "\n";
    out << "w1 = " << format_double(opt.weights.w1) << "\n";
    out << "w2 = " << format_double(opt.weights.w2) << "\n";
    out << "w3 = " << format_double(opt.weights.w3) << "\n";
    out << "n1 = " << data.n1() << "\n";
    out << "n2 = " << data.n2() << "\n";
    out << "n3 = " << data.n3() << "\n";
    out << "converged = " << (fit.converged ? "true" : "false") << "\n";
    out << "iterations = " << fit.iterations << "\n";
    if (fit.model == MixtureModel::kGeneralGaussian) {
      const auto& psi = fit.mixture();
      out << "pi_hat = " << format_double(psi.pi) << "\n";
      out << "mu1_hat = " << format_double(psi.comp1.mu) << "\n";
      out << "sigma1_hat = " << format_double(psi.comp1.sigma) << "\n";
      out << "mu2_hat = " << format_double(psi.comp2.mu) << "\n";
      out << "sigma2_hat = " << format_double(psi.comp2.sigma) << "\n";
    } else {
      const auto& psi = fit.rare();
      out << "epsilon_hat = " << format_double(psi.epsilon) << "\n";
      out << "delta_hat = " << format_double(psi.delta) << "\n";
      out << "tau_hat = " << format_double(psi.tau) << "\n";
    }
    out << "loglik_final = " << format_double(fit.loglik_trace.back()) << "\n";
    out << "loglik_trace = ";
    for (std::size_t i = 0; i < fit.loglik_trace.size(); ++i) {
      if (i) out << ',';
      out << format_double(fit.loglik_trace[i]);
    }
    out << "\n";
    out << "posteriors = index,value,z_tilde,v_tilde,class\n";
    for (std::size_t r = 0; r < data.n3(); ++r) {
      out << r << ',' << format_double(data.unlabeled[r]) << ','
          << format_double(fit.posteriors.z_tilde[r]) << ','
          << format_double(fit.posteriors.v_tilde[r]) << ','
          << fit.classifications[r] << "\n";
    }

    RunManifest manifest;
    manifest.command = "fit";
    manifest.config = {{"data", data_path},
                       {"k", std::to_string(opt.k)},
                       {"w3", format_double(opt.weights.w3)}};
    manifest.seed = opt.seed;
    manifest.build_id = build_identifier();
    manifest.started_at = started;
    manifest.finished_at = current_timestamp();
    manifest.wall_seconds = timer.seconds();
    manifest.write(opt.out_path + ".manifest");

    std::cout << "fit: " << (fit.converged ? "converged" : "max-iterations")
              << " after " << fit.iterations << " iterations; report at "
              << opt.out_path << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return report_failure("fit", e);
  }
}

SimConfig sim_config_from(const KeyValueConfig& cfg) {
  SimConfig sim;
  sim.epsilon_grid = cfg.get_list("grid.epsilon", sim.epsilon_grid);
  sim.delta_grid = cfg.get_list("grid.delta", sim.delta_grid);
  sim.tau_grid = cfg.get_list("grid.tau", sim.tau_grid);
  const std::vector<double> k_def(sim.k_grid.begin(), sim.k_grid.end());
  sim.k_grid.clear();
  for (double k : cfg.get_list("grid.k", k_def)) {
    sim.k_grid.push_back(static_cast<int>(k));
  }
  sim.rho_grid = cfg.get_list("grid.rho", sim.rho_grid);
  sim.w3_grid = cfg.get_list("grid.w3", sim.w3_grid);
  const std::vector<double> n3_def(sim.n3_grid.begin(), sim.n3_grid.end());
  sim.n3_grid.clear();
  for (double n : cfg.get_list("grid.n3", n3_def)) {
    sim.n3_grid.push_back(static_cast<std::size_t>(n));
  }
  sim.n1 = static_cast<std::size_t>(cfg.get_int("n1", 20));
  sim.n2 = static_cast<std::size_t>(cfg.get_int("n2", 10));
  sim.replicates = static_cast<std::size_t>(cfg.get_int("replicates", 500));
  sim.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 2026));
  sim.jobs = static_cast<int>(cfg.get_int("jobs", 1));
  sim.em.tol = cfg.get_double("em.tol", sim.em.tol);
  sim.em.max_iter = static_cast<int>(cfg.get_int("em.max_iter", sim.em.max_iter));
  sim.em.threshold = cfg.get_double("em.threshold", sim.em.threshold);
  return sim;
}

int cmd_simulate(const SimulateOptions& opt) {
  Stopwatch timer;
  const std::string started = current_timestamp();
  try {
    const KeyValueConfig cfg = load_config(opt.config_path, opt.overrides);
    const SimConfig sim = sim_config_from(cfg);

    const std::vector<GridRow> rows = run_grid(sim);

    std::ofstream out(opt.out_path);
    if (!out) throw std::runtime_error("cannot write " + opt.out_path);
    out << grid_csv_header() << "\n";
    std::size_t aborted = 0;
    for (const auto& row : rows) {
      out << grid_row_csv(row) << "\n";
      aborted += row.aborted;
    }

    RunManifest manifest;
    manifest.command = "simulate";
    manifest.config = config_echo(cfg);
    manifest.seed = sim.seed;
    manifest.build_id = build_identifier();
    manifest.started_at = started;
    manifest.finished_at = current_timestamp();
    manifest.wall_seconds = timer.seconds();
    manifest.aborted_replicates = aborted;
    manifest.write(opt.out_path + ".manifest");

    std::cout << "simulate: " << rows.size() << " rows -> " << opt.out_path
              << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return report_failure("simulate", e);
  }
}

WdbcConfig wdbc_config_from(const KeyValueConfig& cfg) {
  WdbcConfig wc;
  const std::vector<double> k_def(wc.k_grid.begin(), wc.k_grid.end());
  wc.k_grid.clear();
  for (double k : cfg.get_list("grid.k", k_def)) {
    wc.k_grid.push_back(static_cast<int>(k));
  }
  wc.w3_grid = cfg.get_list("grid.w3", wc.w3_grid);
  wc.n1 = static_cast<std::size_t>(cfg.get_int("n1", 20));
  wc.n2 = static_cast<std::size_t>(cfg.get_int("n2", 20));
  wc.n3 = static_cast<std::size_t>(cfg.get_int("n3", 80));
  wc.replicates = static_cast<std::size_t>(cfg.get_int("replicates", 500));
  wc.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1894));
  wc.data_path = cfg.get_or("data", wc.data_path);
  wc.jobs = static_cast<int>(cfg.get_int("jobs", 1));
  wc.em.tol = cfg.get_double("em.tol", wc.em.tol);
  wc.em.max_iter = static_cast<int>(cfg.get_int("em.max_iter", wc.em.max_iter));
  wc.em.threshold = cfg.get_double("em.threshold", wc.em.threshold);
  return wc;
}

int cmd_wdbc(const WdbcOptions& opt) {
  Stopwatch timer;
  const std::string started = current_timestamp();
  try {
    const KeyValueConfig cfg = load_config(opt.config_path, opt.overrides);
    WdbcConfig wc = wdbc_config_from(cfg);
    wc.data_path = resolve_data_path(wc.data_path);

    const std::vector<WdbcRecord> records = load_wdbc(wc.data_path);
    const std::vector<WdbcRow> rows = run_wdbc(wc, records);

    std::ofstream out(opt.out_path);
    if (!out) throw std::runtime_error("cannot write " + opt.out_path);
    out << wdbc_csv_header() << "\n";
    std::size_t aborted = 0;
    for (const auto& row : rows) {
      out << wdbc_row_csv(row, wc.seed) << "\n";
      aborted += row.aborted;
    }

    RunManifest manifest;
    manifest.command = "wdbc";
    manifest.config = config_echo(cfg);
    manifest.seed = wc.seed;
    manifest.build_id = build_identifier();
    manifest.started_at = started;
    manifest.finished_at = current_timestamp();
    manifest.wall_seconds = timer.seconds();
    manifest.aborted_replicates = aborted;
    manifest.write(opt.out_path + ".manifest");

    std::cout << "wdbc: " << rows.size() << " rows -> " << opt.out_path << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return report_failure("wdbc", e);
  }
}

int cmd_lemma(const LemmaOptions& opt) {
  Stopwatch timer;
  const std::string started = current_timestamp();
  try {
    const LemmaCurves curves = lemma_demo(opt.psi0, SetSize{opt.k}, opt.n,
                                          opt.seed, opt.surfaces);

    std::ofstream out(opt.out_path);
    if (!out) throw std::runtime_error("cannot write " + opt.out_path);
    out << "pi,loglik_correct,loglik_improper\n";
    for (std::size_t i = 0; i < curves.pi_grid.size(); ++i) {
      out << format_double(curves.pi_grid[i]) << ','
          << format_double(curves.correct[i]) << ','
          << format_double(curves.improper[i]) << "\n";
    }

    if (curves.has_surfaces) {
      std::ofstream surf(opt.out_path + ".surface.csv");
      surf << "mu2,sigma2,loglik_correct,loglik_improper\n";
      for (std::size_t i = 0; i < curves.mu2_grid.size(); ++i) {
        for (std::size_t j = 0; j < curves.sigma2_grid.size(); ++j) {
          surf << format_double(curves.mu2_grid[i]) << ','
               << format_double(curves.sigma2_grid[j]) << ','
               << format_double(curves.surface_correct[i][j]) << ','
               << format_double(curves.surface_improper[i][j]) << "\n";
        }
      }
    }

    RunManifest manifest;
    manifest.command = "lemma";
    manifest.config = {{"pi0", format_double(opt.psi0.pi)},
                       {"mu2", format_double(opt.psi0.comp2.mu)},
                       {"sigma2", format_double(opt.psi0.comp2.sigma)},
                       {"k", std::to_string(opt.k)},
                       {"n", std::to_string(opt.n)},
                       {"argmax_correct", format_double(curves.argmax_correct)},
                       {"argmax_improper", format_double(curves.argmax_improper)}};
    manifest.seed = opt.seed;
    manifest.build_id = build_identifier();
    manifest.started_at = started;
    manifest.finished_at = current_timestamp();
    manifest.wall_seconds = timer.seconds();
    manifest.write(opt.out_path + ".manifest");

    std::cout << "lemma: argmax_pi correct=" << format_double(curves.argmax_correct)
              << " improper=" << format_double(curves.argmax_improper) << " -> "
              << opt.out_path << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return report_failure("lemma", e);
  }
}

int cmd_enrichment(const EnrichmentOptions& opt) {
  try {
    std::ostringstream table;
    table << "k,enrichment_ratio";
    if (opt.mc_check_draws > 0) table << ",mc_estimate,mc_se";
    table << "\n";
    for (int k : opt.k_list) {
      const double er = enrichment_ratio(opt.params, SetSize{k});
      table << k << ',' << format_double(er);
      if (opt.mc_check_draws > 0) {
        const MixtureParams gen{1.0 - opt.params.epsilon,
                                ComponentParams{0.0, 1.0},
                                ComponentParams{opt.params.delta, opt.params.tau}};
        RngStream rng(RngSeed{opt.seed, static_cast<std::uint64_t>(k)});
        std::size_t rare = 0;
        for (std::size_t i = 0; i < opt.mc_check_draws; ++i) {
          rare += draw_ns_max(gen, SetSize{k}, rng).component == 2 ? 1 : 0;
        }
        const double p = static_cast<double>(rare) /
                         static_cast<double>(opt.mc_check_draws);
        const double se = std::sqrt(p * (1.0 - p) /
                                    static_cast<double>(opt.mc_check_draws)) /
                          opt.params.epsilon;
        table << ',' << format_double(p / opt.params.epsilon) << ','
              << format_double(se);
      }
      table << "\n";
    }
    if (!opt.out_path.empty()) {
      std::ofstream out(opt.out_path);
      if (!out) throw std::runtime_error("cannot write " + opt.out_path);
      out << table.str();
    }
    std::cout << table.str();
    return kExitOk;
  } catch (const std::exception& e) {
    return report_failure("enrichment", e);
  }
}

}  // namespace fscns
