#include "fscns/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "fscns/io.hpp"
#include "fscns/mixture.hpp"

namespace fscns {

std::string method_name(Method m) {
  return m == Method::kFscNs ? "FSC-NS" : "FSC-SRS";
}

namespace {

ReplicateOutcome score_fit(const FitResult& fit, const FscDataset& data) {
  ReplicateOutcome out;
  out.converged = fit.converged;
  out.iterations = fit.iterations;
  out.estimate = fit.rare();

  const auto& truth = *data.truth;
  const std::size_t n3 = data.n3();
  std::vector<bool> truth_pos(n3), pred_pos(n3);
  std::vector<int> truth_labels(n3);
  for (std::size_t r = 0; r < n3; ++r) {
    truth_pos[r] = truth[r] == 2;
    pred_pos[r] = fit.classifications[r] == 2;
    truth_labels[r] = truth[r];
  }

  out.metrics = confusion_metrics(count_confusion(pred_pos, truth_pos));
  out.metrics.ari = adjusted_rand_index(truth_labels, fit.classifications);
  // Rare orientation: z_tilde is already the rare-class posterior.
  out.metrics.auc =
      auc(fit.posteriors.z_tilde, truth_pos, &out.metrics.auc_undefined);
  out.metrics.log_loss = log_loss(fit.posteriors.z_tilde, truth_pos);
  return out;
}

}  // namespace

ReplicateResult run_replicate(const Scenario& scenario,
                              std::uint64_t replicate_index, std::uint64_t seed,
                              const EmConfig& em) {
  const FscDataset data = generate_dataset(
      scenario.generating_mixture(), scenario.k, scenario.n1, scenario.n2,
      scenario.n3, RankingModel{scenario.rho}, RngSeed{seed, replicate_index});

  const Weights w{1.0, 1.0, scenario.w3};
  ReplicateResult result;

  auto fit_one = [&](Method method) {
    ReplicateOutcome out;
    try {
      const FitResult fit = method == Method::kFscNs
                                ? fit_fsc_ns(data, w, em, MixtureModel::kRareEvent)
                                : fit_fsc_srs(data, w, em, MixtureModel::kRareEvent);
      out = score_fit(fit, data);
    } catch (const std::exception& e) {
      out.aborted = true;
      out.abort_reason = e.what();
    }
    return out;
  };
  result.ns = fit_one(Method::kFscNs);
  result.srs = fit_one(Method::kFscSrs);
  return result;
}

void SimConfig::validate() const {
  auto nonempty = [](const auto& v, const char* name) {
    if (v.empty()) {
      throw std::invalid_argument(std::string("empty grid: ") + name);
    }
  };
  nonempty(epsilon_grid, "epsilon");
  nonempty(delta_grid, "delta");
  nonempty(tau_grid, "tau");
  nonempty(k_grid, "k");
  nonempty(rho_grid, "rho");
  nonempty(w3_grid, "w3");
  nonempty(n3_grid, "n3");
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
}

GridRow aggregate_outcomes(const Scenario& scenario, Method method,
                           const std::vector<ReplicateOutcome>& outcomes) {
  GridRow row;
  row.scenario = scenario;
  row.method = method;
  row.replicates = outcomes.size();

  std::vector<double> eps_hat, delta_hat, tau_hat;
  MetricsReport sum;
  double iter_sum = 0.0;
  for (const auto& out : outcomes) {
    if (out.aborted) {
      ++row.aborted;
      continue;
    }
    ++row.used;
    if (!out.converged) ++row.nonconverged;
    sum.ari += out.metrics.ari;
    sum.error_rate += out.metrics.error_rate;
    sum.sensitivity += out.metrics.sensitivity;
    sum.specificity += out.metrics.specificity;
    sum.precision += out.metrics.precision;
    sum.f1 += out.metrics.f1;
    sum.balanced_accuracy += out.metrics.balanced_accuracy;
    sum.auc += out.metrics.auc;
    sum.log_loss += out.metrics.log_loss;
    if (out.metrics.precision_undefined) ++row.precision_undefined_count;
    if (out.metrics.auc_undefined) ++row.auc_undefined_count;
    iter_sum += out.iterations;
    eps_hat.push_back(out.estimate.epsilon);
    delta_hat.push_back(out.estimate.delta);
    tau_hat.push_back(out.estimate.tau);
  }
  if (row.used > 0) {
    const double n = static_cast<double>(row.used);
    row.mean_metrics.ari = sum.ari / n;
    row.mean_metrics.error_rate = sum.error_rate / n;
    row.mean_metrics.sensitivity = sum.sensitivity / n;
    row.mean_metrics.specificity = sum.specificity / n;
    row.mean_metrics.precision = sum.precision / n;
    row.mean_metrics.f1 = sum.f1 / n;
    row.mean_metrics.balanced_accuracy = sum.balanced_accuracy / n;
    row.mean_metrics.auc = sum.auc / n;
    row.mean_metrics.log_loss = sum.log_loss / n;
    row.mean_iterations = iter_sum / n;
    row.estimation.proportion = bias_rmse(eps_hat, scenario.truth.epsilon);
    row.estimation.location = bias_rmse(delta_hat, scenario.truth.delta);
    row.estimation.scale = bias_rmse(tau_hat, scenario.truth.tau);
    row.estimation.replicates = row.used;
  }
  return row;
}

std::pair<GridRow, GridRow> run_scenario(const Scenario& scenario,
                                         std::size_t replicates,
                                         std::uint64_t seed, const EmConfig& em,
                                         int jobs) {
  std::vector<ReplicateResult> results(replicates);
  const int workers = std::max(1, std::min<int>(jobs, replicates));
  if (workers == 1) {
    for (std::size_t b = 0; b < replicates; ++b) {
      results[b] = run_replicate(scenario, b, seed, em);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
      for (;;) {
        const std::size_t b = next.fetch_add(1);
        if (b >= replicates) return;
        results[b] = run_replicate(scenario, b, seed, em);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  std::vector<ReplicateOutcome> ns_outcomes, srs_outcomes;
  ns_outcomes.reserve(replicates);
  srs_outcomes.reserve(replicates);
  for (const auto& r : results) {
    ns_outcomes.push_back(r.ns);
    srs_outcomes.push_back(r.srs);
  }
  return {aggregate_outcomes(scenario, Method::kFscNs, ns_outcomes),
          aggregate_outcomes(scenario, Method::kFscSrs, srs_outcomes)};
}

std::vector<GridRow> run_grid(const SimConfig& config) {
  config.validate();
  std::vector<GridRow> rows;
  for (double eps : config.epsilon_grid) {
    for (double delta : config.delta_grid) {
      for (double tau : config.tau_grid) {
        for (int k : config.k_grid) {
          for (double rho : config.rho_grid) {
            for (double w3 : config.w3_grid) {
              for (std::size_t n3 : config.n3_grid) {
                Scenario sc;
                sc.truth = RareEventParams{eps, delta, tau};
                sc.k = SetSize{k};
                sc.rho = rho;
                sc.w3 = w3;
                sc.n1 = config.n1;
                sc.n2 = config.n2;
                sc.n3 = n3;
                auto [ns_row, srs_row] = run_scenario(
                    sc, config.replicates, config.seed, config.em, config.jobs);
                rows.push_back(std::move(ns_row));
                rows.push_back(std::move(srs_row));
              }
            }
          }
        }
      }
    }
  }
  return rows;
}

std::string grid_csv_header() {
  return "epsilon,delta,tau,k,rho,w3,n1,n2,n3,method,replicates,used,aborted,"
         "nonconverged,ari,error_rate,sensitivity,specificity,precision,f1,"
         "balanced_accuracy,auc,log_loss,precision_undefined_count,"
         "auc_undefined_count,bias_epsilon,rmse_epsilon,bias_delta,rmse_delta,"
         "bias_tau,rmse_tau,mean_iterations";
}

std::string grid_row_csv(const GridRow& row) {
  const auto& sc = row.scenario;
  std::vector<std::string> f;
  f.push_back(format_double(sc.truth.epsilon));
  f.push_back(format_double(sc.truth.delta));
  f.push_back(format_double(sc.truth.tau));
  f.push_back(std::to_string(sc.k.k));
  f.push_back(format_double(sc.rho));
  f.push_back(format_double(sc.w3));
  f.push_back(std::to_string(sc.n1));
  f.push_back(std::to_string(sc.n2));
  f.push_back(std::to_string(sc.n3));
  f.push_back(method_name(row.method));
  f.push_back(std::to_string(row.replicates));
  f.push_back(std::to_string(row.used));
  f.push_back(std::to_string(row.aborted));
  f.push_back(std::to_string(row.nonconverged));
  const auto& m = row.mean_metrics;
  for (double v : {m.ari, m.error_rate, m.sensitivity, m.specificity,
                   m.precision, m.f1, m.balanced_accuracy, m.auc, m.log_loss}) {
    f.push_back(format_double(v));
  }
  f.push_back(std::to_string(row.precision_undefined_count));
  f.push_back(std::to_string(row.auc_undefined_count));
  const auto& est = row.estimation;
  for (double v : {est.proportion.bias, est.proportion.rmse, est.location.bias,
                   est.location.rmse, est.scale.bias, est.scale.rmse}) {
    f.push_back(format_double(v));
  }
  f.push_back(format_double(row.mean_iterations));
  return csv_row(f);
}

LemmaCurves lemma_demo(const MixtureParams& psi0, SetSize k, std::size_t n,
                       std::uint64_t seed, bool with_surfaces) {
  psi0.validate();
  k.validate();
  if (n < 2) throw std::invalid_argument("lemma demo needs n >= 2");

  RngStream rng(RngSeed{seed, 0});
  std::vector<double> data(n);
  for (auto& x : data) x = draw_ns_max(psi0, k, rng).value;

  LemmaCurves out;
  for (int i = 1; i <= 99; ++i) out.pi_grid.push_back(i / 100.0);
  out.correct.reserve(out.pi_grid.size());
  out.improper.reserve(out.pi_grid.size());
  for (double p : out.pi_grid) {
    MixtureParams psi = psi0;
    psi.pi = p;
    out.correct.push_back(log_ns_likelihood(data, psi, k));
    out.improper.push_back(log_improper_likelihood(data, psi, k));
  }
  auto shift_to_zero = [](std::vector<double>& v, const std::vector<double>& grid,
                          double* argmax) {
    const auto it = std::max_element(v.begin(), v.end());
    *argmax = grid[it - v.begin()];
    const double top = *it;
    for (double& x : v) x -= top;
  };
  shift_to_zero(out.correct, out.pi_grid, &out.argmax_correct);
  shift_to_zero(out.improper, out.pi_grid, &out.argmax_improper);

  if (with_surfaces) {
    out.has_surfaces = true;
    const double mu0 = psi0.comp2.mu;
    const double s0 = psi0.comp2.sigma;
    for (int i = 0; i <= 40; ++i) {
      out.mu2_grid.push_back(mu0 - 2.0 + i * 0.1);
      out.sigma2_grid.push_back(std::max(0.5 * s0 + i * (1.5 * s0 / 40.0), kSigmaFloor));
    }
    double best_c = -std::numeric_limits<double>::infinity();
    double best_w = best_c;
    out.surface_correct.assign(out.mu2_grid.size(),
                               std::vector<double>(out.sigma2_grid.size()));
    out.surface_improper = out.surface_correct;
    for (std::size_t i = 0; i < out.mu2_grid.size(); ++i) {
      for (std::size_t j = 0; j < out.sigma2_grid.size(); ++j) {
        MixtureParams psi = psi0;
        psi.comp2 = ComponentParams{out.mu2_grid[i], out.sigma2_grid[j]};
        const double lc = log_ns_likelihood(data, psi, k);
        const double lw = log_improper_likelihood(data, psi, k);
        out.surface_correct[i][j] = lc;
        out.surface_improper[i][j] = lw;
        if (lc > best_c) {
          best_c = lc;
          out.mu2_hat_correct = out.mu2_grid[i];
          out.sigma2_hat_correct = out.sigma2_grid[j];
        }
        if (lw > best_w) {
          best_w = lw;
          out.mu2_hat_improper = out.mu2_grid[i];
          out.sigma2_hat_improper = out.sigma2_grid[j];
        }
      }
    }
    for (auto& r : out.surface_correct) {
      for (double& v : r) v -= best_c;
    }
    for (auto& r : out.surface_improper) {
      for (double& v : r) v -= best_w;
    }
  }
  return out;
}

}  // namespace fscns
