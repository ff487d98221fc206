#include "fscns/wdbc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "fscns/io.hpp"

namespace fscns {

namespace {

constexpr std::size_t kExpectedMalignant = 212;
constexpr std::size_t kExpectedBenign = 357;
constexpr std::size_t kFeatureCount = 30;
constexpr std::size_t kRadiusWorstColumn = 22;  // 0-based file column
constexpr std::size_t kAreaWorstColumn = 25;

}  // namespace

std::vector<WdbcRecord> load_wdbc(const std::string& path,
                                  bool require_canonical_counts) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open data file: " + path);

  std::vector<WdbcRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> fields;
    std::string item;
    std::istringstream row(line);
    while (std::getline(row, item, ',')) fields.push_back(item);
    if (fields.size() != 2 + kFeatureCount) {
      throw ParseError("wdbc row " + std::to_string(lineno) + ": expected " +
                       std::to_string(2 + kFeatureCount) + " columns, got " +
                       std::to_string(fields.size()));
    }
    WdbcRecord rec;
    rec.id = fields[0];
    if (fields[1] != "M" && fields[1] != "B") {
      throw ParseError("wdbc row " + std::to_string(lineno) +
                       ": diagnosis must be M or B");
    }
    rec.diagnosis = fields[1][0];
    try {
      rec.radius_worst = std::stod(fields[kRadiusWorstColumn]);
      rec.area_worst = std::stod(fields[kAreaWorstColumn]);
    } catch (const std::exception&) {
      throw ParseError("wdbc row " + std::to_string(lineno) + ": bad number");
    }
    if (!(rec.area_worst > 0.0) || !(rec.radius_worst > 0.0)) {
      throw ParseError("wdbc row " + std::to_string(lineno) +
                       ": nonpositive measurement");
    }
    rec.y = std::log(rec.area_worst);
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw ParseError("wdbc file is empty: " + path);

  std::size_t malignant = 0;
  for (const auto& r : records) malignant += r.diagnosis == 'M' ? 1 : 0;
  const std::size_t benign = records.size() - malignant;
  if (require_canonical_counts &&
      (malignant != kExpectedMalignant || benign != kExpectedBenign)) {
    throw ParseError("wdbc class counts " + std::to_string(malignant) + "M/" +
                     std::to_string(benign) +
                     "B do not match the canonical 212M/357B file");
  }
  return records;
}

namespace {

// Draws m distinct entries from pool (removing them) via partial
// Fisher-Yates on the index vector.
std::vector<std::size_t> draw_without_replacement(std::vector<std::size_t>& pool,
                                                  std::size_t m,
                                                  RngStream& rng) {
  std::vector<std::size_t> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + rng.uniform_below(pool.size() - i);
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  pool.erase(pool.begin(), pool.begin() + m);
  return out;
}

// Nominates the unit with the largest radius_worst; ties go to the record
// earlier in the file.
std::size_t nominate(const std::vector<WdbcRecord>& records,
                     std::span<const std::size_t> set) {
  std::size_t best = set[0];
  for (std::size_t idx : set.subspan(1)) {
    if (records[idx].radius_worst > records[best].radius_worst ||
        (records[idx].radius_worst == records[best].radius_worst &&
         idx < best)) {
      best = idx;
    }
  }
  return best;
}

}  // namespace

FscDataset build_replicate(const std::vector<WdbcRecord>& records,
                           const WdbcConfig& config, SetSize k, RngSeed seed) {
  k.validate();
  const std::size_t ku = static_cast<std::size_t>(k.k);

  std::vector<std::size_t> malignant, benign;
  for (std::size_t i = 0; i < records.size(); ++i) {
    (records[i].diagnosis == 'M' ? malignant : benign).push_back(i);
  }
  if (config.n1 * ku > malignant.size()) {
    throw InsufficientDataError("need " + std::to_string(config.n1 * ku) +
                                " malignant records, have " +
                                std::to_string(malignant.size()));
  }
  if (config.n2 * ku > benign.size()) {
    throw InsufficientDataError("need " + std::to_string(config.n2 * ku) +
                                " benign records, have " +
                                std::to_string(benign.size()));
  }
  if ((config.n1 + config.n2 + config.n3) * ku > records.size()) {
    throw InsufficientDataError("replicate consumes more records than exist");
  }

  RngStream rng(seed);
  const auto lab1_units = draw_without_replacement(malignant, config.n1 * ku, rng);
  const auto lab2_units = draw_without_replacement(benign, config.n2 * ku, rng);

  std::vector<std::size_t> pool;
  pool.reserve(malignant.size() + benign.size());
  pool.insert(pool.end(), malignant.begin(), malignant.end());
  pool.insert(pool.end(), benign.begin(), benign.end());
  std::sort(pool.begin(), pool.end());  // file order before drawing
  const auto unl_units = draw_without_replacement(pool, config.n3 * ku, rng);

  FscDataset ds;
  ds.k = k;
  ds.truth = std::vector<int>();
  auto emit_sets = [&](const std::vector<std::size_t>& units,
                       std::vector<double>& dest, bool record_truth) {
    for (std::size_t s = 0; s * ku < units.size(); ++s) {
      const std::span<const std::size_t> set(units.data() + s * ku, ku);
      const std::size_t win = nominate(records, set);
      dest.push_back(records[win].y);
      if (record_truth) {
        ds.truth->push_back(records[win].diagnosis == 'M' ? 1 : 2);
      }
    }
  };
  emit_sets(lab1_units, ds.labeled1, false);
  emit_sets(lab2_units, ds.labeled2, false);
  emit_sets(unl_units, ds.unlabeled, true);
  return ds;
}

namespace {

WdbcReplicateOutcome score_wdbc_fit(const FitResult& fit,
                                    const FscDataset& data) {
  WdbcReplicateOutcome out;
  out.converged = fit.converged;
  out.iterations = fit.iterations;
  out.pi_hat = fit.mixture().pi;

  const auto& truth = *data.truth;
  const std::size_t n3 = data.n3();
  std::vector<bool> truth_pos(n3), pred_pos(n3);
  std::vector<int> truth_labels(n3);
  for (std::size_t r = 0; r < n3; ++r) {
    truth_pos[r] = truth[r] == 1;  // malignant is the positive class
    pred_pos[r] = fit.classifications[r] == 1;
    truth_labels[r] = truth[r];
  }
  out.metrics = confusion_metrics(count_confusion(pred_pos, truth_pos));
  out.metrics.ari = adjusted_rand_index(truth_labels, fit.classifications);
  // General orientation: z_tilde is the component-1 (malignant) posterior.
  out.metrics.auc =
      auc(fit.posteriors.z_tilde, truth_pos, &out.metrics.auc_undefined);
  out.metrics.log_loss = log_loss(fit.posteriors.z_tilde, truth_pos);
  return out;
}

WdbcRow aggregate_wdbc(int k, double w3, Method method,
                       const std::vector<WdbcReplicateOutcome>& outcomes) {
  WdbcRow row;
  row.k = k;
  row.w3 = w3;
  row.method = method;
  row.replicates = outcomes.size();
  MetricsReport sum;
  double pi_sum = 0.0, iter_sum = 0.0;
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
    pi_sum += out.pi_hat;
    iter_sum += out.iterations;
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
    row.mean_pi_hat = pi_sum / n;
    row.mean_iterations = iter_sum / n;
  }
  return row;
}

}  // namespace

std::vector<WdbcRow> run_wdbc(const WdbcConfig& config,
                              const std::vector<WdbcRecord>& records) {
  if (config.replicates < 1) {
    throw std::invalid_argument("replicates must be >= 1");
  }
  std::vector<WdbcRow> rows;
  for (int k : config.k_grid) {
    // Datasets depend on k only, so build them once per k and reuse across
    // the w3 grid (replicate b always sees the same resample).
    std::vector<FscDataset> datasets(config.replicates);
    {
      std::atomic<std::size_t> next{0};
      const int workers =
          std::max(1, std::min<int>(config.jobs, config.replicates));
      auto work = [&]() {
        for (;;) {
          const std::size_t b = next.fetch_add(1);
          if (b >= config.replicates) return;
          datasets[b] = build_replicate(records, config, SetSize{k},
                                        RngSeed{config.seed, b});
        }
      };
      std::vector<std::thread> pool;
      for (int t = 0; t < workers; ++t) pool.emplace_back(work);
      for (auto& th : pool) th.join();
    }

    for (double w3 : config.w3_grid) {
      const Weights w{1.0, 1.0, w3};
      std::vector<WdbcReplicateOutcome> ns_out(config.replicates);
      std::vector<WdbcReplicateOutcome> srs_out(config.replicates);
      std::atomic<std::size_t> next{0};
      const int workers =
          std::max(1, std::min<int>(config.jobs, config.replicates));
      auto work = [&]() {
        for (;;) {
          const std::size_t b = next.fetch_add(1);
          if (b >= config.replicates) return;
          auto fit_one = [&](Method method) {
            WdbcReplicateOutcome out;
            try {
              const FitResult fit =
                  method == Method::kFscNs
                      ? fit_fsc_ns(datasets[b], w, config.em,
                                   MixtureModel::kGeneralGaussian)
                      : fit_fsc_srs(datasets[b], w, config.em,
                                    MixtureModel::kGeneralGaussian);
              out = score_wdbc_fit(fit, datasets[b]);
            } catch (const std::exception& e) {
              out.aborted = true;
              out.abort_reason = e.what();
            }
            return out;
          };
          ns_out[b] = fit_one(Method::kFscNs);
          srs_out[b] = fit_one(Method::kFscSrs);
        }
      };
      std::vector<std::thread> pool;
      for (int t = 0; t < workers; ++t) pool.emplace_back(work);
      for (auto& th : pool) th.join();

      rows.push_back(aggregate_wdbc(k, w3, Method::kFscNs, ns_out));
      rows.push_back(aggregate_wdbc(k, w3, Method::kFscSrs, srs_out));
    }
  }
  return rows;
}

std::string wdbc_csv_header() {
  return "k,w3,method,replicates,used,aborted,nonconverged,ari,error_rate,"
         "sensitivity,specificity,precision,f1,balanced_accuracy,auc,log_loss,"
         "precision_undefined_count,auc_undefined_count,pi_hat,"
         "mean_iterations,seed";
}

std::string wdbc_row_csv(const WdbcRow& row, std::uint64_t seed) {
  std::vector<std::string> f;
  f.push_back(std::to_string(row.k));
  f.push_back(format_double(row.w3));
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
  f.push_back(format_double(row.mean_pi_hat));
  f.push_back(format_double(row.mean_iterations));
  f.push_back(std::to_string(seed));
  return csv_row(f);
}

}  // namespace fscns
