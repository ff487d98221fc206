#include "fscns/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fscns/dist.hpp"
#include "fscns/mixture.hpp"
#include "fscns/quadrature.hpp"

namespace fscns {

double posterior_positive(double y, const RareEventParams& params) {
  params.validate();
  const double rare = std::log(params.epsilon) +
                      normal_log_pdf(y, ComponentParams{params.delta, params.tau});
  const double bg = std::log1p(-params.epsilon) +
                    normal_log_pdf(y, ComponentParams{0.0, 1.0});
  return std::exp(rare - log_sum_exp(rare, bg));
}

double posterior_positive(double y, const MixtureParams& params,
                          bool positive_is_component1) {
  params.validate();
  const double l1 = std::log(params.pi) + normal_log_pdf(y, params.comp1);
  const double l2 = std::log1p(-params.pi) + normal_log_pdf(y, params.comp2);
  const double pos = positive_is_component1 ? l1 : l2;
  return std::exp(pos - log_sum_exp(l1, l2));
}

std::vector<bool> classify(std::span<const double> scores, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("classification threshold must lie in (0,1)");
  }
  std::vector<bool> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = scores[i] > threshold;
  }
  return out;
}

ConfusionCounts count_confusion(const std::vector<bool>& predicted_positive,
                                const std::vector<bool>& truth_positive) {
  if (predicted_positive.size() != truth_positive.size()) {
    throw std::invalid_argument("prediction/truth length mismatch");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth_positive.size(); ++i) {
    if (truth_positive[i]) {
      predicted_positive[i] ? ++c.tp : ++c.fn;
    } else {
      predicted_positive[i] ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

MetricsReport confusion_metrics(const ConfusionCounts& c) {
  if (c.total() == 0) throw std::invalid_argument("empty confusion counts");
  MetricsReport m;
  const double tp = static_cast<double>(c.tp);
  const double fp = static_cast<double>(c.fp);
  const double tn = static_cast<double>(c.tn);
  const double fn = static_cast<double>(c.fn);

  m.error_rate = (fp + fn) / (tp + fp + tn + fn);
  m.sensitivity = (tp + fn) > 0.0 ? tp / (tp + fn) : 0.0;
  m.specificity = (tn + fp) > 0.0 ? tn / (tn + fp) : 0.0;
  if (tp + fp > 0.0) {
    m.precision = tp / (tp + fp);
  } else {
    m.precision = 0.0;
    m.precision_undefined = true;
  }
  if (!m.precision_undefined && (m.precision + m.sensitivity) > 0.0) {
    m.f1 = 2.0 * m.precision * m.sensitivity / (m.precision + m.sensitivity);
  } else {
    m.f1 = 0.0;
  }
  m.balanced_accuracy = 0.5 * (m.sensitivity + m.specificity);
  return m;
}

double adjusted_rand_index(std::span<const int> truth,
                           std::span<const int> pred) {
  if (truth.size() != pred.size()) {
    throw std::invalid_argument("ARI label vectors must have equal length");
  }
  const std::size_t n = truth.size();
  if (n < 2) throw std::invalid_argument("ARI needs at least two items");

  auto relabel = [](std::span<const int> xs) {
    std::vector<int> uniq(xs.begin(), xs.end());
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    std::vector<std::size_t> idx(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      idx[i] = std::lower_bound(uniq.begin(), uniq.end(), xs[i]) - uniq.begin();
    }
    return std::pair(idx, uniq.size());
  };
  const auto [ti, tn] = relabel(truth);
  const auto [pi_, pn] = relabel(pred);

  std::vector<std::vector<std::size_t>> table(tn, std::vector<std::size_t>(pn, 0));
  std::vector<std::size_t> row(tn, 0), col(pn, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++table[ti[i]][pi_[i]];
    ++row[ti[i]];
    ++col[pi_[i]];
  }

  auto choose2 = [](std::size_t m) {
    return m < 2 ? 0.0 : 0.5 * static_cast<double>(m) * static_cast<double>(m - 1);
  };
  double sum_cells = 0.0;
  for (const auto& r : table) {
    for (std::size_t v : r) sum_cells += choose2(v);
  }
  double sum_rows = 0.0, sum_cols = 0.0;
  for (std::size_t v : row) sum_rows += choose2(v);
  for (std::size_t v : col) sum_cols += choose2(v);
  const double pairs = choose2(n);
  const double expected = sum_rows * sum_cols / pairs;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) {
    // Both partitions are single clusters: perfect agreement by convention.
    return 1.0;
  }
  return (sum_cells - expected) / (max_index - expected);
}

double auc(std::span<const double> scores,
           const std::vector<bool>& truth_positive, bool* undefined) {
  if (scores.size() != truth_positive.size()) {
    throw std::invalid_argument("score/truth length mismatch");
  }
  if (undefined) *undefined = false;
  std::size_t npos = 0;
  for (bool t : truth_positive) npos += t ? 1 : 0;
  const std::size_t nneg = truth_positive.size() - npos;
  if (npos == 0 || nneg == 0) {
    if (undefined) {
      *undefined = true;
      return 0.0;
    }
    throw std::invalid_argument("AUC needs both classes present");
  }

  // Rank-sum with midranks for ties.
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) {
      ++j;
    }
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) {
      if (truth_positive[order[t]]) rank_sum_pos += midrank;
    }
    i = j + 1;
  }
  const double u = rank_sum_pos - 0.5 * static_cast<double>(npos) *
                                      static_cast<double>(npos + 1);
  return u / (static_cast<double>(npos) * static_cast<double>(nneg));
}

double log_loss(std::span<const double> scores,
                const std::vector<bool>& truth_positive) {
  if (scores.size() != truth_positive.size() || scores.empty()) {
    throw std::invalid_argument("log-loss needs matching nonempty inputs");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double p = std::clamp(scores[i], 1e-12, 1.0 - 1e-12);
    total += truth_positive[i] ? -std::log(p) : -std::log1p(-p);
  }
  return total / static_cast<double>(scores.size());
}

double enrichment_ratio(const RareEventParams& params, SetSize k) {
  params.validate();
  k.validate();
  if (k.k == 1) return 1.0;

  const MixtureParams mix = params.as_mixture();
  const ComponentParams rare{params.delta, params.tau};
  const double mu_min = std::min(0.0, params.delta);
  const double mu_max = std::max(0.0, params.delta);
  const double sd_max = std::max(1.0, params.tau);
  const double lo = mu_min - 10.0 * sd_max;
  const double hi = mu_max + 10.0 * sd_max;

  return integrate(
      [&](double y) {
        return k.k * normal_pdf(y, rare) *
               std::pow(mixture_cdf(y, mix), k.k - 1);
      },
      lo, hi);
}

BiasRmse bias_rmse(std::span<const double> estimates, double truth) {
  if (estimates.empty()) throw std::invalid_argument("no estimates");
  double sum = 0.0, sq = 0.0;
  for (double e : estimates) {
    sum += e - truth;
    sq += (e - truth) * (e - truth);
  }
  const double b = static_cast<double>(estimates.size());
  return BiasRmse{sum / b, std::sqrt(sq / b)};
}

}  // namespace fscns
