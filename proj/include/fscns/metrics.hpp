#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fscns/types.hpp"

namespace fscns {

// Confusion counts for the positive (rare) class.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
};

struct MetricsReport {
  double ari = 0.0;
  double error_rate = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  double balanced_accuracy = 0.0;
  double auc = 0.0;
  double log_loss = 0.0;
  // Undefined metrics are reported as 0 with the matching flag set, so that
  // replicate averaging stays well defined.
  bool precision_undefined = false;
  bool auc_undefined = false;
};

struct BiasRmse {
  double bias = 0.0;
  double rmse = 0.0;
};

// Per-parameter bias/RMSE over B replicates.
struct EstimatorSummary {
  BiasRmse proportion;  // epsilon or pi
  BiasRmse location;    // delta or mu2
  BiasRmse scale;       // tau or sigma2
  std::size_t replicates = 0;
};

// Posterior probability that an observed maximum came from the rare
// component: eps*phi(y;delta,tau) / [(1-eps)*phi(y) + eps*phi(y;delta,tau)].
double posterior_positive(double y, const RareEventParams& params);

// General-model analogue: the component-2 posterior by default, or the
// component-1 posterior when positive_is_component1 is set.
double posterior_positive(double y, const MixtureParams& params,
                          bool positive_is_component1 = false);

// Threshold rule: positive iff score > threshold.
std::vector<bool> classify(std::span<const double> scores, double threshold);

ConfusionCounts count_confusion(const std::vector<bool>& predicted_positive,
                                const std::vector<bool>& truth_positive);

// Fills the confusion-derived fields of a MetricsReport (ari/auc/log_loss
// are computed by their own routines).
MetricsReport confusion_metrics(const ConfusionCounts& c);

// Hubert-Arabie adjusted Rand index between two label vectors.
double adjusted_rand_index(std::span<const int> truth, std::span<const int> pred);

// Mann-Whitney AUC: P(score_pos > score_neg) + 0.5 P(tie).
// Sets *undefined when one class is absent (and returns 0).
double auc(std::span<const double> scores,
           const std::vector<bool>& truth_positive, bool* undefined = nullptr);

// Mean negative log-likelihood of the truth under the scores, clamped to
// [1e-12, 1-1e-12].
double log_loss(std::span<const double> scores,
                const std::vector<bool>& truth_positive);

// Probability that the nominated set maximum originates from the rare
// component, divided by the prior epsilon. Evaluated by adaptive
// Gauss-Kronrod quadrature; k = 1 gives exactly 1.
double enrichment_ratio(const RareEventParams& params, SetSize k);

BiasRmse bias_rmse(std::span<const double> estimates, double truth);

}  // namespace fscns
