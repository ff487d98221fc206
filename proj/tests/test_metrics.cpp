#include <doctest.h>

#include <cmath>
#include <vector>

#include "fscns/dist.hpp"
#include "fscns/metrics.hpp"
#include "fscns/rng.hpp"
#include "oracles.hpp"

using namespace fscns;

TEST_CASE("posterior_positive rare model") {
  RareEventParams almost_sure{1.0 - 1e-12, 4.0, 1.5};
  CHECK(posterior_positive(0.0, almost_sure) == doctest::Approx(1.0).epsilon(1e-9));

  RareEventParams ref{0.05, 4.0, 1.5};
  // Right tail is owned by the rare component when tau >= 1.
  CHECK(posterior_positive(40.0, ref) == doctest::Approx(1.0).epsilon(1e-9));

  // Recompute the ratio from the plain densities.
  const double num = 0.05 * normal_pdf(4.0, ComponentParams{4.0, 1.5});
  const double den = 0.95 * normal_pdf(4.0, ComponentParams{0.0, 1.0}) + num;
  CHECK(posterior_positive(4.0, ref) == doctest::Approx(num / den).epsilon(1e-12));
}

TEST_CASE("classify is a strict threshold rule and matches the Bayes rule") {
  const std::vector<double> scores{0.4, 0.6};
  const auto cls = classify(scores, 0.5);
  CHECK_FALSE(cls[0]);
  CHECK(cls[1]);
  const auto strict = classify(std::vector<double>{0.999, 1.0}, 0.999);
  CHECK_FALSE(strict[0]);
  CHECK(strict[1]);
  CHECK_THROWS(classify(scores, 0.0));

  // Threshold 0.5 on the component-2 posterior agrees with the density-ratio
  // rule f1/f2 > (1-pi)/pi for component 1.
  MixtureParams psi{0.35, ComponentParams{0.0, 1.0}, ComponentParams{2.5, 1.4}};
  RngStream rng(RngSeed{41, 0});
  for (int i = 0; i < 100; ++i) {
    const double y = 4.0 * rng.normal();
    const bool pos2 = posterior_positive(y, psi) > 0.5;
    const double ratio = normal_pdf(y, psi.comp1) / normal_pdf(y, psi.comp2);
    const bool comp1 = ratio > (1.0 - psi.pi) / psi.pi;
    CHECK(pos2 == !comp1);
  }
}

TEST_CASE("confusion metrics including undefined precision") {
  MetricsReport perfect = confusion_metrics(ConfusionCounts{10, 0, 90, 0});
  CHECK(perfect.sensitivity == 1.0);
  CHECK(perfect.specificity == 1.0);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.f1 == 1.0);
  CHECK(perfect.balanced_accuracy == 1.0);
  CHECK(perfect.error_rate == 0.0);
  CHECK_FALSE(perfect.precision_undefined);

  MetricsReport none = confusion_metrics(ConfusionCounts{0, 0, 100, 10});
  CHECK(none.sensitivity == 0.0);
  CHECK(none.precision == 0.0);
  CHECK(none.precision_undefined);
  CHECK(none.f1 == 0.0);

  MetricsReport mixed = confusion_metrics(ConfusionCounts{8, 2, 85, 5});
  CHECK(mixed.sensitivity == doctest::Approx(8.0 / 13.0).epsilon(1e-15));
  CHECK(mixed.precision == doctest::Approx(0.8).epsilon(1e-15));
  const double f1 = 2.0 * (0.8 * 8.0 / 13.0) / (0.8 + 8.0 / 13.0);
  CHECK(mixed.f1 == doctest::Approx(f1).epsilon(1e-15));
  CHECK(mixed.balanced_accuracy ==
        doctest::Approx(0.5 * (mixed.sensitivity + mixed.specificity)));
}

TEST_CASE("adjusted rand index against exhaustive pair counting") {
  const std::vector<int> truth{1, 1, 2, 2};
  const std::vector<int> pred{1, 2, 1, 2};
  // All C(4,2) = 6 pairs enumerated by hand: no pair agrees in both
  // partitions, expected index equals the achieved index -> ARI of a
  // chance-level table.
  double same_both = 0, same_truth = 0, same_pred = 0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      const bool t = truth[i] == truth[j];
      const bool p = pred[i] == pred[j];
      same_both += (t && p) ? 1 : 0;
      same_truth += t ? 1 : 0;
      same_pred += p ? 1 : 0;
    }
  }
  const double expected = same_truth * same_pred / 6.0;
  const double maxi = 0.5 * (same_truth + same_pred);
  const double reference = (same_both - expected) / (maxi - expected);
  CHECK(adjusted_rand_index(truth, pred) ==
        doctest::Approx(reference).epsilon(1e-15));

  CHECK(adjusted_rand_index(std::vector<int>{1, 1, 2, 2, 3},
                            std::vector<int>{1, 1, 2, 2, 3}) == 1.0);
  CHECK(adjusted_rand_index(std::vector<int>{5, 5, 5},
                            std::vector<int>{2, 2, 2}) == 1.0);

  // Relabeling invariance.
  const std::vector<int> a{1, 1, 2, 2, 2, 1, 2};
  const std::vector<int> b{2, 2, 1, 1, 1, 1, 2};
  std::vector<int> b_flipped(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) b_flipped[i] = b[i] == 1 ? 7 : -3;
  CHECK(adjusted_rand_index(a, b) ==
        doctest::Approx(adjusted_rand_index(a, b_flipped)).epsilon(1e-15));
}

TEST_CASE("random relabeling gives chance-level ARI") {
  RngStream rng(RngSeed{42, 0});
  const std::size_t n = 10'000;
  std::vector<int> truth(n);
  for (auto& t : truth) t = rng.uniform01() < 0.3 ? 1 : 2;
  double sum = 0.0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<int> pred(n);
    for (auto& p : pred) p = rng.uniform01() < 0.5 ? 1 : 2;
    sum += adjusted_rand_index(truth, pred);
  }
  CHECK(std::abs(sum / trials) < 0.02);
}

TEST_CASE("auc from exhaustive pair comparison") {
  const std::vector<double> scores{0.1, 0.4, 0.35, 0.8, 0.8};
  const std::vector<bool> truth{false, true, false, true, false};
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!truth[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (truth[j]) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  CHECK(auc(scores, truth) == doctest::Approx(wins / pairs).epsilon(1e-15));

  CHECK(auc(std::vector<double>{0.9, 0.8, 0.1, 0.2},
            std::vector<bool>{true, true, false, false}) == 1.0);
  CHECK(auc(std::vector<double>{0.5, 0.5, 0.5},
            std::vector<bool>{true, false, true}) == 0.5);

  bool undefined = false;
  CHECK(auc(std::vector<double>{0.5, 0.6}, std::vector<bool>{true, true},
            &undefined) == 0.0);
  CHECK(undefined);
}

TEST_CASE("auc is invariant under monotone transforms of the scores") {
  RngStream rng(RngSeed{43, 0});
  std::vector<double> scores(200);
  std::vector<bool> truth(200);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = rng.uniform01();
    truth[i] = rng.uniform01() < 0.25;
  }
  std::vector<double> squashed(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    squashed[i] = 1.0 / (1.0 + std::exp(-7.0 * scores[i]));
  }
  CHECK(auc(scores, truth) == doctest::Approx(auc(squashed, truth)).epsilon(1e-15));
}

TEST_CASE("log loss clamps degenerate scores") {
  const std::vector<double> p{0.0, 1.0};
  const std::vector<bool> t{true, false};
  const double ll = log_loss(p, t);
  CHECK(std::isfinite(ll));
  // 1 - (1 - 1e-12) only has ~4 good digits in double, hence the loose bound.
  CHECK(ll == doctest::Approx(-std::log(1e-12)).epsilon(1e-4));

  CHECK(log_loss(std::vector<double>{0.5}, std::vector<bool>{true}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("enrichment ratio: k=1 exact, monotone in k, quadrature values") {
  const RareEventParams ref{0.05, 4.0, 1.5};
  CHECK(enrichment_ratio(ref, SetSize{1}) == 1.0);

  double prev = 1.0;
  for (int k : {2, 3, 5, 8}) {
    const double er = enrichment_ratio(ref, SetSize{k});
    CHECK(er > prev);
    prev = er;
  }

  // Frozen quadrature values (independently confirmed by simulation; see the
  // Monte Carlo cross-checks in test_sampling).
  CHECK(enrichment_ratio(ref, SetSize{2}) ==
        doctest::Approx(1.92482473).epsilon(1e-7));
  CHECK(enrichment_ratio(ref, SetSize{3}) ==
        doctest::Approx(2.79058801).epsilon(1e-7));
  CHECK(enrichment_ratio(ref, SetSize{5}) ==
        doctest::Approx(4.37264324).epsilon(1e-7));
  CHECK(enrichment_ratio(ref, SetSize{8}) ==
        doctest::Approx(6.43502474).epsilon(1e-7));
}

TEST_CASE("bias and rmse") {
  const std::vector<double> exact{0.05, 0.05, 0.05};
  auto [b0, r0] = bias_rmse(exact, 0.05);
  CHECK(b0 == 0.0);
  CHECK(r0 == 0.0);

  const std::vector<double> split{1.0, -1.0};
  auto [b1, r1] = bias_rmse(split, 0.0);
  CHECK(b1 == 0.0);
  CHECK(r1 == 1.0);

  const std::vector<double> est{0.06, 0.04, 0.05};
  auto [b2, r2] = bias_rmse(est, 0.05);
  CHECK(b2 == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r2 == doctest::Approx(std::sqrt(2.0 * 0.0001 / 3.0)).epsilon(1e-12));
  CHECK(r2 >= std::abs(b2));
}
