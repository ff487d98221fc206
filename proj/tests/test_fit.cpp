#include <doctest.h>

#include <cmath>
#include <vector>

#include "fscns/em.hpp"
#include "oracles.hpp"

using namespace fscns;

namespace {

const MixtureParams kRef{0.40, ComponentParams{0.0, 1.0},
                         ComponentParams{3.5, 1.2}};

void check_ascent(const FitResult& fit) {
  for (std::size_t t = 1; t < fit.loglik_trace.size(); ++t) {
    CHECK(fit.loglik_trace[t] >= fit.loglik_trace[t - 1] - 1e-8);
  }
  CHECK(fit.iterations <= 500);
}

void check_posterior_bounds(const FitResult& fit, int k) {
  for (double z : fit.posteriors.z_tilde) {
    CHECK(z >= 0.0);
    CHECK(z <= 1.0);
  }
  for (double v : fit.posteriors.v_tilde) {
    CHECK(v >= 0.0);
    CHECK(v <= k - 1.0);
  }
}

}  // namespace

TEST_CASE("k=1 NS and SRS fits are identical") {
  RngStream seeds(RngSeed{31, 0});
  for (int rep = 0; rep < 20; ++rep) {
    const double pi0 = 0.2 + 0.6 * seeds.uniform01();
    const MixtureParams gen{pi0, ComponentParams{0.0, 1.0},
                            ComponentParams{3.0 + seeds.uniform01(), 1.2}};
    const auto data = generate_dataset(gen, SetSize{1}, 15, 10, 120,
                                       RankingModel::perfect(),
                                       RngSeed{32, static_cast<std::uint64_t>(rep)});
    const Weights w{1.0, 1.0, 2.0};
    EmConfig cfg;
    const auto ns = fit_fsc_ns(data, w, cfg, MixtureModel::kGeneralGaussian);
    const auto srs = fit_fsc_srs(data, w, cfg, MixtureModel::kGeneralGaussian);

    REQUIRE(ns.loglik_trace.size() == srs.loglik_trace.size());
    for (std::size_t t = 0; t < ns.loglik_trace.size(); ++t) {
      CHECK(std::abs(ns.loglik_trace[t] - srs.loglik_trace[t]) <= 1e-8);
    }
    CHECK(std::abs(ns.mixture().pi - srs.mixture().pi) <= 1e-8);
    CHECK(std::abs(ns.mixture().comp1.mu - srs.mixture().comp1.mu) <= 1e-8);
    CHECK(std::abs(ns.mixture().comp1.sigma - srs.mixture().comp1.sigma) <= 1e-8);
    CHECK(std::abs(ns.mixture().comp2.mu - srs.mixture().comp2.mu) <= 1e-8);
    CHECK(std::abs(ns.mixture().comp2.sigma - srs.mixture().comp2.sigma) <= 1e-8);
    CHECK(ns.classifications == srs.classifications);
  }
}

TEST_CASE("w3=0 converges in at most two iterations") {
  const auto data = generate_dataset(kRef, SetSize{3}, 20, 10, 200,
                                     RankingModel::perfect(), RngSeed{33, 0});
  const Weights w{1.0, 1.0, 0.0};
  EmConfig cfg;
  const auto fit = fit_fsc_ns(data, w, cfg, MixtureModel::kGeneralGaussian);
  CHECK(fit.converged);
  CHECK(fit.iterations <= 2);
  check_ascent(fit);

  const MixtureParams rare_gen{0.95, ComponentParams{0.0, 1.0},
                               ComponentParams{4.0, 1.5}};
  const auto rare_data = generate_dataset(rare_gen, SetSize{3}, 20, 10, 200,
                                          RankingModel{0.85}, RngSeed{33, 1});
  const auto rare_fit = fit_fsc_ns(rare_data, w, cfg, MixtureModel::kRareEvent);
  CHECK(rare_fit.converged);
  CHECK(rare_fit.iterations <= 2);
}

TEST_CASE("general fit recovers the mixture and keeps invariants") {
  const auto data = generate_dataset(kRef, SetSize{3}, 30, 20, 400,
                                     RankingModel::perfect(), RngSeed{34, 0});
  const Weights w{1.0, 1.0, 2.0};
  EmConfig cfg;
  const auto fit = fit_fsc_ns(data, w, cfg, MixtureModel::kGeneralGaussian);
  CHECK(fit.converged);
  check_ascent(fit);
  check_posterior_bounds(fit, data.k.k);

  const auto& psi = fit.mixture();
  CHECK(psi.pi > 0.2);
  CHECK(psi.pi < 0.6);
  CHECK(std::abs(psi.comp1.mu) < 0.6);
  CHECK(std::abs(psi.comp2.mu - 3.5) < 0.6);
  CHECK(psi.comp1.sigma > 0.6);
  CHECK(psi.comp1.sigma < 1.6);
  CHECK(fit.classifications.size() == data.n3());
}

TEST_CASE("rare-event fit recovers (epsilon, delta, tau) under enrichment") {
  const MixtureParams gen{0.95, ComponentParams{0.0, 1.0},
                          ComponentParams{4.0, 1.5}};
  const auto data = generate_dataset(gen, SetSize{3}, 20, 10, 500,
                                     RankingModel{0.85}, RngSeed{35, 0});
  const Weights w{1.0, 1.0, 3.0};
  EmConfig cfg;
  const auto fit = fit_fsc_ns(data, w, cfg, MixtureModel::kRareEvent);
  check_ascent(fit);
  check_posterior_bounds(fit, data.k.k);

  const auto& psi = fit.rare();
  CHECK(psi.epsilon > 0.005);
  CHECK(psi.epsilon < 0.2);
  CHECK(std::abs(psi.delta - 4.0) < 1.0);
  CHECK(std::abs(psi.tau - 1.5) < 0.8);

  // The SRS baseline on the same data inflates epsilon.
  const auto srs = fit_fsc_srs(data, w, cfg, MixtureModel::kRareEvent);
  check_ascent(srs);
  CHECK(srs.rare().epsilon > psi.epsilon);
}

TEST_CASE("explicit and labeled-moments initialization") {
  const auto data = generate_dataset(kRef, SetSize{2}, 15, 15, 100,
                                     RankingModel::perfect(), RngSeed{36, 0});
  const Weights w{1.0, 1.0, 1.0};

  EmConfig explicit_cfg;
  explicit_cfg.init = InitRule::kExplicit;
  explicit_cfg.init_params = kRef;
  const auto fit = fit_fsc_ns(data, w, explicit_cfg, MixtureModel::kGeneralGaussian);
  CHECK(fit.loglik_trace.front() ==
        doctest::Approx(weighted_loglik(data, kRef, w, LikelihoodMode::kNs)));

  EmConfig lm_cfg;
  lm_cfg.init = InitRule::kLabeledMoments;
  const auto fit2 = fit_fsc_ns(data, w, lm_cfg, MixtureModel::kGeneralGaussian);
  check_ascent(fit2);

  EmConfig wrong;
  wrong.init = InitRule::kExplicit;
  wrong.init_params = RareEventParams{0.05, 4.0, 1.5};
  CHECK_THROWS(fit_fsc_ns(data, w, wrong, MixtureModel::kGeneralGaussian));
}

TEST_CASE("degenerate abort surfaces as DegenerateError") {
  FscDataset data;
  data.k = SetSize{2};
  data.labeled1 = {0.0, 0.1};
  data.labeled2 = {3.0, 3.1};
  data.unlabeled = {0.05, 3.05};
  EmConfig cfg;
  // Rare fit with zero weight on both rare data sources has no information
  // about (delta, tau).
  const Weights w{1.0, 0.0, 0.0};
  CHECK_THROWS_AS(fit_fsc_ns(data, w, cfg, MixtureModel::kRareEvent),
                  DegenerateError);
}

TEST_CASE("non-convergence is flagged, not thrown") {
  const auto data = generate_dataset(kRef, SetSize{3}, 20, 10, 200,
                                     RankingModel::perfect(), RngSeed{37, 0});
  EmConfig cfg;
  cfg.max_iter = 1;
  const auto fit = fit_fsc_ns(data, Weights{1.0, 1.0, 3.0}, cfg,
                              MixtureModel::kGeneralGaussian);
  CHECK_FALSE(fit.converged);
  CHECK(fit.iterations == 1);
}

TEST_CASE("classification threshold moves the decision boundary") {
  const MixtureParams gen{0.95, ComponentParams{0.0, 1.0},
                          ComponentParams{4.0, 1.5}};
  const auto data = generate_dataset(gen, SetSize{3}, 20, 10, 300,
                                     RankingModel::perfect(), RngSeed{38, 0});
  EmConfig lo, hi;
  lo.threshold = 0.1;
  hi.threshold = 0.9;
  const auto fit_lo = fit_fsc_ns(data, Weights{1, 1, 3}, lo, MixtureModel::kRareEvent);
  const auto fit_hi = fit_fsc_ns(data, Weights{1, 1, 3}, hi, MixtureModel::kRareEvent);
  std::size_t pos_lo = 0, pos_hi = 0;
  for (int c : fit_lo.classifications) pos_lo += c == 2 ? 1 : 0;
  for (int c : fit_hi.classifications) pos_hi += c == 2 ? 1 : 0;
  CHECK(pos_lo >= pos_hi);
}
