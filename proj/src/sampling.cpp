#include "fscns/sampling.hpp"

#include <cmath>

namespace fscns {

double draw_ns_max(const ComponentParams& source, SetSize k, RngStream& rng) {
  k.validate();
  double best = rng.normal(source.mu, source.sigma);
  for (int j = 1; j < k.k; ++j) {
    best = std::max(best, rng.normal(source.mu, source.sigma));
  }
  return best;
}

namespace {

NominatedDraw draw_mixture_unit(const MixtureParams& source, RngStream& rng) {
  NominatedDraw d;
  if (rng.uniform01() < source.pi) {
    d.component = 1;
    d.value = rng.normal(source.comp1.mu, source.comp1.sigma);
  } else {
    d.component = 2;
    d.value = rng.normal(source.comp2.mu, source.comp2.sigma);
  }
  return d;
}

}  // namespace

NominatedDraw draw_ns_max(const MixtureParams& source, SetSize k,
                          RngStream& rng) {
  k.validate();
  NominatedDraw best = draw_mixture_unit(source, rng);
  for (int j = 1; j < k.k; ++j) {
    NominatedDraw cand = draw_mixture_unit(source, rng);
    if (cand.value > best.value) best = cand;
  }
  return best;
}

MixtureMoments mixture_moments(const MixtureParams& psi) {
  const double m = psi.pi * psi.comp1.mu + (1.0 - psi.pi) * psi.comp2.mu;
  const double second =
      psi.pi * (psi.comp1.sigma * psi.comp1.sigma + psi.comp1.mu * psi.comp1.mu) +
      (1.0 - psi.pi) *
          (psi.comp2.sigma * psi.comp2.sigma + psi.comp2.mu * psi.comp2.mu);
  return MixtureMoments{m, std::sqrt(second - m * m)};
}

NominatedDraw draw_ns_max_dell_clutter(const MixtureParams& source, SetSize k,
                                       const RankingModel& ranking,
                                       RngStream& rng) {
  k.validate();
  ranking.validate();
  const MixtureMoments mom = mixture_moments(source);
  const double noise = std::sqrt(1.0 - ranking.rho * ranking.rho);

  NominatedDraw best;
  double best_q = 0.0;
  for (int j = 0; j < k.k; ++j) {
    NominatedDraw cand = draw_mixture_unit(source, rng);
    const double y_std = (cand.value - mom.mean) / mom.sd;
    const double q = ranking.rho * y_std + noise * rng.normal();
    if (j == 0 || q > best_q) {
      best = cand;
      best_q = q;
    }
  }
  return best;
}

FscDataset generate_dataset(const MixtureParams& psi, SetSize k,
                            std::size_t n1, std::size_t n2, std::size_t n3,
                            const RankingModel& ranking, RngSeed seed) {
  psi.validate();
  k.validate();
  ranking.validate();
  if (n1 == 0 && n2 == 0 && n3 == 0) {
    throw InsufficientDataError("all group sizes are zero");
  }

  RngStream rng(seed);
  FscDataset ds;
  ds.k = k;
  ds.labeled1.reserve(n1);
  ds.labeled2.reserve(n2);
  ds.unlabeled.reserve(n3);
  ds.truth = std::vector<int>();
  ds.truth->reserve(n3);

  for (std::size_t i = 0; i < n1; ++i) {
    ds.labeled1.push_back(draw_ns_max(psi.comp1, k, rng));
  }
  for (std::size_t j = 0; j < n2; ++j) {
    ds.labeled2.push_back(draw_ns_max(psi.comp2, k, rng));
  }
  for (std::size_t r = 0; r < n3; ++r) {
    NominatedDraw d = draw_ns_max_dell_clutter(psi, k, ranking, rng);
    ds.unlabeled.push_back(d.value);
    ds.truth->push_back(d.component);
  }
  return ds;
}

}  // namespace fscns
