#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fscns/rng.hpp"
#include "fscns/types.hpp"

namespace fscns {

// Dell-Clutter imperfect ranking: each candidate unit is scored by
// Q = rho * Ytilde + sqrt(1-rho^2) * E with E ~ N(0,1) independent of Y,
// and the unit with the largest Q is nominated. rho = 1 is perfect ranking.
struct RankingModel {
  double rho = 1.0;

  void validate() const {
    if (!(rho >= 0.0 && rho <= 1.0)) {
      throw std::invalid_argument("ranking rho must lie in [0,1]");
    }
  }

  static RankingModel perfect() { return RankingModel{1.0}; }
};

// One nominated value together with the true component of the nominated unit
// (1 or 2, in the dataset orientation of the generating mixture).
struct NominatedDraw {
  double value = 0.0;
  int component = 1;
};

// The three NS sample groups. labeled1/labeled2 are maxima of k pure
// component draws; unlabeled are maxima of k mixture draws. truth records
// the component of each nominated unlabeled unit for scoring.
struct FscDataset {
  std::vector<double> labeled1;
  std::vector<double> labeled2;
  std::vector<double> unlabeled;
  SetSize k;
  std::optional<std::vector<int>> truth;

  std::size_t n1() const { return labeled1.size(); }
  std::size_t n2() const { return labeled2.size(); }
  std::size_t n3() const { return unlabeled.size(); }

  void validate() const {
    k.validate();
    if (labeled1.empty() && labeled2.empty() && unlabeled.empty()) {
      throw InsufficientDataError("dataset has no observations");
    }
    if (truth && truth->size() != unlabeled.size()) {
      throw std::invalid_argument("truth length must match unlabeled size");
    }
  }
};

// Maximum of k draws from a pure component (perfect ranking).
double draw_ns_max(const ComponentParams& source, SetSize k, RngStream& rng);

// Maximum of k mixture draws plus the component of the maximizing draw.
NominatedDraw draw_ns_max(const MixtureParams& source, SetSize k,
                          RngStream& rng);

// Dell-Clutter nomination from the mixture. Ytilde is standardized with the
// population moments of `source`; ties in Q go to the first unit.
NominatedDraw draw_ns_max_dell_clutter(const MixtureParams& source, SetSize k,
                                       const RankingModel& ranking,
                                       RngStream& rng);

// Population mean and standard deviation of a two-component normal mixture.
struct MixtureMoments {
  double mean = 0.0;
  double sd = 1.0;
};
MixtureMoments mixture_moments(const MixtureParams& psi);

// Assembles a full FSC dataset: labeled groups under perfect ranking from
// the pure components, unlabeled under the supplied ranking model from the
// mixture, truth vector populated.
FscDataset generate_dataset(const MixtureParams& psi, SetSize k,
                            std::size_t n1, std::size_t n2, std::size_t n3,
                            const RankingModel& ranking, RngSeed seed);

}  // namespace fscns
