#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "fscns/mixture.hpp"
#include "fscns/sampling.hpp"
#include "fscns/types.hpp"

namespace fscns {

// E-step expectations for the unlabeled group. Under the general Gaussian
// model z_tilde[r] is the posterior that the observed maximum came from
// component 1 and v_tilde[r] = (k-1) * pi F1 / F counts the expected
// component-1 members among the k-1 unmeasured units. The rare-event fit
// uses the same machinery with component 1 mapped to the rare signal, so
// there z_tilde is the rare-class posterior.
struct LatentPosteriors {
  std::vector<double> z_tilde;
  std::vector<double> v_tilde;
};

enum class MixtureModel { kGeneralGaussian, kRareEvent };
enum class LikelihoodMode { kNs, kSrs };
enum class InitRule { kKmeans, kLabeledMoments, kExplicit };

struct InnerOptConfig {
  int max_iter = 50;
  double grad_tol = 1e-8;
};

struct EmConfig {
  double tol = 1e-5;
  int max_iter = 500;
  InnerOptConfig inner;
  InitRule init = InitRule::kKmeans;
  // Starting point when init == kExplicit (orientation matches the model).
  std::variant<std::monostate, MixtureParams, RareEventParams> init_params;
  std::uint64_t init_seed = 0x5EEDULL;  // k-means restart stream
  double threshold = 0.5;               // posterior classification cut
};

struct FitResult {
  MixtureModel model = MixtureModel::kGeneralGaussian;
  std::variant<MixtureParams, RareEventParams> psi;
  std::vector<double> loglik_trace;  // value at init, then one per iteration
  int iterations = 0;
  bool converged = false;
  LatentPosteriors posteriors;       // model-orientation posteriors at psi
  std::vector<int> classifications;  // 1/2 per unlabeled observation

  const MixtureParams& mixture() const { return std::get<MixtureParams>(psi); }
  const RareEventParams& rare() const { return std::get<RareEventParams>(psi); }
};

// --- E-step and closed-form updates -------------------------------------

LatentPosteriors e_step_ns(std::span<const double> y3, const MixtureParams& psi,
                           SetSize k);

// pi update sum(z+v) / (n3 k), clamped to [kPiClamp, 1-kPiClamp].
double update_pi(const LatentPosteriors& post, std::size_t n3, SetSize k);

// --- Component objective and M-step --------------------------------------

// Everything one component's update sees: its labeled group, the unlabeled
// values, and the per-observation density/cdf weights from the E-step.
struct ComponentData {
  std::span<const double> labeled;
  double labeled_weight = 1.0;
  std::span<const double> unlabeled;
  double unlabeled_weight = 1.0;
  std::span<const double> density_weights;  // e_r
  std::span<const double> cdf_weights;      // c_r
  SetSize k;
};

ComponentData component_data(int which, const FscDataset& data,
                             const LatentPosteriors& post, const Weights& w,
                             std::vector<double>& e_buf,
                             std::vector<double>& c_buf);

// w_m sum[log f + (k-1) log F] over labeled plus
// w3 sum[e_r log f + c_r log F] over unlabeled.
double component_objective(const ComponentParams& theta,
                           const ComponentData& cd);
double component_objective(const ComponentParams& theta, int which,
                           const FscDataset& data, const LatentPosteriors& post,
                           const Weights& w);

// Analytic gradient of the component objective in (mu, log sigma).
struct ComponentGradient {
  double d_mu = 0.0;
  double d_log_sigma = 0.0;
};
ComponentGradient component_objective_gradient(const ComponentParams& theta,
                                               const ComponentData& cd);

// Maximizes the component objective over (mu, log sigma): closed-form
// Gaussian start (sigma^2 centered at the current mu), then a safeguarded
// Newton refinement. Never returns a point below the objective at either
// the start or `current`.
ComponentParams maximize_component(const ComponentData& cd,
                                   const ComponentParams& current,
                                   const InnerOptConfig& opt);

ComponentParams m_step_component(int which, const FscDataset& data,
                                 const LatentPosteriors& post, const Weights& w,
                                 const EmConfig& config,
                                 const ComponentParams& current);

// Rare-event M-step: only (delta, tau) move; labeled-2 carries the rare
// group and the background is fixed at N(0,1).
ComponentParams m_step_rare(const FscDataset& data,
                            const LatentPosteriors& post, const Weights& w,
                            const EmConfig& config,
                            const ComponentParams& current);

// --- Objectives -----------------------------------------------------------

// NS mode: labeled groups contribute log f + (k-1) log F, the unlabeled
// group log[k f F^(k-1)]. SRS mode drops every cdf term and treats the
// unlabeled values as ordinary mixture draws.
double weighted_loglik(const FscDataset& data, const MixtureParams& psi,
                       const Weights& w, LikelihoodMode mode);
double weighted_loglik(const FscDataset& data, const RareEventParams& psi,
                       const Weights& w, LikelihoodMode mode);

// EM minorant at the posteriors `post` (constants in psi dropped).
double q_function(const FscDataset& data, const MixtureParams& psi,
                  const LatentPosteriors& post, const Weights& w);

// --- Initialization --------------------------------------------------------

// Two-cluster 1-D k-means on the pooled values (10 seeded restarts).
// Component 1 is the cluster whose mean is closest to the labeled-1 mean,
// falling back to ascending means when no labeled-1 data exist.
MixtureParams kmeans_init(const FscDataset& data, std::uint64_t seed = 0x5EEDULL);

// Same clustering, oriented for the rare-event model: the rare cluster is
// anchored to the labeled-2 sample.
RareEventParams rare_kmeans_init(const FscDataset& data,
                                 std::uint64_t seed = 0x5EEDULL);

// --- Fitters ----------------------------------------------------------------

// Weighted-likelihood EM under the correct NS objective.
FitResult fit_fsc_ns(const FscDataset& data, const Weights& w,
                     const EmConfig& config, MixtureModel model);

// Misspecified baseline: ordinary weighted-mixture EM that ignores k.
FitResult fit_fsc_srs(const FscDataset& data, const Weights& w,
                      const EmConfig& config, MixtureModel model);

}  // namespace fscns
