#include "fscns/em.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace fscns {

namespace {

constexpr double kEmptyComponent = 1e-8;
constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;

double clamp_pi(double p) {
  return std::clamp(p, kPiClamp, 1.0 - kPiClamp);
}

double floor_sigma(double s) { return std::max(s, kSigmaFloor); }

}  // namespace

LatentPosteriors e_step_ns(std::span<const double> y3,
                           const MixtureParams& psi, SetSize k) {
  psi.validate();
  k.validate();
  const double lp = std::log(psi.pi);
  const double lq = std::log1p(-psi.pi);

  LatentPosteriors post;
  post.z_tilde.resize(y3.size());
  post.v_tilde.resize(y3.size());
  for (std::size_t r = 0; r < y3.size(); ++r) {
    const double y = y3[r];
    const double d1 = lp + normal_log_pdf(y, psi.comp1);
    const double d2 = lq + normal_log_pdf(y, psi.comp2);
    const double ld = log_sum_exp(d1, d2);
    if (!std::isfinite(ld)) {
      throw DegenerateError("mixture density vanished in E-step");
    }
    post.z_tilde[r] = std::exp(d1 - ld);

    if (k.k > 1) {
      const double c1 = lp + normal_log_cdf(y, psi.comp1);
      const double c2 = lq + normal_log_cdf(y, psi.comp2);
      const double lc = log_sum_exp(c1, c2);
      if (!std::isfinite(lc)) {
        throw DegenerateError("mixture cdf vanished in E-step");
      }
      post.v_tilde[r] = (k.k - 1) * std::exp(c1 - lc);
    } else {
      post.v_tilde[r] = 0.0;
    }
  }
  return post;
}

double update_pi(const LatentPosteriors& post, std::size_t n3, SetSize k) {
  k.validate();
  if (post.z_tilde.size() != n3 || post.v_tilde.size() != n3) {
    throw std::invalid_argument("posterior length mismatch");
  }
  if (n3 == 0) throw std::invalid_argument("update_pi needs n3 > 0");
  double total = 0.0;
  for (std::size_t r = 0; r < n3; ++r) {
    total += post.z_tilde[r] + post.v_tilde[r];
  }
  return clamp_pi(total / (static_cast<double>(n3) * k.k));
}

namespace {

ComponentData component_data_k(int which, const FscDataset& data,
                               const LatentPosteriors& post, const Weights& w,
                               SetSize k_eff, std::vector<double>& e_buf,
                               std::vector<double>& c_buf) {
  if (which != 1 && which != 2) {
    throw std::invalid_argument("component index must be 1 or 2");
  }
  const std::size_t n3 = data.n3();
  if (post.z_tilde.size() != n3) {
    throw std::invalid_argument("posteriors do not match dataset");
  }
  e_buf.resize(n3);
  c_buf.resize(n3);
  for (std::size_t r = 0; r < n3; ++r) {
    if (which == 1) {
      e_buf[r] = post.z_tilde[r];
      c_buf[r] = post.v_tilde[r];
    } else {
      e_buf[r] = 1.0 - post.z_tilde[r];
      c_buf[r] = (k_eff.k - 1) - post.v_tilde[r];
    }
  }
  ComponentData cd;
  cd.labeled = which == 1 ? std::span<const double>(data.labeled1)
                          : std::span<const double>(data.labeled2);
  cd.labeled_weight = which == 1 ? w.w1 : w.w2;
  cd.unlabeled = data.unlabeled;
  cd.unlabeled_weight = w.w3;
  cd.density_weights = e_buf;
  cd.cdf_weights = c_buf;
  cd.k = k_eff;
  return cd;
}

}  // namespace

ComponentData component_data(int which, const FscDataset& data,
                             const LatentPosteriors& post, const Weights& w,
                             std::vector<double>& e_buf,
                             std::vector<double>& c_buf) {
  return component_data_k(which, data, post, w, data.k, e_buf, c_buf);
}

double component_objective(const ComponentParams& theta,
                           const ComponentData& cd) {
  theta.validate();
  double total = 0.0;
  const double km1 = cd.k.k - 1;
  if (cd.labeled_weight > 0.0) {
    for (double y : cd.labeled) {
      double v = normal_log_pdf(y, theta);
      if (km1 > 0) v += km1 * normal_log_cdf(y, theta);
      total += cd.labeled_weight * v;
    }
  }
  if (cd.unlabeled_weight > 0.0) {
    for (std::size_t r = 0; r < cd.unlabeled.size(); ++r) {
      double v = cd.density_weights[r] * normal_log_pdf(cd.unlabeled[r], theta);
      if (cd.cdf_weights[r] != 0.0) {
        v += cd.cdf_weights[r] * normal_log_cdf(cd.unlabeled[r], theta);
      }
      total += cd.unlabeled_weight * v;
    }
  }
  return total;
}

double component_objective(const ComponentParams& theta, int which,
                           const FscDataset& data, const LatentPosteriors& post,
                           const Weights& w) {
  std::vector<double> e_buf, c_buf;
  ComponentData cd = component_data(which, data, post, w, e_buf, c_buf);
  return component_objective(theta, cd);
}

namespace {

struct ObjectiveEval {
  double value = 0.0;
  double g_mu = 0.0;
  double g_s = 0.0;  // s = log sigma
  double h_mumu = 0.0;
  double h_ss = 0.0;
  double h_mus = 0.0;
};

// Value, gradient, and Hessian of the component objective in (mu, log sigma).
ObjectiveEval eval_objective(double mu, double s, const ComponentData& cd) {
  const double sigma = std::exp(s);
  const double inv_sigma = 1.0 / sigma;
  ObjectiveEval ev;

  auto accumulate = [&](double y, double wd, double wc) {
    const double t = (y - mu) * inv_sigma;
    if (wd != 0.0) {
      ev.value += wd * (-s - kLogSqrt2Pi - 0.5 * t * t);
      ev.g_mu += wd * t * inv_sigma;
      ev.g_s += wd * (t * t - 1.0);
      ev.h_mumu -= wd * inv_sigma * inv_sigma;
      ev.h_ss -= wd * 2.0 * t * t;
      ev.h_mus -= wd * 2.0 * t * inv_sigma;
    }
    if (wc != 0.0) {
      const double lcdf = std_normal_log_cdf(t);
      const double ratio = std::exp(std_normal_log_pdf(t) - lcdf);
      const double dratio = -t * ratio - ratio * ratio;
      ev.value += wc * lcdf;
      ev.g_mu -= wc * ratio * inv_sigma;
      ev.g_s -= wc * t * ratio;
      ev.h_mumu += wc * dratio * inv_sigma * inv_sigma;
      ev.h_ss += wc * (t * ratio + t * t * dratio);
      ev.h_mus += wc * (ratio + t * dratio) * inv_sigma;
    }
  };

  const double km1 = cd.k.k - 1;
  for (double y : cd.labeled) {
    accumulate(y, cd.labeled_weight, cd.labeled_weight * km1);
  }
  for (std::size_t r = 0; r < cd.unlabeled.size(); ++r) {
    accumulate(cd.unlabeled[r], cd.unlabeled_weight * cd.density_weights[r],
               cd.unlabeled_weight * cd.cdf_weights[r]);
  }
  return ev;
}

double value_at(double mu, double s, const ComponentData& cd) {
  return component_objective(ComponentParams{mu, std::exp(s)}, cd);
}

}  // namespace

ComponentGradient component_objective_gradient(const ComponentParams& theta,
                                               const ComponentData& cd) {
  theta.validate();
  const ObjectiveEval ev = eval_objective(theta.mu, std::log(theta.sigma), cd);
  return ComponentGradient{ev.g_mu, ev.g_s};
}

namespace {

// Golden-section maximization over [lo, hi].
double golden_max(const std::function<double(double)>& f, double lo, double hi) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80 && (b - a) > 1e-12; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

// Bracket an ascent direction from x0 and golden-search inside it.
double line_max(const std::function<double(double)>& f, double x0, double step,
                double lo_bound) {
  double f0 = f(x0);
  double dir = f(x0 + step) > f(x0 - step) ? 1.0 : -1.0;
  double prev = x0, cur = x0 + dir * step;
  double fcur = f(cur);
  if (fcur <= f0) {
    // No improvement either way at this scale; search the small bracket.
    double lo = std::max(x0 - step, lo_bound);
    return golden_max(f, lo, x0 + step);
  }
  double h = step;
  for (int it = 0; it < 60; ++it) {
    h *= 2.0;
    double next = cur + dir * h;
    if (next < lo_bound) {
      next = lo_bound;
    }
    double fnext = f(next);
    if (fnext <= fcur || next == lo_bound) {
      double lo = std::min(prev, next), hi = std::max(prev, next);
      return golden_max(f, std::max(lo, lo_bound), hi);
    }
    prev = cur;
    cur = next;
    fcur = fnext;
  }
  return cur;
}

}  // namespace

ComponentParams maximize_component(const ComponentData& cd,
                                   const ComponentParams& current,
                                   const InnerOptConfig& opt) {
  const double s_floor = std::log(kSigmaFloor);

  // Closed-form Gaussian start: weighted mean, and weighted second moment
  // about the current mu (numeric refinement absorbs the re-centering).
  double weight_sum = cd.labeled_weight * static_cast<double>(cd.labeled.size());
  double y_sum = 0.0;
  for (double y : cd.labeled) y_sum += cd.labeled_weight * y;
  for (std::size_t r = 0; r < cd.unlabeled.size(); ++r) {
    weight_sum += cd.unlabeled_weight * cd.density_weights[r];
    y_sum += cd.unlabeled_weight * cd.density_weights[r] * cd.unlabeled[r];
  }
  if (!(weight_sum > kEmptyComponent)) {
    throw DegenerateError("component has vanishing effective weight");
  }
  const double mu_new = y_sum / weight_sum;

  auto weighted_sq = [&](double center) {
    double acc = 0.0;
    for (double y : cd.labeled) {
      acc += cd.labeled_weight * (y - center) * (y - center);
    }
    for (std::size_t r = 0; r < cd.unlabeled.size(); ++r) {
      const double d = cd.unlabeled[r] - center;
      acc += cd.unlabeled_weight * cd.density_weights[r] * d * d;
    }
    return acc;
  };

  const bool has_cdf_terms = cd.k.k > 1;
  if (!has_cdf_terms) {
    // No cdf contribution: the weighted Gaussian MLE is exact.
    const double var = weighted_sq(mu_new) / weight_sum;
    return ComponentParams{mu_new, floor_sigma(std::sqrt(var))};
  }

  const double var_start = weighted_sq(current.mu) / weight_sum;
  const double s_start = std::max(0.5 * std::log(std::max(var_start, kSigmaFloor * kSigmaFloor)), s_floor);

  double mu = mu_new;
  double s = s_start;
  ObjectiveEval ev = eval_objective(mu, s, cd);

  for (int it = 0; it < opt.max_iter; ++it) {
    if (std::max(std::abs(ev.g_mu), std::abs(ev.g_s)) <= opt.grad_tol) break;

    const double det = ev.h_mumu * ev.h_ss - ev.h_mus * ev.h_mus;
    const bool neg_definite = ev.h_mumu < 0.0 && det > 0.0;

    double mu_next, s_next;
    if (neg_definite) {
      // Newton direction with Armijo backtracking.
      const double d_mu = -(ev.h_ss * ev.g_mu - ev.h_mus * ev.g_s) / det;
      const double d_s = -(-ev.h_mus * ev.g_mu + ev.h_mumu * ev.g_s) / det;
      const double slope = ev.g_mu * d_mu + ev.g_s * d_s;
      double step = 1.0;
      bool improved = false;
      for (int ls = 0; ls < 40; ++ls) {
        mu_next = mu + step * d_mu;
        s_next = std::max(s + step * d_s, s_floor);
        const double f_next = value_at(mu_next, s_next, cd);
        if (std::isfinite(f_next) &&
            f_next >= ev.value + 1e-4 * step * slope) {
          improved = true;
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
    } else {
      // Hessian not usable here: golden-section sweep, one coordinate at a
      // time, in the natural scales of the problem.
      const double sigma = std::exp(s);
      double mu_cur = mu, s_cur = s;
      mu_cur = line_max(
          [&](double m) { return value_at(m, s_cur, cd); }, mu_cur,
          0.5 * sigma, -std::numeric_limits<double>::infinity());
      s_cur = line_max([&](double sv) { return value_at(mu_cur, sv, cd); },
                       s_cur, 0.25, s_floor);
      mu_next = mu_cur;
      s_next = std::max(s_cur, s_floor);
      if (value_at(mu_next, s_next, cd) <= ev.value) break;
    }

    mu = mu_next;
    s = s_next;
    ev = eval_objective(mu, s, cd);
  }

  // Keep the best of the refined point, the closed-form start, and the
  // incoming parameters, so an EM sweep can never lose ground.
  struct Candidate {
    ComponentParams theta;
    double value;
  };
  std::array<Candidate, 3> cands = {
      Candidate{ComponentParams{mu, floor_sigma(std::exp(s))}, 0.0},
      Candidate{ComponentParams{mu_new, floor_sigma(std::exp(s_start))}, 0.0},
      Candidate{ComponentParams{current.mu, floor_sigma(current.sigma)}, 0.0}};
  for (auto& c : cands) {
    const double v = component_objective(c.theta, cd);
    c.value = std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
  }
  const auto best = std::max_element(
      cands.begin(), cands.end(),
      [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
  return best->theta;
}

ComponentParams m_step_component(int which, const FscDataset& data,
                                 const LatentPosteriors& post, const Weights& w,
                                 const EmConfig& config,
                                 const ComponentParams& current) {
  std::vector<double> e_buf, c_buf;
  ComponentData cd = component_data(which, data, post, w, e_buf, c_buf);
  return maximize_component(cd, current, config.inner);
}

ComponentParams m_step_rare(const FscDataset& data,
                            const LatentPosteriors& post, const Weights& w,
                            const EmConfig& config,
                            const ComponentParams& current) {
  ComponentData cd;
  cd.labeled = data.labeled2;
  cd.labeled_weight = w.w2;
  cd.unlabeled = data.unlabeled;
  cd.unlabeled_weight = w.w3;
  cd.density_weights = post.z_tilde;
  cd.cdf_weights = post.v_tilde;
  cd.k = data.k;
  return maximize_component(cd, current, config.inner);
}

namespace {

double labeled_group_loglik(std::span<const double> ys,
                            const ComponentParams& theta, SetSize k) {
  double total = 0.0;
  for (double y : ys) {
    total += normal_log_pdf(y, theta);
    if (k.k > 1) total += (k.k - 1) * normal_log_cdf(y, theta);
  }
  return total;
}

// Shared NS-form objective; SRS mode is the same expression at k = 1.
double weighted_loglik_k(const FscDataset& data, const MixtureParams& psi,
                         const Weights& w, SetSize k) {
  psi.validate();
  w.validate();
  double total = 0.0;
  if (w.w1 > 0.0 && !data.labeled1.empty()) {
    total += w.w1 * labeled_group_loglik(data.labeled1, psi.comp1, k);
  }
  if (w.w2 > 0.0 && !data.labeled2.empty()) {
    total += w.w2 * labeled_group_loglik(data.labeled2, psi.comp2, k);
  }
  if (w.w3 > 0.0 && !data.unlabeled.empty()) {
    double unl = 0.0;
    for (double y : data.unlabeled) {
      unl += mixture_log_pdf(y, psi);
      if (k.k > 1) {
        unl += std::log(static_cast<double>(k.k)) +
               (k.k - 1) * mixture_log_cdf(y, psi);
      }
    }
    total += w.w3 * unl;
  }
  return total;
}

double weighted_loglik_k(const FscDataset& data, const RareEventParams& psi,
                         const Weights& w, SetSize k) {
  psi.validate();
  w.validate();
  const MixtureParams mix = psi.as_mixture();
  double total = 0.0;
  if (w.w1 > 0.0 && !data.labeled1.empty()) {
    total += w.w1 * labeled_group_loglik(data.labeled1, mix.comp2, k);
  }
  if (w.w2 > 0.0 && !data.labeled2.empty()) {
    total += w.w2 * labeled_group_loglik(data.labeled2, mix.comp1, k);
  }
  if (w.w3 > 0.0 && !data.unlabeled.empty()) {
    double unl = 0.0;
    for (double y : data.unlabeled) {
      unl += mixture_log_pdf(y, mix);
      if (k.k > 1) {
        unl += std::log(static_cast<double>(k.k)) +
               (k.k - 1) * mixture_log_cdf(y, mix);
      }
    }
    total += w.w3 * unl;
  }
  return total;
}

}  // namespace

double weighted_loglik(const FscDataset& data, const MixtureParams& psi,
                       const Weights& w, LikelihoodMode mode) {
  return weighted_loglik_k(data, psi, w,
                           mode == LikelihoodMode::kNs ? data.k : SetSize{1});
}

double weighted_loglik(const FscDataset& data, const RareEventParams& psi,
                       const Weights& w, LikelihoodMode mode) {
  return weighted_loglik_k(data, psi, w,
                           mode == LikelihoodMode::kNs ? data.k : SetSize{1});
}

double q_function(const FscDataset& data, const MixtureParams& psi,
                  const LatentPosteriors& post, const Weights& w) {
  psi.validate();
  w.validate();
  const SetSize k = data.k;
  double total = 0.0;
  if (w.w1 > 0.0) {
    total += w.w1 * labeled_group_loglik(data.labeled1, psi.comp1, k);
  }
  if (w.w2 > 0.0) {
    total += w.w2 * labeled_group_loglik(data.labeled2, psi.comp2, k);
  }
  if (w.w3 > 0.0) {
    const double lp = std::log(psi.pi);
    const double lq = std::log1p(-psi.pi);
    double unl = 0.0;
    for (std::size_t r = 0; r < data.unlabeled.size(); ++r) {
      const double y = data.unlabeled[r];
      const double z = post.z_tilde[r];
      const double v = post.v_tilde[r];
      unl += (z + v) * lp + (k.k - z - v) * lq;
      unl += z * normal_log_pdf(y, psi.comp1) +
             (1.0 - z) * normal_log_pdf(y, psi.comp2);
      if (k.k > 1) {
        unl += v * normal_log_cdf(y, psi.comp1) +
               (k.k - 1 - v) * normal_log_cdf(y, psi.comp2);
      }
    }
    total += w.w3 * unl;
  }
  return total;
}

// --- k-means initialization -------------------------------------------------

namespace {

struct Clustering {
  double mean1 = 0.0, mean2 = 0.0;
  double sd1 = 1.0, sd2 = 1.0;
  double prop1 = 0.5;
};

std::vector<double> pooled_values(const FscDataset& data) {
  std::vector<double> pooled;
  pooled.reserve(data.n1() + data.n2() + data.n3());
  pooled.insert(pooled.end(), data.labeled1.begin(), data.labeled1.end());
  pooled.insert(pooled.end(), data.labeled2.begin(), data.labeled2.end());
  pooled.insert(pooled.end(), data.unlabeled.begin(), data.unlabeled.end());
  return pooled;
}

// Lloyd's algorithm, two clusters, 10 seeded restarts; returns the
// clustering ordered by ascending mean.
Clustering kmeans_two(const std::vector<double>& values, std::uint64_t seed) {
  const std::size_t n = values.size();
  if (n < 2) throw InsufficientDataError("k-means needs at least two values");

  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  if (*lo_it == *hi_it) {
    // All values identical: perturbed split around the common value.
    Clustering c;
    c.mean1 = *lo_it - kSigmaFloor;
    c.mean2 = *lo_it + kSigmaFloor;
    c.sd1 = c.sd2 = kSigmaFloor;
    c.prop1 = 0.5;
    return c;
  }

  double best_wcss = std::numeric_limits<double>::infinity();
  double best_c1 = *lo_it, best_c2 = *hi_it;
  for (int restart = 0; restart < 10; ++restart) {
    RngStream rng(RngSeed{seed, static_cast<std::uint64_t>(restart)});
    double c1 = values[rng.uniform_below(n)];
    double c2 = values[rng.uniform_below(n)];
    for (int tries = 0; c1 == c2 && tries < 64; ++tries) {
      c2 = values[rng.uniform_below(n)];
    }
    if (c1 == c2) {
      c1 = *lo_it;
      c2 = *hi_it;
    }
    for (int iter = 0; iter < 100; ++iter) {
      double sum1 = 0.0, sum2 = 0.0;
      std::size_t cnt1 = 0, cnt2 = 0;
      for (double v : values) {
        if (std::abs(v - c1) <= std::abs(v - c2)) {
          sum1 += v;
          ++cnt1;
        } else {
          sum2 += v;
          ++cnt2;
        }
      }
      if (cnt1 == 0) {
        c1 = *lo_it;
        continue;
      }
      if (cnt2 == 0) {
        c2 = *hi_it;
        continue;
      }
      const double n1 = sum1 / cnt1, n2 = sum2 / cnt2;
      if (n1 == c1 && n2 == c2) break;
      c1 = n1;
      c2 = n2;
    }
    double wcss = 0.0;
    for (double v : values) {
      const double d1 = (v - c1) * (v - c1), d2 = (v - c2) * (v - c2);
      wcss += std::min(d1, d2);
    }
    if (wcss < best_wcss) {
      best_wcss = wcss;
      best_c1 = c1;
      best_c2 = c2;
    }
  }

  if (best_c1 > best_c2) std::swap(best_c1, best_c2);
  double sum1 = 0.0, sq1 = 0.0, sum2 = 0.0, sq2 = 0.0;
  std::size_t cnt1 = 0, cnt2 = 0;
  for (double v : values) {
    if (std::abs(v - best_c1) <= std::abs(v - best_c2)) {
      sum1 += v;
      sq1 += v * v;
      ++cnt1;
    } else {
      sum2 += v;
      sq2 += v * v;
      ++cnt2;
    }
  }
  Clustering c;
  c.mean1 = sum1 / cnt1;
  c.mean2 = sum2 / cnt2;
  c.sd1 = floor_sigma(std::sqrt(std::max(sq1 / cnt1 - c.mean1 * c.mean1, 0.0)));
  c.sd2 = floor_sigma(std::sqrt(std::max(sq2 / cnt2 - c.mean2 * c.mean2, 0.0)));
  c.prop1 = static_cast<double>(cnt1) / static_cast<double>(n);
  return c;
}

double sample_mean(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
}

}  // namespace

MixtureParams kmeans_init(const FscDataset& data, std::uint64_t seed) {
  const auto pooled = pooled_values(data);
  Clustering c = kmeans_two(pooled, seed);

  // Clusters come back in ascending-mean order; pick which one plays
  // component 1 by anchoring to the labeled-1 sample when it exists.
  bool comp1_is_low = true;
  if (!data.labeled1.empty()) {
    const double anchor = sample_mean(data.labeled1);
    comp1_is_low =
        std::abs(c.mean1 - anchor) <= std::abs(c.mean2 - anchor);
  }
  MixtureParams psi;
  if (comp1_is_low) {
    psi.pi = clamp_pi(c.prop1);
    psi.comp1 = ComponentParams{c.mean1, c.sd1};
    psi.comp2 = ComponentParams{c.mean2, c.sd2};
  } else {
    psi.pi = clamp_pi(1.0 - c.prop1);
    psi.comp1 = ComponentParams{c.mean2, c.sd2};
    psi.comp2 = ComponentParams{c.mean1, c.sd1};
  }
  return psi;
}

RareEventParams rare_kmeans_init(const FscDataset& data, std::uint64_t seed) {
  const auto pooled = pooled_values(data);
  Clustering c = kmeans_two(pooled, seed);

  bool rare_is_high = true;
  if (!data.labeled2.empty()) {
    const double anchor = sample_mean(data.labeled2);
    rare_is_high = std::abs(c.mean2 - anchor) <= std::abs(c.mean1 - anchor);
  }
  RareEventParams psi;
  if (rare_is_high) {
    psi.epsilon = clamp_pi(1.0 - c.prop1);
    psi.delta = c.mean2;
    psi.tau = c.sd2;
  } else {
    psi.epsilon = clamp_pi(c.prop1);
    psi.delta = c.mean1;
    psi.tau = c.sd1;
  }
  return psi;
}

// --- EM loops ----------------------------------------------------------------

namespace {

MixtureParams general_start(const FscDataset& data, const EmConfig& cfg) {
  switch (cfg.init) {
    case InitRule::kKmeans:
      return kmeans_init(data, cfg.init_seed);
    case InitRule::kLabeledMoments: {
      if (data.labeled1.empty() || data.labeled2.empty()) {
        throw InsufficientDataError(
            "labeled-moments init needs both labeled groups");
      }
      auto moments = [](std::span<const double> xs) {
        const double m = sample_mean(xs);
        double sq = 0.0;
        for (double x : xs) sq += (x - m) * (x - m);
        return ComponentParams{m, floor_sigma(std::sqrt(sq / xs.size()))};
      };
      MixtureParams psi;
      psi.comp1 = moments(data.labeled1);
      psi.comp2 = moments(data.labeled2);
      psi.pi = clamp_pi(static_cast<double>(data.n1()) /
                        static_cast<double>(data.n1() + data.n2()));
      return psi;
    }
    case InitRule::kExplicit: {
      const auto* p = std::get_if<MixtureParams>(&cfg.init_params);
      if (!p) throw std::invalid_argument("explicit init requires MixtureParams");
      p->validate();
      return *p;
    }
  }
  throw std::logic_error("unreachable init rule");
}

RareEventParams rare_start(const FscDataset& data, const EmConfig& cfg) {
  switch (cfg.init) {
    case InitRule::kKmeans:
      return rare_kmeans_init(data, cfg.init_seed);
    case InitRule::kLabeledMoments: {
      if (data.labeled2.empty()) {
        throw InsufficientDataError("labeled-moments init needs labeled-2 data");
      }
      const double m = sample_mean(data.labeled2);
      double sq = 0.0;
      for (double x : data.labeled2) sq += (x - m) * (x - m);
      RareEventParams psi;
      psi.delta = m;
      psi.tau = floor_sigma(std::sqrt(sq / data.labeled2.size()));
      psi.epsilon = clamp_pi(static_cast<double>(data.n2()) /
                             static_cast<double>(data.n1() + data.n2()));
      return psi;
    }
    case InitRule::kExplicit: {
      const auto* p = std::get_if<RareEventParams>(&cfg.init_params);
      if (!p) {
        throw std::invalid_argument("explicit init requires RareEventParams");
      }
      p->validate();
      return *p;
    }
  }
  throw std::logic_error("unreachable init rule");
}

FitResult run_em_general(const FscDataset& data, const Weights& w,
                         const EmConfig& cfg, SetSize k_eff) {
  MixtureParams psi = general_start(data, cfg);

  FitResult res;
  res.model = MixtureModel::kGeneralGaussian;
  double ll = weighted_loglik_k(data, psi, w, k_eff);
  res.loglik_trace.push_back(ll);

  std::vector<double> e1, c1, e2, c2;
  for (int t = 1; t <= cfg.max_iter; ++t) {
    MixtureParams next = psi;
    LatentPosteriors post;
    if (data.n3() > 0) {
      post = e_step_ns(data.unlabeled, psi, k_eff);
      // At w3 = 0 the pi-section of Q is flat; keep the current value.
      if (w.w3 > 0.0) next.pi = update_pi(post, data.n3(), k_eff);
    }
    ComponentData cd1 = component_data_k(1, data, post, w, k_eff, e1, c1);
    next.comp1 = maximize_component(cd1, psi.comp1, cfg.inner);
    ComponentData cd2 = component_data_k(2, data, post, w, k_eff, e2, c2);
    next.comp2 = maximize_component(cd2, psi.comp2, cfg.inner);

    psi = next;
    const double ll_new = weighted_loglik_k(data, psi, w, k_eff);
    res.loglik_trace.push_back(ll_new);
    res.iterations = t;
    if (std::abs(ll_new - ll) <= cfg.tol) {
      res.converged = true;
      break;
    }
    ll = ll_new;
  }

  res.psi = psi;
  res.posteriors = e_step_ns(data.unlabeled, psi, k_eff);
  res.classifications.resize(data.n3());
  for (std::size_t r = 0; r < data.n3(); ++r) {
    res.classifications[r] =
        res.posteriors.z_tilde[r] > cfg.threshold ? 1 : 2;
  }
  return res;
}

FitResult run_em_rare(const FscDataset& data, const Weights& w,
                      const EmConfig& cfg, SetSize k_eff) {
  RareEventParams psi = rare_start(data, cfg);

  FitResult res;
  res.model = MixtureModel::kRareEvent;
  double ll = weighted_loglik_k(data, psi, w, k_eff);
  res.loglik_trace.push_back(ll);

  for (int t = 1; t <= cfg.max_iter; ++t) {
    RareEventParams next = psi;
    LatentPosteriors post;
    if (data.n3() > 0) {
      post = e_step_ns(data.unlabeled, psi.as_mixture(), k_eff);
      if (w.w3 > 0.0) next.epsilon = update_pi(post, data.n3(), k_eff);
    }
    ComponentData cd;
    cd.labeled = data.labeled2;
    cd.labeled_weight = w.w2;
    cd.unlabeled = data.unlabeled;
    cd.unlabeled_weight = w.w3;
    cd.density_weights = post.z_tilde;
    cd.cdf_weights = post.v_tilde;
    cd.k = k_eff;
    ComponentParams rare_comp =
        maximize_component(cd, ComponentParams{psi.delta, psi.tau}, cfg.inner);
    next.delta = rare_comp.mu;
    next.tau = rare_comp.sigma;

    psi = next;
    const double ll_new = weighted_loglik_k(data, psi, w, k_eff);
    res.loglik_trace.push_back(ll_new);
    res.iterations = t;
    if (std::abs(ll_new - ll) <= cfg.tol) {
      res.converged = true;
      break;
    }
    ll = ll_new;
  }

  res.psi = psi;
  res.posteriors = e_step_ns(data.unlabeled, psi.as_mixture(), k_eff);
  res.classifications.resize(data.n3());
  for (std::size_t r = 0; r < data.n3(); ++r) {
    // Rare orientation: z_tilde is the rare (= component 2) posterior.
    res.classifications[r] =
        res.posteriors.z_tilde[r] > cfg.threshold ? 2 : 1;
  }
  return res;
}

FitResult run_em(const FscDataset& data, const Weights& w, const EmConfig& cfg,
                 MixtureModel model, SetSize k_eff) {
  data.validate();
  w.validate();
  if (cfg.tol <= 0.0 || cfg.max_iter < 1) {
    throw std::invalid_argument("invalid EM configuration");
  }
  return model == MixtureModel::kGeneralGaussian
             ? run_em_general(data, w, cfg, k_eff)
             : run_em_rare(data, w, cfg, k_eff);
}

}  // namespace

FitResult fit_fsc_ns(const FscDataset& data, const Weights& w,
                     const EmConfig& config, MixtureModel model) {
  return run_em(data, w, config, model, data.k);
}

FitResult fit_fsc_srs(const FscDataset& data, const Weights& w,
                      const EmConfig& config, MixtureModel model) {
  return run_em(data, w, config, model, SetSize{1});
}

}  // namespace fscns
