#pragma once

#include <stdexcept>
#include <string>

namespace fscns {

// Smallest admissible component standard deviation. Estimates and inner
// optimizer iterates are clamped here to keep densities bounded.
inline constexpr double kSigmaFloor = 1e-6;

// Mixing proportions are kept inside [kPiClamp, 1 - kPiClamp].
inline constexpr double kPiClamp = 1e-6;

class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InsufficientDataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A component variance collapsed or a posterior denominator vanished.
class DegenerateError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// One Gaussian mixture component, N(mu, sigma^2).
struct ComponentParams {
  double mu = 0.0;
  double sigma = 1.0;

  void validate() const {
    if (!(sigma >= kSigmaFloor)) {
      throw DegenerateError("component sigma " + std::to_string(sigma) +
                            " below floor " + std::to_string(kSigmaFloor));
    }
  }
};

// Two-component mixture pi*f1 + (1-pi)*f2.
struct MixtureParams {
  double pi = 0.5;
  ComponentParams comp1;
  ComponentParams comp2;

  void validate() const {
    if (!(pi > 0.0 && pi < 1.0)) {
      throw DegenerateError("mixing proportion must lie in (0,1), got " +
                            std::to_string(pi));
    }
    comp1.validate();
    comp2.validate();
  }
};

// Contamination mixture (1-epsilon)*N(0,1) + epsilon*N(delta, tau^2).
// The standard-normal background is fixed and never a parameter.
struct RareEventParams {
  double epsilon = 0.05;
  double delta = 3.0;
  double tau = 1.0;

  void validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
      throw DegenerateError("epsilon must lie in (0,1), got " +
                            std::to_string(epsilon));
    }
    if (!(tau >= kSigmaFloor)) {
      throw DegenerateError("tau " + std::to_string(tau) + " below floor");
    }
  }

  // Orientation used internally: component 1 is the rare signal, so the
  // generic E-step posteriors are rare-class posteriors.
  MixtureParams as_mixture() const {
    return MixtureParams{epsilon, ComponentParams{delta, tau},
                         ComponentParams{0.0, 1.0}};
  }
};

// Number of candidate units per nomination set; k = 1 is plain SRS.
struct SetSize {
  int k = 1;

  void validate() const {
    if (k < 1) throw std::invalid_argument("set size k must be >= 1");
  }
};

// Relative influence of the two labeled groups and the unlabeled group.
struct Weights {
  double w1 = 1.0;
  double w2 = 1.0;
  double w3 = 1.0;

  void validate() const {
    if (w1 < 0.0 || w2 < 0.0 || w3 < 0.0) {
      throw std::invalid_argument("weights must be nonnegative");
    }
    if (w1 == 0.0 && w2 == 0.0 && w3 == 0.0) {
      throw std::invalid_argument("at least one weight must be positive");
    }
  }
};

}  // namespace fscns
