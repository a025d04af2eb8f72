#ifndef DDPUT_INPUTS_HPP
#define DDPUT_INPUTS_HPP

#include <cmath>

#include "ddput/errors.hpp"
#include "ddput/model.hpp"

namespace ddput {

/// User-facing inputs on the asset-price scale. Defaults are the reference
/// parameters r = 0.1, sigma = 0.2, lambda = 0.2, rho = 3, e^c = 1.2, K = 100.
struct RunInputs {
  double r = 0.1;
  double sigma = 0.2;
  double lambda = 0.2;
  double rho = 3.0;
  double cap_ratio = 1.2;
  double strike = 100.0;
  double s = 100.0;
  double smax = 100.0;
};

inline ModelParams<double> model_params(const RunInputs& in) {
  return make_params(in.r, in.sigma, in.lambda, in.rho);
}

/// c = log(cap ratio); the ratio smax/s at which the contract is capped.
inline double drawdown_threshold(const RunInputs& in) {
  if (!(in.cap_ratio > 1.0) || !std::isfinite(in.cap_ratio)) throw DomainError("cap-ratio must be > 1");
  return std::log(in.cap_ratio);
}

inline double strike(const RunInputs& in) {
  if (!(in.strike > 0.0) || !std::isfinite(in.strike)) throw DomainError("strike K must be positive");
  return in.strike;
}

/// (x, xbar) = (log s, log smax), validated.
inline void log_state(const RunInputs& in, double& x, double& xbar) {
  if (!(in.s > 0.0) || !(in.smax > 0.0)) throw DomainError("prices s and smax must be positive");
  if (in.s > in.smax) throw DomainError("state must satisfy s <= smax");
  x = std::log(in.s);
  xbar = std::log(in.smax);
}

}  // namespace ddput

#endif  // DDPUT_INPUTS_HPP
