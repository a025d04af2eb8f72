#ifndef DDPUT_MODEL_HPP
#define DDPUT_MODEL_HPP

#include <cmath>
#include <string>

#include "ddput/errors.hpp"

namespace ddput {

/// Jump-diffusion log-price model under the pricing measure:
///   X_t = x + mu t + sigma B_t - sum_{k <= N_t} U_k,
/// N a Poisson process of intensity lambda, U_k ~ Exp(rho).
///
/// The drift is never user supplied. It is fixed by the martingale
/// constraint Psi(1) = r, i.e. mu = r - sigma^2/2 + lambda/(1+rho).
template <typename Scalar>
class ModelParams {
 public:
  Scalar r() const { return r_; }
  Scalar sigma() const { return sigma_; }
  Scalar lambda() const { return lambda_; }
  Scalar rho() const { return rho_; }
  Scalar mu() const { return mu_; }
  bool has_jumps() const { return lambda_ > Scalar(0); }

  /// Builds params with an arbitrary drift, skipping every check. Only meant
  /// for exercising the verification suite on deliberately broken inputs.
  static ModelParams unchecked(Scalar r, Scalar sigma, Scalar lambda, Scalar rho, Scalar mu) {
    return ModelParams(r, sigma, lambda, rho, mu);
  }

  template <typename S>
  friend ModelParams<S> make_params(S r, S sigma, S lambda, S rho);

 private:
  ModelParams(Scalar r, Scalar sigma, Scalar lambda, Scalar rho, Scalar mu)
      : r_(r), sigma_(sigma), lambda_(lambda), rho_(rho), mu_(mu) {}

  Scalar r_;
  Scalar sigma_;
  Scalar lambda_;
  Scalar rho_;
  Scalar mu_;
};

/// Validates (r, sigma, lambda, rho) and derives the risk-neutral drift.
/// rho is ignored when lambda == 0.
template <typename Scalar>
ModelParams<Scalar> make_params(Scalar r, Scalar sigma, Scalar lambda, Scalar rho) {
  using std::isfinite;
  if (!isfinite(r) || !isfinite(sigma) || !isfinite(lambda))
    throw DomainError("model parameters must be finite");
  if (!(r > Scalar(0))) throw DomainError("discount rate r must be positive");
  if (sigma < Scalar(0)) throw DomainError("volatility sigma must be nonnegative");
  if (lambda < Scalar(0)) throw DomainError("jump intensity lambda must be nonnegative");
  if (!(sigma > Scalar(0))) {
    // The exponential-sum scale basis divides by sigma^2; the bounded
    // variation case needs a different basis.
    if (lambda > Scalar(0))
      throw DomainError("sigma = 0 with lambda > 0 is not supported (scale basis undefined)");
    throw DomainError("sigma = 0 and lambda = 0 gives a deterministic model");
  }
  if (lambda > Scalar(0) && !(rho > Scalar(0) && isfinite(rho)))
    throw DomainError("jump rate rho must be positive when lambda > 0");
  if (lambda == Scalar(0)) rho = Scalar(1);  // unused placeholder, keeps Psi finite

  const Scalar mu = r - sigma * sigma / Scalar(2) + lambda / (Scalar(1) + rho);
  return ModelParams<Scalar>(r, sigma, lambda, rho, mu);
}

/// Laplace exponent Psi(theta) = log E[e^{theta X_1}] for X_0 = 0.
template <typename Scalar>
Scalar laplace_exponent(const ModelParams<Scalar>& p, Scalar theta) {
  Scalar value = p.mu() * theta + p.sigma() * p.sigma() * theta * theta / Scalar(2);
  if (p.has_jumps()) {
    const Scalar denom = theta + p.rho();
    if (denom == Scalar(0)) throw DomainError("Laplace exponent has a pole at theta = -rho");
    value -= p.lambda() * theta / denom;
  }
  return value;
}

/// Psi'(theta).
template <typename Scalar>
Scalar laplace_exponent_prime(const ModelParams<Scalar>& p, Scalar theta) {
  Scalar value = p.mu() + p.sigma() * p.sigma() * theta;
  if (p.has_jumps()) {
    const Scalar denom = theta + p.rho();
    if (denom == Scalar(0)) throw DomainError("Laplace exponent has a pole at theta = -rho");
    value -= p.lambda() * p.rho() / (denom * denom);
  }
  return value;
}

/// Parameters of X under the measure tilted by e^{X_t - Psi(1) t}.
/// The tilted process has the same form with (mu + sigma^2, lambda rho/(rho+1), rho+1)
/// and Laplace exponent Psi(theta + 1) - Psi(1). Its discount rate is 0.
template <typename Scalar>
struct DualParams {
  Scalar mu;
  Scalar sigma;
  Scalar lambda;
  Scalar rho;
};

template <typename Scalar>
DualParams<Scalar> dual_params(const ModelParams<Scalar>& p) {
  DualParams<Scalar> d;
  d.mu = p.mu() + p.sigma() * p.sigma();
  d.sigma = p.sigma();
  d.lambda = p.has_jumps() ? p.lambda() * p.rho() / (p.rho() + Scalar(1)) : Scalar(0);
  d.rho = p.rho() + Scalar(1);
  return d;
}

template <typename Scalar>
Scalar laplace_exponent(const DualParams<Scalar>& d, Scalar theta) {
  Scalar value = d.mu * theta + d.sigma * d.sigma * theta * theta / Scalar(2);
  if (d.lambda > Scalar(0)) {
    const Scalar denom = theta + d.rho;
    if (denom == Scalar(0)) throw DomainError("Laplace exponent has a pole at theta = -rho");
    value -= d.lambda * theta / denom;
  }
  return value;
}

}  // namespace ddput

#endif  // DDPUT_MODEL_HPP
