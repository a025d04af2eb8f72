#ifndef DDPUT_SCALE_HPP
#define DDPUT_SCALE_HPP

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include <Eigen/Core>

#include "ddput/errors.hpp"
#include "ddput/model.hpp"

namespace ddput {

enum class Measure { Pricing, Dual };

/// Exponential-sum representation of the r-scale function,
///   W(x) = sum_i C_i e^{gamma_i x}  (x >= 0),  W(x) = 0 (x < 0),
///   Z(x) = 1 + r int_0^x W = sum_i (r C_i / gamma_i) e^{gamma_i x}.
///
/// Three terms when the model has jumps, two in the pure diffusion case.
/// Exponents are stored in descending order; gamma_0 = 1 for the pricing
/// measure. The dual basis (measure tilted by e^X) has gamma_i - 1, the
/// same coefficients and discount rate 0, so its Z is identically 1.
template <typename Scalar>
struct ScaleBasis {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  Array gammas;
  Array coeffs;
  Scalar r_used = Scalar(0);
  Measure measure = Measure::Pricing;

  Eigen::Index size() const { return gammas.size(); }
};

/// Minimal separation of two exponents before the partial-fraction basis is
/// considered degenerate.
inline constexpr double kRootSeparation = 1e-9;

namespace detail {

template <typename Scalar>
Scalar newton_polish(const ModelParams<Scalar>& p, Scalar root) {
  using std::abs;
  const Scalar f0 = laplace_exponent(p, root) - p.r();
  const Scalar df = laplace_exponent_prime(p, root);
  if (df == Scalar(0)) return root;
  const Scalar candidate = root - f0 / df;
  const Scalar f1 = laplace_exponent(p, candidate) - p.r();
  return abs(f1) < abs(f0) ? candidate : root;
}

template <typename Scalar>
void check_separation(const Eigen::Array<Scalar, Eigen::Dynamic, 1>& g) {
  using std::abs;
  for (Eigen::Index i = 0; i < g.size(); ++i)
    for (Eigen::Index j = i + 1; j < g.size(); ++j)
      if (abs(g(i) - g(j)) < Scalar(kRootSeparation)) {
        std::ostringstream os;
        os << "scale basis exponents " << static_cast<double>(g(i)) << " and "
           << static_cast<double>(g(j)) << " are (nearly) repeated";
        throw DegenerateParameters(os.str());
      }
}

}  // namespace detail

/// Builds the pricing-measure basis from the roots of Psi(theta) = r.
///
/// With jumps, Psi(theta) = r becomes a cubic after clearing the pole at
/// -rho; theta = 1 is a root by the martingale constraint and the other two
/// have a closed form with discriminant
///   omega = lambda^2 + lambda (rho+1)(2r + rho sigma^2) + (rho+1)^2 (r - rho sigma^2/2)^2.
/// Both negative roots get one Newton step on Psi - r. Coefficients are
/// C_i = 2 (gamma_i + rho) / (sigma^2 prod_{j != i} (gamma_i - gamma_j)).
///
/// Without jumps the roots of sigma^2 theta^2/2 + mu theta - r are used with
/// C_i = 1/Psi'(gamma_i), the residues of 1/(Psi(beta) - r).
template <typename Scalar>
ScaleBasis<Scalar> build_basis(const ModelParams<Scalar>& p) {
  using std::sqrt;
  using Array = typename ScaleBasis<Scalar>::Array;
  const Scalar r = p.r();
  const Scalar s2 = p.sigma() * p.sigma();
  if (!(s2 > Scalar(0))) throw DomainError("scale basis requires sigma > 0");

  ScaleBasis<Scalar> basis;
  basis.r_used = r;
  basis.measure = Measure::Pricing;

  if (p.has_jumps()) {
    const Scalar lam = p.lambda();
    const Scalar rho = p.rho();
    const Scalar half = r - rho * s2 / Scalar(2);
    const Scalar omega = lam * lam + lam * (rho + Scalar(1)) * (Scalar(2) * r + rho * s2) +
                         (rho + Scalar(1)) * (rho + Scalar(1)) * half * half;
    const Scalar b = Scalar(2) * lam + Scalar(2) * r + rho * rho * s2 + rho * s2 + Scalar(2) * r * rho;
    const Scalar denom = Scalar(2) * (rho * s2 + s2);
    const Scalar root = Scalar(2) * sqrt(omega);
    Array g(3);
    g << Scalar(1), -(b - root) / denom, -(b + root) / denom;
    g(1) = detail::newton_polish(p, g(1));
    g(2) = detail::newton_polish(p, g(2));
    detail::check_separation(g);

    Array c(3);
    for (int i = 0; i < 3; ++i) {
      Scalar prod = Scalar(1);
      for (int j = 0; j < 3; ++j)
        if (j != i) prod *= g(i) - g(j);
      c(i) = Scalar(2) * (g(i) + rho) / (s2 * prod);
    }
    basis.gammas = std::move(g);
    basis.coeffs = std::move(c);
  } else {
    // sigma^2/2 theta^2 + mu theta - r = 0. theta = 1 is a root by the
    // martingale constraint and the product of the roots is -2r/sigma^2, so
    // both are exact; this keeps gamma_0 == 1 bit for bit as in the jump case.
    const Scalar mu = p.mu();
    const Scalar g1 = Scalar(1);
    const Scalar g2 = Scalar(-2) * r / s2;
    Array g(2);
    g << g1, g2;
    detail::check_separation(g);
    Array c(2);
    for (int i = 0; i < 2; ++i) c(i) = Scalar(1) / (s2 * g(i) + mu);
    basis.gammas = std::move(g);
    basis.coeffs = std::move(c);
  }
  return basis;
}

/// Basis of the scale function under the tilted measure: W_dual(x) = e^{-x} W(x).
template <typename Scalar>
ScaleBasis<Scalar> dual_basis(const ScaleBasis<Scalar>& basis) {
  if (basis.measure != Measure::Pricing) throw DomainError("dual_basis expects a pricing-measure basis");
  ScaleBasis<Scalar> d;
  d.gammas = basis.gammas - Scalar(1);
  d.coeffs = basis.coeffs;
  d.r_used = Scalar(0);
  d.measure = Measure::Dual;
  return d;
}

// Exponential sums on the analytic extension (no truncation at 0).

template <typename Scalar>
Scalar w_ext(const ScaleBasis<Scalar>& b, Scalar x) {
  return (b.coeffs * (b.gammas * x).exp()).sum();
}

template <typename Scalar>
Scalar w_prime_ext(const ScaleBasis<Scalar>& b, Scalar x) {
  return (b.coeffs * b.gammas * (b.gammas * x).exp()).sum();
}

template <typename Scalar>
Scalar w_second_ext(const ScaleBasis<Scalar>& b, Scalar x) {
  return (b.coeffs * b.gammas.square() * (b.gammas * x).exp()).sum();
}

template <typename Scalar>
Scalar z_ext(const ScaleBasis<Scalar>& b, Scalar x) {
  if (b.r_used == Scalar(0)) return Scalar(1);
  return (b.r_used * b.coeffs / b.gammas * (b.gammas * x).exp()).sum();
}

/// W(x); zero on the negative half-line.
template <typename Scalar>
Scalar w(const ScaleBasis<Scalar>& b, Scalar x) {
  return x < Scalar(0) ? Scalar(0) : w_ext(b, x);
}

/// W'(x); at x = 0 this is the right limit 2/sigma^2.
template <typename Scalar>
Scalar w_prime(const ScaleBasis<Scalar>& b, Scalar x) {
  return x < Scalar(0) ? Scalar(0) : w_prime_ext(b, x);
}

template <typename Scalar>
Scalar w_second(const ScaleBasis<Scalar>& b, Scalar x) {
  return x < Scalar(0) ? Scalar(0) : w_second_ext(b, x);
}

/// Z(x); one on the negative half-line.
template <typename Scalar>
Scalar z(const ScaleBasis<Scalar>& b, Scalar x) {
  return x <= Scalar(0) ? Scalar(1) : z_ext(b, x);
}

/// Z'(x) = r W(x).
template <typename Scalar>
Scalar z_prime(const ScaleBasis<Scalar>& b, Scalar x) {
  return b.r_used * w(b, x);
}

/// Constants describing the first drawdown of size c:
///   eta   = W'(c)/W(c), the exit rate of the running maximum,
///   delta = sigma^2/2 (W'(c) - W''(c)/eta), the creeping weight,
///   gamma = lambda sum_i C_i/(gamma_i + rho) (gamma_i/eta - 1) e^{gamma_i c},
///           the weight of drawdowns completed by a jump.
/// delta + gamma is E[e^{-r tau_D}] started at the maximum.
///
/// eta - 1 is kept separately: for large |gamma_i| c it is far below the
/// rounding error of eta. It is summed without the gamma = 1 term, and delta
/// uses W'^2 - W W'' = -sum_{i<j} C_i C_j (gamma_i - gamma_j)^2 e^{(gamma_i + gamma_j) c}.
template <typename Scalar>
struct DrawdownConstants {
  Scalar eta;
  Scalar eta_minus_one;
  Scalar delta;
  Scalar gamma_const;
  Scalar c_used;
  Measure measure = Measure::Pricing;
};

template <typename Scalar>
DrawdownConstants<Scalar> drawdown_constants(const ModelParams<Scalar>& p, const ScaleBasis<Scalar>& b,
                                             Scalar c) {
  using Array = typename ScaleBasis<Scalar>::Array;
  if (!(c > Scalar(0))) throw DomainError("drawdown threshold c must be positive");
  if (b.measure != Measure::Pricing) throw DomainError("drawdown_constants expects a pricing-measure basis");
  const Array e = (b.gammas * c).exp();
  const Array terms = b.coeffs * e;
  const Scalar wc = terms.sum();
  const Scalar w1 = (terms * b.gammas).sum();

  Scalar excess = Scalar(0);  // W'(c) - W(c)
  for (Eigen::Index i = 0; i < b.size(); ++i)
    if (b.gammas(i) != Scalar(1)) excess += terms(i) * (b.gammas(i) - Scalar(1));
  Scalar wronskian = Scalar(0);  // W'(c)^2 - W(c) W''(c)
  for (Eigen::Index i = 0; i < b.size(); ++i)
    for (Eigen::Index j = i + 1; j < b.size(); ++j) {
      const Scalar d = b.gammas(i) - b.gammas(j);
      wronskian -= terms(i) * terms(j) * d * d;
    }

  DrawdownConstants<Scalar> k;
  k.eta = w1 / wc;
  k.eta_minus_one = excess / wc;
  if (!(k.eta_minus_one > Scalar(0)))
    throw DegenerateParameters("drawdown threshold too large: W'(c)/W(c) - 1 underflows");
  // W' - W''/eta = (W'^2 - W W'')/W'
  k.delta = p.sigma() * p.sigma() / Scalar(2) * wronskian / w1;
  k.gamma_const = Scalar(0);
  if (p.has_jumps()) {
    Scalar sum = Scalar(0);
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      // gamma_i/eta - 1 = (gamma_i - eta)/eta, with 1 - eta taken exactly
      const Scalar gap = b.gammas(i) == Scalar(1) ? -k.eta_minus_one : b.gammas(i) - k.eta;
      sum += b.coeffs(i) / (b.gammas(i) + p.rho()) * gap / k.eta * e(i);
    }
    k.gamma_const = p.lambda() * sum;
  }
  k.c_used = c;
  k.measure = Measure::Pricing;
  return k;
}

/// Tilted-measure constants from the pricing ones:
///   eta_P = eta - 1,
///   delta_P = eta/(eta-1) e^{-c} delta,
///   gamma_P = rho e^{-c}/(rho+1) eta/(eta-1) gamma.
template <typename Scalar>
DrawdownConstants<Scalar> dual_constants(const ModelParams<Scalar>& p, const DrawdownConstants<Scalar>& q) {
  using std::exp;
  if (q.measure != Measure::Pricing) throw DomainError("dual_constants expects pricing-measure constants");
  const Scalar ratio = q.eta / q.eta_minus_one;
  const Scalar ec = exp(-q.c_used);
  DrawdownConstants<Scalar> k;
  k.eta = q.eta_minus_one;
  k.eta_minus_one = q.eta_minus_one - Scalar(1);
  k.delta = ratio * ec * q.delta;
  k.gamma_const = p.has_jumps() ? p.rho() * ec / (p.rho() + Scalar(1)) * ratio * q.gamma_const : Scalar(0);
  k.c_used = q.c_used;
  k.measure = Measure::Dual;
  return k;
}

}  // namespace ddput

#endif  // DDPUT_SCALE_HPP
