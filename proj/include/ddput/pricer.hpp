#ifndef DDPUT_PRICER_HPP
#define DDPUT_PRICER_HPP

#include <cmath>
#include <optional>
#include <string>

#include "ddput/errors.hpp"
#include "ddput/model.hpp"
#include "ddput/scale.hpp"

namespace ddput {

/// Everything the price depends on except the exercise barrier.
///
/// Holds the pricing and tilted scale bases, the drawdown constants and a few
/// derived quantities reused by every block:
///   w_c = W(c), w1_c = W'(c), z_c = Z(c),
///   total = Delta + Gamma,  reduced = Delta + rho Gamma/(rho+1).
template <typename Scalar>
struct PricingCore {
  ModelParams<Scalar> params;
  Scalar strike;
  Scalar log_strike;
  Scalar drawdown;
  ScaleBasis<Scalar> basis_q;
  ScaleBasis<Scalar> basis_p;
  DrawdownConstants<Scalar> constants_q;
  DrawdownConstants<Scalar> constants_p;

  Scalar w_c;
  Scalar w1_c;
  Scalar z_c;
  Scalar total;
  Scalar reduced;
  Scalar jump_payoff;  // V7 = K eta Gamma / ((eta + rho)(rho + 1))

  Scalar eta() const { return constants_q.eta; }
  Scalar rho() const { return params.rho(); }
};

template <typename Scalar>
PricingCore<Scalar> make_core(const ModelParams<Scalar>& params, Scalar strike, Scalar drawdown) {
  using std::log;
  if (!(strike > Scalar(0))) throw DomainError("strike K must be positive");
  if (!(drawdown > Scalar(0))) throw DomainError("drawdown threshold c must be positive");
  auto basis_q = build_basis(params);
  auto basis_p = dual_basis(basis_q);
  auto kq = drawdown_constants(params, basis_q, drawdown);
  auto kp = dual_constants(params, kq);
  PricingCore<Scalar> core{params, strike, log(strike), drawdown, basis_q, basis_p, kq, kp,
                           Scalar(0), Scalar(0), Scalar(0), Scalar(0), Scalar(0), Scalar(0)};
  core.w_c = w(basis_q, drawdown);
  core.w1_c = w_prime(basis_q, drawdown);
  core.z_c = z(basis_q, drawdown);
  const Scalar rho = params.rho();
  const Scalar eta = kq.eta;
  core.total = kq.delta + kq.gamma_const;
  core.reduced = kq.delta + rho * kq.gamma_const / (rho + Scalar(1));
  core.jump_payoff = strike * eta * kq.gamma_const / ((eta + rho) * (rho + Scalar(1)));
  return core;
}

/// Closed-form building blocks of the value V_a of the rule "exercise at the
/// first time X <= a, unless the drawdown epoch comes first".
///
/// Argument ranges follow the regime each block belongs to; callers are
/// responsible for them (v_block below validates).
namespace blocks {

template <typename Scalar>
Scalar v1(const PricingCore<Scalar>& k, Scalar a, Scalar x, Scalar xbar) {
  using std::exp;
  const auto& b = k.basis_q;
  const Scalar ratio = w(b, x - a) / w(b, xbar - a);
  return k.strike * (z(b, x - a) - z(b, xbar - a) * ratio) - (exp(x) - exp(xbar) * ratio);
}

template <typename Scalar>
Scalar v2(const PricingCore<Scalar>& k, Scalar a, Scalar x, Scalar xbar) {
  return w(k.basis_q, x - a) / w(k.basis_q, xbar - a);
}

template <typename Scalar>
Scalar v3(const PricingCore<Scalar>& k, Scalar a, Scalar xbar) {
  using std::exp;
  const auto& b = k.basis_q;
  const Scalar wb = w(b, xbar - a);
  return k.strike * (z(b, xbar - a) - k.z_c / k.w_c * wb) - (exp(xbar) - exp(a + k.drawdown) * wb / k.w_c);
}

template <typename Scalar>
Scalar v4(const PricingCore<Scalar>& k, Scalar a, Scalar xbar) {
  return w(k.basis_q, xbar - a) / k.w_c;
}

template <typename Scalar>
Scalar v6(const PricingCore<Scalar>& k, Scalar a) {
  using std::exp;
  return exp(k.eta() * (a - k.log_strike));
}

template <typename Scalar>
Scalar v5(const PricingCore<Scalar>& k, Scalar a) {
  using std::exp;
  const Scalar eta = k.eta();
  const Scalar rho = k.rho();
  const Scalar delta = k.constants_q.delta;
  const Scalar gamma = k.constants_q.gamma_const;
  const Scalar disc = v6(k, a);
  const Scalar em1 = k.constants_q.eta_minus_one;
  return k.strike * disc * (delta + gamma * (rho + Scalar(1) - eta) / (rho + Scalar(1))) / em1 -
         exp(a) * eta / em1 * k.reduced + k.strike * k.total;
}

template <typename Scalar>
Scalar v7(const PricingCore<Scalar>& k) {
  return k.jump_payoff;
}

template <typename Scalar>
Scalar v8(const PricingCore<Scalar>& k) {
  return k.total;
}

template <typename Scalar>
Scalar v9(const PricingCore<Scalar>& k, Scalar a) {
  return v6(k, a) * k.total;
}

template <typename Scalar>
Scalar v10(const PricingCore<Scalar>& k, Scalar x, Scalar xbar) {
  using std::exp;
  const auto& b = k.basis_q;
  const Scalar shifted = x + k.drawdown - xbar;
  const Scalar ws = w(b, shifted);
  return k.strike * (z(b, shifted) - k.z_c / k.w_c * ws) - (exp(x) - exp(xbar) * ws / k.w_c);
}

template <typename Scalar>
Scalar v11(const PricingCore<Scalar>& k, Scalar x, Scalar xbar) {
  return w(k.basis_q, x + k.drawdown - xbar) / k.w_c;
}

template <typename Scalar>
Scalar v13(const PricingCore<Scalar>& k, Scalar xbar) {
  using std::exp;
  return exp(-k.eta() * (k.log_strike + k.drawdown - xbar));
}

template <typename Scalar>
Scalar v12(const PricingCore<Scalar>& k, Scalar xbar) {
  using std::exp;
  const Scalar eta = k.eta();
  const Scalar rho = k.rho();
  const Scalar disc = v13(k, xbar);
  const Scalar shifted = exp(xbar - k.drawdown);
  const Scalar delta = k.constants_q.delta;
  const Scalar gamma = k.constants_q.gamma_const;
  const Scalar em1 = k.constants_q.eta_minus_one;
  return k.strike * (Scalar(1) + disc / em1) * k.total -
         eta / em1 *
             (shifted * delta + gamma / (rho + Scalar(1)) * (rho * shifted + k.strike * disc));
}

template <typename Scalar>
Scalar v15(const PricingCore<Scalar>& k, Scalar x, Scalar xbar) {
  return v11(k, x, xbar);
}

template <typename Scalar>
Scalar v14(const PricingCore<Scalar>& k, Scalar x, Scalar xbar) {
  using std::exp;
  if (!k.params.has_jumps()) return Scalar(0);
  const auto& b = k.basis_q;
  const Scalar rho = k.rho();
  const Scalar c = k.drawdown;
  const Scalar shifted = x + c - xbar;
  const Scalar exit_ratio = v15(k, x, xbar);
  using Array = typename ScaleBasis<Scalar>::Array;
  const Array g_rho = b.gammas + rho;
  const Array full = (Scalar(1) - (-c * g_rho).exp()) / g_rho;
  const Array partial = (b.gammas * (x - xbar)).exp() * (Scalar(1) - (-shifted * g_rho).exp()) / g_rho;
  const Scalar sum = (b.coeffs * (b.gammas * c).exp() * (exit_ratio * full - partial)).sum();
  return k.strike / (rho + Scalar(1)) * k.params.lambda() * exp(rho * (k.log_strike + c - xbar)) * sum;
}

template <typename Scalar>
Scalar v16(const PricingCore<Scalar>& k, Scalar xbar) {
  using std::exp;
  return k.jump_payoff * exp(k.rho() * (k.log_strike + k.drawdown - xbar));
}

}  // namespace blocks

/// Smooth-paste residual for a candidate barrier a, simplified form:
///   G(a) = e^{a+c} - r K W(c)^2/W'(c) - eta e^a/(eta-1) R + K e^{eta(a - log K)}/(eta-1) R
///          - K e^{eta(a - log K)} rho Gamma / ((eta + rho)(rho + 1)),
/// with R = Delta + rho Gamma/(rho+1). The optimal barrier is its root.
template <typename Scalar>
Scalar barrier_residual(const PricingCore<Scalar>& k, Scalar a) {
  using std::exp;
  const Scalar eta = k.eta();
  const Scalar rho = k.rho();
  const Scalar disc = exp(eta * (a - k.log_strike));
  const Scalar r = k.params.r();
  const Scalar em1 = k.constants_q.eta_minus_one;
  return exp(a + k.drawdown) - r * k.strike * k.w_c * k.w_c / k.w1_c -
         eta * exp(a) / em1 * k.reduced + k.strike * disc / em1 * k.reduced -
         k.strike * disc * rho * k.constants_q.gamma_const / ((eta + rho) * (rho + Scalar(1)));
}

/// The same residual assembled from the value blocks:
///   e^{a+c} - K Z(c) + V5(a) + V6(a) V7.
template <typename Scalar>
Scalar barrier_residual_blocks(const PricingCore<Scalar>& k, Scalar a) {
  using std::exp;
  return exp(a + k.drawdown) - k.strike * k.z_c + blocks::v5(k, a) + blocks::v6(k, a) * blocks::v7(k);
}

enum class Regime { Stop, Low, Mid, High };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Stop: return "STOP";
    case Regime::Low: return "LOW";
    case Regime::Mid: return "MID";
    case Regime::High: return "HIGH";
  }
  return "?";
}

/// Regime of (x, xbar) for the rule with barrier a. Stop covers x <= a and
/// drawdowns of at least c; the others split on xbar at a + c and log K + c.
template <typename Scalar>
Regime classify(const PricingCore<Scalar>& k, Scalar a, Scalar x, Scalar xbar) {
  if (x <= a || xbar - x >= k.drawdown) return Regime::Stop;
  if (xbar < a + k.drawdown) return Regime::Low;
  if (xbar < k.log_strike + k.drawdown) return Regime::Mid;
  return Regime::High;
}

/// Closed-form expression of one regime evaluated at (x, xbar) without
/// checking that the point belongs to that regime. Used to compare adjacent
/// case formulas on their common boundary.
template <typename Scalar>
Scalar regime_formula(const PricingCore<Scalar>& k, Scalar a, Regime regime, Scalar x, Scalar xbar) {
  using std::exp;
  using std::max;
  switch (regime) {
    case Regime::Stop:
      return max(k.strike - exp(x), Scalar(0));
    case Regime::Low:
      return blocks::v1(k, a, x, xbar) +
             blocks::v2(k, a, x, xbar) *
                 (blocks::v3(k, a, xbar) +
                  blocks::v4(k, a, xbar) * (blocks::v5(k, a) + blocks::v6(k, a) * blocks::v7(k)));
    case Regime::Mid:
      return blocks::v10(k, x, xbar) +
             blocks::v11(k, x, xbar) * (blocks::v12(k, xbar) + blocks::v13(k, xbar) * blocks::v7(k));
    case Regime::High:
      return blocks::v14(k, x, xbar) + blocks::v15(k, x, xbar) * blocks::v16(k, xbar);
  }
  throw InternalError("unreachable regime");
}

/// V_a(x, xbar) for an arbitrary barrier a < log K.
template <typename Scalar>
Scalar value_for_barrier(const PricingCore<Scalar>& k, Scalar a, Scalar x, Scalar xbar) {
  if (x > xbar) throw DomainError("state must satisfy x <= xbar");
  return regime_formula(k, a, classify(k, a, x, xbar), x, xbar);
}

/// Optimal barrier by bisection on barrier_residual.
///
/// Starts from [log K - 1, log K] and doubles the width to the left until
/// the residual changes sign (it tends to -r K W(c)^2/W'(c) < 0 as a -> -inf
/// and is positive at log K), then bisects down to adjacent floating point
/// numbers.
template <typename Scalar>
Scalar solve_barrier(const PricingCore<Scalar>& k) {
  using std::abs;
  Scalar hi = k.log_strike;
  const Scalar g_hi = barrier_residual(k, hi);
  if (!(g_hi > Scalar(0))) throw InternalError("barrier residual is not positive at log K");
  Scalar width = Scalar(1);
  Scalar lo = hi - width;
  int doublings = 0;
  while (!(barrier_residual(k, lo) < Scalar(0))) {
    if (++doublings > 60) throw InternalError("no sign change of the barrier residual below log K");
    width *= Scalar(2);
    lo = hi - width;
  }
  for (int it = 0; it < 400; ++it) {
    const Scalar mid = lo + (hi - lo) / Scalar(2);
    if (mid <= lo || mid >= hi) break;
    const Scalar g = barrier_residual(k, mid);
    if (g == Scalar(0)) return mid;
    if (g < Scalar(0))
      lo = mid;
    else
      hi = mid;
  }
  const Scalar g_lo = barrier_residual(k, lo);
  const Scalar g_hi2 = barrier_residual(k, hi);
  return abs(g_lo) <= abs(g_hi2) ? lo : hi;
}

/// Pricing model with the optimal barrier solved once at construction.
template <typename Scalar>
struct PriceModel {
  PricingCore<Scalar> core;
  Scalar a_star;

  Scalar strike() const { return core.strike; }
  Scalar log_strike() const { return core.log_strike; }
  Scalar drawdown() const { return core.drawdown; }
  const ModelParams<Scalar>& params() const { return core.params; }
};

template <typename Scalar>
PriceModel<Scalar> make_price_model(const ModelParams<Scalar>& params, Scalar strike, Scalar drawdown) {
  auto core = make_core(params, strike, drawdown);
  const Scalar a = solve_barrier(core);
  return PriceModel<Scalar>{std::move(core), a};
}

template <typename Scalar>
Regime regime(const PriceModel<Scalar>& m, Scalar x, Scalar xbar) {
  return classify(m.core, m.a_star, x, xbar);
}

/// Option price V(x, xbar) = V_{a*}(x, xbar).
template <typename Scalar>
Scalar value(const PriceModel<Scalar>& m, Scalar x, Scalar xbar) {
  return value_for_barrier(m.core, m.a_star, x, xbar);
}

/// Exercise boundary b(xbar): a* below a* + c, xbar - c up to log K + c, and
/// nothing beyond (only the drawdown epoch stops the contract there).
template <typename Scalar>
std::optional<Scalar> exercise_boundary(const PriceModel<Scalar>& m, Scalar xbar) {
  if (xbar < m.a_star + m.drawdown()) return m.a_star;
  if (xbar < m.log_strike() + m.drawdown()) return xbar - m.drawdown();
  return std::nullopt;
}

/// Continuation formula of the LOW regime evaluated with the analytically
/// extended scale functions, so it also makes sense below the barrier.
/// Used to draw how the continuation value meets the payoff.
template <typename Scalar>
Scalar projected_value(const PriceModel<Scalar>& m, Scalar x, Scalar xbar) {
  using std::exp;
  const auto& k = m.core;
  const Scalar a = m.a_star;
  if (!(xbar > a && xbar < a + k.drawdown)) throw DomainError("projection needs a < xbar < a* + c");
  const auto& b = k.basis_q;
  const Scalar wb = w(b, xbar - a);
  const Scalar ratio = w_ext(b, x - a) / wb;
  const Scalar low = k.strike * (z_ext(b, x - a) - z(b, xbar - a) * ratio) - (exp(x) - exp(xbar) * ratio);
  const Scalar tail = blocks::v3(k, a, xbar) +
                      blocks::v4(k, a, xbar) * (blocks::v5(k, a) + blocks::v6(k, a) * blocks::v7(k));
  return low + ratio * tail;
}

/// Identifier of a closed-form block V1..V16.
enum class Block { V1 = 1, V2, V3, V4, V5, V6, V7, V8, V9, V10, V11, V12, V13, V14, V15, V16 };

/// Evaluates one block at the model's optimal barrier, checking that
/// (x, xbar) lies where the block is defined. Blocks that do not depend on
/// x or xbar ignore those arguments.
template <typename Scalar>
Scalar v_block(const PriceModel<Scalar>& m, Block id, Scalar x = Scalar(0), Scalar xbar = Scalar(0)) {
  const auto& k = m.core;
  const Scalar a = m.a_star;
  const Scalar c = k.drawdown;
  const Scalar top = k.log_strike + c;
  auto require = [](bool ok, const char* what) {
    if (!ok) throw DomainError(std::string("block arguments out of regime: ") + what);
  };
  switch (id) {
    case Block::V1:
    case Block::V2:
      require(a < xbar && xbar <= a + c && a <= x && x <= xbar, "need a <= x <= xbar <= a + c, xbar > a");
      return id == Block::V1 ? blocks::v1(k, a, x, xbar) : blocks::v2(k, a, x, xbar);
    case Block::V3:
    case Block::V4:
      require(a < xbar && xbar <= a + c, "need a < xbar <= a + c");
      return id == Block::V3 ? blocks::v3(k, a, xbar) : blocks::v4(k, a, xbar);
    case Block::V5: return blocks::v5(k, a);
    case Block::V6: return blocks::v6(k, a);
    case Block::V7: return blocks::v7(k);
    case Block::V8: return blocks::v8(k);
    case Block::V9: return blocks::v9(k, a);
    case Block::V10:
    case Block::V11:
      require(a + c <= xbar && xbar <= top && xbar - c <= x && x <= xbar,
              "need a + c <= xbar <= log K + c and xbar - c <= x <= xbar");
      return id == Block::V10 ? blocks::v10(k, x, xbar) : blocks::v11(k, x, xbar);
    case Block::V12:
    case Block::V13:
      require(a + c <= xbar && xbar <= top, "need a + c <= xbar <= log K + c");
      return id == Block::V12 ? blocks::v12(k, xbar) : blocks::v13(k, xbar);
    case Block::V14:
    case Block::V15:
      require(xbar >= top && xbar - c <= x && x <= xbar, "need xbar >= log K + c and xbar - c <= x <= xbar");
      return id == Block::V14 ? blocks::v14(k, x, xbar) : blocks::v15(k, x, xbar);
    case Block::V16:
      require(xbar >= top, "need xbar >= log K + c");
      return blocks::v16(k, xbar);
  }
  throw DomainError("unknown block id");
}

}  // namespace ddput

#endif  // DDPUT_PRICER_HPP
