#include "ddput/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ddput/scale.hpp"

namespace ddput {

namespace {

using Fn = std::function<double(double)>;

double integrate(const Fn& f, double a, double b) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-10, &err);
}

CheckResult check(std::string name, double measured, double tolerance, std::string detail = {}) {
  return {std::move(name), measured <= tolerance, measured, tolerance, std::move(detail)};
}

CheckResult failure(std::string name, const std::string& why) {
  return {std::move(name), false, std::numeric_limits<double>::quiet_NaN(), 0.0, why};
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double rel(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

double payoff(double K, double x) { return std::max(K - std::exp(x), 0.0); }

// Fourth-order central differences of V(., xbar) at x with step h.
void derivatives(const PriceModel<double>& m, double x, double xbar, double h, double& d1, double& d2) {
  const double fm2 = value(m, x - 2 * h, xbar), fm1 = value(m, x - h, xbar), f0 = value(m, x, xbar);
  const double fp1 = value(m, x + h, xbar), fp2 = value(m, x + 2 * h, xbar);
  d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h);
  d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h);
}

// Mid-points of the sample grids used for the HJB checks.
std::vector<double> xbar_samples(const PriceModel<double>& m) {
  const double a = m.a_star, c = m.drawdown(), lk = m.log_strike();
  return {a + 0.3 * c, a + 0.7 * c, a + c + 0.25 * (lk - a), a + c + 0.75 * (lk - a), lk + c + 0.05,
          lk + c + 0.4, lk + c + 1.0};
}

}  // namespace

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

void print_table(std::ostream& os, const std::vector<CheckResult>& results) {
  std::size_t width = 4;
  for (const auto& r : results) width = std::max(width, r.name.size());
  for (const auto& r : results) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "  %-12.4g  tol %-10.3g", r.measured, r.tolerance);
    os << (r.passed ? "PASS  " : "FAIL  ") << r.name << std::string(width - r.name.size(), ' ') << buf;
    if (!r.detail.empty()) os << "  " << r.detail;
    os << '\n';
  }
}

// ---- probes -------------------------------------------------------------------

double smooth_paste_error(const PriceModel<double>& m, double xbar) {
  const double a = m.a_star;
  auto gap = [&](double h) {
    const double x0 = a + 2 * h;
    return (value(m, x0 + h, xbar) - value(m, x0 - h, xbar)) / (2 * h) + std::exp(x0);
  };
  // gap(h) is linear in h to leading order
  const double g1 = gap(1e-4), g2 = gap(1e-5);
  return std::abs(g2 - (g1 - g2) / 9.0) / std::exp(a);
}

double continuous_paste_error(const PriceModel<double>& m, double xbar) {
  const double a = m.a_star;
  const double target = m.strike() - std::exp(a);
  double worst = 0.0;
  for (double x : {a, a + 1e-12, a + 1e-10})
    worst = std::max(worst, std::abs(regime_formula(m.core, a, Regime::Low, x, xbar) - target));
  return worst;
}

double normal_reflection(const PriceModel<double>& m, double xbar) {
  const double h = 1e-6;
  return (value(m, xbar, xbar + h) - value(m, xbar, xbar)) / h;
}

double generator_residual(const PriceModel<double>& m, double x, double xbar) {
  const auto& p = m.params();
  const double h = 1e-3;
  double d1 = 0.0, d2 = 0.0;
  derivatives(m, x, xbar, h, d1, d2);
  const double v = value(m, x, xbar);
  double out = p.mu() * d1 + 0.5 * p.sigma() * p.sigma() * d2 - p.r() * v;
  if (!p.has_jumps()) return out;

  const double lam = p.lambda(), rho = p.rho();
  // V(x - y, xbar) has kinks where x - y crosses a*, xbar - c and log K
  std::vector<double> cuts{0.0};
  for (double level : {m.a_star, xbar - m.drawdown(), m.log_strike()})
    if (x - level > 0.0) cuts.push_back(x - level);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const Fn integrand = [&](double y) { return (value(m, x - y, xbar) - v) * lam * rho * std::exp(-rho * y); };
  double jump = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) jump += integrate(integrand, cuts[i], cuts[i + 1]);
  jump += integrate(integrand, cuts.back(), std::numeric_limits<double>::infinity());
  return out + jump;
}

DominanceReport dominance(const PriceModel<double>& m, int n) {
  const double a = m.a_star, c = m.drawdown(), K = m.strike();
  const double lo = a - 0.2, hi = m.log_strike() + c + 0.4;
  DominanceReport rep;
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double xbar = lo + (hi - lo) * i / (n - 1);
    const auto b = exercise_boundary(m, xbar);
    for (int j = 0; j < n; ++j) {
      const double x = xbar - (c + 0.2) * j / (n - 1);
      const double margin = value(m, x, xbar) - payoff(K, x);
      ++rep.points;
      rep.min_margin = std::min(rep.min_margin, margin);
      if (margin < -1e-12 * K) ++rep.violations;
      // strictly inside the continuation region where a boundary exists
      if (b && x > *b + 1e-9 && xbar - x < c && margin <= 0.0) ++rep.strict_violations;
    }
  }
  return rep;
}

double continuity_mismatch(const PriceModel<double>& m) {
  const auto& k = m.core;
  const double a = m.a_star, c = m.drawdown(), K = m.strike();
  const double low_mid = a + c, mid_high = m.log_strike() + c;
  double worst = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double t = i / 20.0;
    // xbar = a* + c: LOW and MID formulas on the segment x in [a*, a* + c]
    const double x1 = a + t * c;
    worst = std::max(worst, std::abs(regime_formula(k, a, Regime::Low, x1, low_mid) -
                                     regime_formula(k, a, Regime::Mid, x1, low_mid)));
    // xbar = log K + c: MID and HIGH formulas on x in [log K, log K + c]
    const double x2 = mid_high - c + t * c;
    worst = std::max(worst, std::abs(regime_formula(k, a, Regime::Mid, x2, mid_high) -
                                     regime_formula(k, a, Regime::High, x2, mid_high)));
    // stopping boundary x = xbar - c in MID and HIGH
    const double xm = low_mid + t * (mid_high - low_mid);
    worst = std::max(worst, std::abs(regime_formula(k, a, Regime::Mid, xm - c, xm) - payoff(K, xm - c)));
    const double xh = mid_high + t;
    worst = std::max(worst, std::abs(regime_formula(k, a, Regime::High, xh - c, xh) - payoff(K, xh - c)));
  }
  // both sides through value() with a small offset
  const double eps = 1e-10;
  for (double boundary : {low_mid, mid_high}) {
    const double x = boundary - 0.5 * c;
    worst = std::max(worst, std::abs(value(m, x, boundary - eps) - value(m, x, boundary + eps)));
  }
  return worst / K;
}

KinkReport derivative_kink(const PriceModel<double>& m, double x) {
  const auto& k = m.core;
  const double a = m.a_star;
  const double top = m.log_strike() + m.drawdown();
  auto left = [&](double h) {
    return (regime_formula(k, a, Regime::Mid, x, top) - regime_formula(k, a, Regime::Mid, x, top - h)) / h;
  };
  auto right = [&](double h) {
    return (regime_formula(k, a, Regime::High, x, top + h) - regime_formula(k, a, Regime::High, x, top)) / h;
  };
  const double h = 1e-5;
  KinkReport rep;
  rep.left = left(h);
  rep.right = right(h);
  const double roundoff = 1e-15 * m.strike() / h;
  rep.noise = std::max(std::abs(left(h) - left(h / 2)), std::abs(right(h) - right(h / 2))) + roundoff;
  return rep;
}

// ---- Monte Carlo ------------------------------------------------------------------

McComparison compare_with_mc(const PriceModel<double>& m, double s, double smax, const McConfig& cfg) {
  McComparison out;
  out.s = s;
  out.smax = smax;
  const double x = std::log(s), xbar = std::log(smax);
  out.regime = regime(m, x, xbar);
  out.closed_form = value(m, x, xbar);
  const Contract contract{m.strike(), m.drawdown()};
  out.coarse = estimate_price(m.params(), contract, m.a_star, x, xbar, cfg);
  McConfig half = cfg;
  half.dt = cfg.dt / 2;
  half.seed = cfg.seed ^ 0x9E3779B97F4A7C15ULL;  // independent streams for the refined grid
  out.fine = estimate_price(m.params(), contract, m.a_star, x, xbar, half);
  out.within_tolerance =
      std::abs(out.closed_form - out.coarse.mean) <= 3 * out.coarse.std_err + kMcBiasAllowance * m.strike();
  const double combined = std::hypot(out.coarse.std_err, out.fine.std_err);
  out.refinement_stable = std::abs(out.coarse.mean - out.fine.mean) < 3 * combined ||
                          (combined == 0.0 && out.coarse.mean == out.fine.mean);
  return out;
}

std::vector<std::pair<double, double>> reference_states(const PriceModel<double>& m) {
  const double a = m.a_star, c = m.drawdown(), lk = m.log_strike();
  const std::vector<std::pair<double, double>> logs{
      {a + 0.3 * c, a + 0.6 * c},                                       // LOW, below the maximum
      {a + 0.9 * c, a + 0.9 * c},                                       // LOW, at the maximum
      {a + c + 0.3 * (lk - a), a + c + 0.3 * (lk - a)},                 // MID, at the maximum
      {a + 0.5 * c + 0.7 * (lk - a), a + c + 0.7 * (lk - a)},           // MID, inside
      {lk + 0.55 * c + 0.05, lk + c + 0.05},                            // HIGH
      {lk + 0.3 * c + 0.2, lk + c + 0.2},                               // HIGH, near the drawdown
  };
  std::vector<std::pair<double, double>> out;
  for (const auto& [x, xbar] : logs) out.emplace_back(std::exp(x), std::exp(xbar));
  return out;
}

// ---- suites ---------------------------------------------------------------------

std::vector<CheckResult> structural_checks(const ModelParams<double>& p, double c) {
  std::vector<CheckResult> out;
  const auto b = build_basis(p);
  const double r = p.r(), s2 = p.sigma() * p.sigma();
  const double scale = b.coeffs.abs().maxCoeff();

  out.push_back(check("W(0) = 0", std::abs(w(b, 0.0)) / scale, 1e-10));
  out.push_back(check("W'(0) = 2/sigma^2", rel(w_prime(b, 0.0), 2.0 / s2), 1e-10));
  out.push_back(check("Z(0) = 1", std::abs(z_ext(b, 0.0) - 1.0), 1e-10));
  double psi = 0.0;
  for (Eigen::Index i = 0; i < b.size(); ++i)
    psi = std::max(psi, std::abs(laplace_exponent(p, b.gammas(i)) - r) / r);
  out.push_back(check("Psi(gamma_i) = r", psi, 1e-10));
  if (p.has_jumps()) {
    const Eigen::ArrayXd t0 = b.coeffs / (b.gammas + p.rho());
    const Eigen::ArrayXd t1 = t0 * b.gammas;
    out.push_back(check("sum C_i/(gamma_i+rho) = 0", std::abs(t0.sum()) / t0.abs().maxCoeff(), 1e-10));
    out.push_back(check("sum C_i gamma_i/(gamma_i+rho) = 0", std::abs(t1.sum()) / t1.abs().maxCoeff(), 1e-10));
  }
  const auto q = drawdown_constants(p, b, c);
  const auto d = dual_constants(p, q);
  const double identity_a = z(b, c) - r * w(b, c) * w(b, c) / w_prime(b, c);
  // relative to Z(c): both sides may be far below the size of the terms in the identity
  out.push_back(check("identity A: Delta+Gamma", std::abs(q.delta + q.gamma_const - identity_a) / z(b, c), 1e-10));
  out.push_back(check("identity B: Delta_P+Gamma_P = 1", std::abs(d.delta + d.gamma_const - 1.0), 1e-10));
  if (!p.has_jumps()) out.push_back(check("Gamma = 0 without jumps", std::abs(q.gamma_const), 0.0));
  return out;
}

std::vector<CheckResult> laplace_checks(const ModelParams<double>& p) {
  std::vector<CheckResult> out;
  const auto b = build_basis(p);
  for (double beta : {2.0, 3.0, 5.0}) {
    const double want = 1.0 / (laplace_exponent(p, beta) - p.r());
    const double got = integrate(
        [&](double x) {
          const double damp = std::exp(-beta * x);
          return damp == 0.0 ? 0.0 : damp * w(b, x);
        },
        0.0, std::numeric_limits<double>::infinity());
    out.push_back(check("Laplace transform of W at beta=" + fmt("%g", beta), rel(got, want), 1e-8));
  }
  return out;
}

std::vector<CheckResult> barrier_checks(const PriceModel<double>& m) {
  std::vector<CheckResult> out;
  const double a = m.a_star, c = m.drawdown(), K = m.strike();
  out.push_back(check("a* below log K", a < m.log_strike() ? 0.0 : 1.0, 0.0, "a* = " + fmt("%.15g", a)));
  out.push_back(check("|G(a*)| / K", std::abs(barrier_residual(m.core, a)) / K, 1e-12));
  double two_route = 0.0;
  for (double t : {-1.0, -0.3, 0.0}) {
    const double g1 = barrier_residual(m.core, a + t);
    const double g2 = barrier_residual_blocks(m.core, a + t);
    two_route = std::max(two_route, std::abs(g1 - g2) / std::max(1.0, std::abs(g1)));
  }
  out.push_back(check("barrier residual: closed form vs blocks", two_route, 1e-10));
  double paste = 0.0, cont = 0.0;
  for (double f : {0.25, 0.5, 0.9}) {
    paste = std::max(paste, smooth_paste_error(m, a + f * c));
    cont = std::max(cont, continuous_paste_error(m, a + f * c) / K);
  }
  out.push_back(check("smooth paste |V_x(a*+) + e^a*| / e^a*", paste, 1e-6));
  out.push_back(check("continuous paste |V(a*) - (K - e^a*)| / K", cont, 1e-9));
  return out;
}

std::vector<CheckResult> hjb_checks(const PriceModel<double>& m) {
  std::vector<CheckResult> out;
  const double a = m.a_star, c = m.drawdown(), K = m.strike(), r = m.params().r();
  const double lk = m.log_strike();

  const std::pair<const char*, double> reflect[] = {
      {"LOW", a + 0.5 * c}, {"MID", a + c + 0.5 * (lk - a)}, {"HIGH", lk + c + 0.2}};
  for (const auto& [name, xbar] : reflect)
    out.push_back(check(std::string("normal reflection ") + name + " |dV/dxbar| / K",
                        std::abs(normal_reflection(m, xbar)) / K, 1e-4));

  double gen = 0.0;
  int n_points = 0;
  const auto xbars = xbar_samples(m);
  for (std::size_t i = 0; i < xbars.size(); ++i) {
    const double xbar = xbars[i];
    const double b = exercise_boundary(m, xbar).value_or(xbar - c);
    const std::vector<double> fracs = i % 2 == 0 ? std::vector<double>{0.2, 0.5, 0.8} : std::vector<double>{0.35, 0.65, 0.9};
    for (double f : fracs) {
      if (n_points == 20) break;
      gen = std::max(gen, std::abs(generator_residual(m, b + f * (xbar - b), xbar)));
      ++n_points;
    }
  }
  out.push_back(check("generator residual (20 points) / rK", gen / (r * K), 1e-3));

  double stop = 0.0;
  for (double xbar : {a + 0.5 * c, a + c + 0.1, lk + c + 0.2})
    for (double dx : {0.02, 0.1, 0.3}) {
      const double x = a - dx;
      if (std::exp(x) < K) stop = std::max(stop, std::abs(generator_residual(m, x, xbar) + r * K));
    }
  out.push_back(check("stopping residual + rK / rK", stop / (r * K), 1e-6));

  const auto dom = dominance(m, 100);
  out.push_back(check("dominance V >= payoff (violations)", static_cast<double>(dom.violations), 0.0,
                      "min margin " + fmt("%.3g", dom.min_margin)));
  out.push_back(check("strict dominance in continuation (violations)", static_cast<double>(dom.strict_violations),
                      0.0));
  out.push_back(check("continuity across regime boundaries / K", continuity_mismatch(m), 1e-8));
  return out;
}

std::vector<CheckResult> shape_checks(const PriceModel<double>& m) {
  std::vector<CheckResult> out;
  const double c = m.drawdown(), K = m.strike();
  const double top = m.log_strike() + c;
  std::size_t drops = 0;
  for (double dx : {0.05, 0.3, 1.0}) {
    const double xbar = top + dx;
    double prev = value(m, xbar - c, xbar);
    for (int i = 1; i <= 200; ++i) {
      const double v = value(m, xbar - c + c * i / 200.0, xbar);
      if (v < prev - 1e-12 * K) ++drops;
      prev = v;
    }
  }
  out.push_back(check("HIGH: V nondecreasing in x (decreases)", static_cast<double>(drops), 0.0));
  if (m.params().has_jumps()) {
    const auto kink = derivative_kink(m, m.log_strike() + 0.5 * c);
    const double jump = std::abs(kink.right - kink.left);
    out.push_back({"kink in xbar at log K + c (jump > 10 x noise)", jump > 10 * kink.noise, jump, 10 * kink.noise,
                   "left " + fmt("%.6g", kink.left) + ", right " + fmt("%.6g", kink.right)});
  }
  return out;
}

std::vector<CheckResult> martingale_checks(const ModelParams<double>& p, const McConfig& cfg) {
  std::vector<CheckResult> out;
  out.push_back(check("martingale drift Psi(1) = r", std::abs(laplace_exponent(p, 1.0) - p.r()) / p.r(), 1e-12));
  McConfig mcfg = cfg;
  mcfg.dt = 0.01;
  mcfg.n_paths = std::min<std::size_t>(cfg.n_paths, 40000);
  const auto est = estimate_discounted_asset(p, 0.0, 1.0, mcfg);
  out.push_back(check("MC E[e^{-rT} S_T] = S_0 (in SE)", std::abs(est.mean - 1.0) / std::max(est.std_err, 1e-300),
                      3.0, "mean " + fmt("%.6f", est.mean) + " +- " + fmt("%.2g", est.std_err)));
  return out;
}

std::vector<CheckResult> mc_checks(const PriceModel<double>& m, const McConfig& cfg) {
  std::vector<CheckResult> out;
  for (const auto& [s, smax] : reference_states(m)) {
    const auto cmp = compare_with_mc(m, s, smax, cfg);
    const std::string where =
        std::string(regime_name(cmp.regime)) + " s=" + fmt("%.2f", s) + " smax=" + fmt("%.2f", smax);
    const double tol = 3 * cmp.coarse.std_err + kMcBiasAllowance * m.strike();
    out.push_back({"MC price " + where, cmp.within_tolerance, std::abs(cmp.closed_form - cmp.coarse.mean), tol,
                   "closed " + fmt("%.5f", cmp.closed_form) + ", mc " + fmt("%.5f", cmp.coarse.mean) + " +- " +
                       fmt("%.3g", cmp.coarse.std_err)});
    const double combined = std::hypot(cmp.coarse.std_err, cmp.fine.std_err);
    out.push_back({"MC dt/2 refinement " + where, cmp.refinement_stable, std::abs(cmp.coarse.mean - cmp.fine.mean),
                   3 * combined, "fine " + fmt("%.5f", cmp.fine.mean)});
  }
  return out;
}

std::vector<CheckResult> sensitivity_checks(const ModelParams<double>& base, double strike, double c) {
  std::vector<CheckResult> out;
  auto astar = [&](double r, double s, double lam, double rho) {
    return make_price_model(make_params(r, s, lam, rho), strike, c).a_star;
  };
  auto grid = [](double lo, double hi, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(lo + (hi - lo) * i / (n - 1));
    return g;
  };
  // counts grid steps with the wrong sign of the a* increment
  auto wrong = [&](const std::vector<double>& g, int sign, const std::function<double(double)>& f) {
    int bad = 0;
    double prev = f(g.front());
    for (std::size_t i = 1; i < g.size(); ++i) {
      const double cur = f(g[i]);
      if (!((cur - prev) * sign > 0.0)) ++bad;
      prev = cur;
    }
    return static_cast<double>(bad);
  };
  const double r = base.r(), s = base.sigma(), lam = base.lambda(), rho = base.rho();
  out.push_back(check("a* increasing in r", wrong(grid(0.05, 0.5, 10), +1, [&](double v) { return astar(v, s, lam, rho); }), 0.0));
  out.push_back(check("a* decreasing in sigma", wrong(grid(0.1, 0.5, 9), -1, [&](double v) { return astar(r, v, lam, rho); }), 0.0));
  out.push_back(check("a* decreasing in lambda", wrong(grid(0.0, 1.0, 11), -1, [&](double v) { return astar(r, s, v, rho); }), 0.0));
  if (base.has_jumps())
    out.push_back(check("a* increasing in rho", wrong(grid(1.0, 10.0, 10), +1, [&](double v) { return astar(r, s, lam, v); }), 0.0));
  return out;
}

std::vector<CheckResult> run_suite(const ModelParams<double>& p, double strike, double c, const VerifyOptions& opts) {
  std::vector<CheckResult> out;
  auto stage = [&](const char* name, const std::function<std::vector<CheckResult>()>& f) {
    try {
      const auto part = f();
      out.insert(out.end(), part.begin(), part.end());
    } catch (const std::exception& e) {
      out.push_back(failure(name, e.what()));
    }
  };
  stage("martingale", [&] {
    auto r = martingale_checks(p, opts.mc);
    if (opts.quick) r.pop_back();  // drop the simulated check
    return r;
  });
  stage("structural identities", [&] { return structural_checks(p, c); });
  stage("Laplace transform", [&] { return laplace_checks(p); });

  std::optional<PriceModel<double>> model;
  stage("barrier solve", [&] {
    model = make_price_model(p, strike, c);
    return std::vector<CheckResult>{};
  });
  if (!model) return out;
  stage("barrier", [&] { return barrier_checks(*model); });
  stage("HJB", [&] { return hjb_checks(*model); });
  stage("shape", [&] { return shape_checks(*model); });
  stage("sensitivities", [&] { return sensitivity_checks(p, strike, c); });
  if (!opts.quick) stage("Monte Carlo", [&] { return mc_checks(*model, opts.mc); });
  return out;
}

}  // namespace ddput
