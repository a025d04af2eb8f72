#include <cmath>

#include "doctest.h"
#include "ddput/mc.hpp"
#include "ddput/pricer.hpp"

using namespace ddput;

namespace {

const double kCap = std::log(1.2);
const auto kFig = make_params(0.1, 0.2, 0.2, 3.0);
const Contract kContract{100.0, kCap};

McConfig small(std::size_t paths, double dt) {
  McConfig cfg;
  cfg.n_paths = paths;
  cfg.dt = dt;
  cfg.t_max = 400.0;
  return cfg;
}

}  // namespace

TEST_CASE("immediate stops") {
  Stream stream(1, 0);
  const auto cfg = small(1, 1e-3);

  const auto dd = simulate_path(kFig, kContract, 4.0, std::log(90.0), std::log(90.0) + kCap, cfg, stream);
  CHECK(dd.stop_kind == StopKind::Drawdown);
  CHECK(dd.stop_time == 0.0);
  CHECK(dd.discounted_payoff == doctest::Approx(10.0).epsilon(1e-13));

  const auto bar = simulate_path(kFig, kContract, 4.4, 4.3, 4.35, cfg, stream);
  CHECK(bar.stop_kind == StopKind::Barrier);
  CHECK(bar.discounted_payoff == doctest::Approx(100.0 - std::exp(4.3)).epsilon(1e-13));

  const auto est = estimate_price(kFig, kContract, 4.4, 4.3, 4.35, small(1000, 1e-3));
  CHECK(est.mean == doctest::Approx(100.0 - std::exp(4.3)).epsilon(1e-13));
  CHECK(est.std_err == 0.0);
  CHECK(est.n_barrier == 1000);
}

TEST_CASE("payoff bounds and stop kinds") {
  Stream stream(7, 3);
  const auto cfg = small(1, 1e-3);
  const double a = 4.4;
  for (int i = 0; i < 2000; ++i) {
    const auto o = simulate_path(kFig, kContract, a, std::log(100.0), std::log(100.0), cfg, stream);
    CHECK(o.discounted_payoff >= 0.0);
    CHECK(o.discounted_payoff <= 100.0);
    CHECK(o.stop_kind != StopKind::Truncated);
    if (o.stop_kind == StopKind::Barrier) CHECK(o.x_at_stop <= a);
  }
}

TEST_CASE("pure diffusion paths never stop on a jump") {
  const auto bs = make_params(0.1, 0.2, 0.0, 1.0);
  const auto est = estimate_price(bs, kContract, 4.4, std::log(100.0), std::log(100.0), small(5000, 1e-3));
  CHECK(est.n_jump_stops == 0);
  CHECK(est.n_paths == 5000);
  CHECK(est.n_barrier + est.n_drawdown + est.n_truncated == 5000);

  const auto jd = estimate_price(kFig, kContract, 4.4, std::log(100.0), std::log(100.0), small(5000, 1e-3));
  CHECK(jd.n_jump_stops > 0);
}

TEST_CASE("reproducible for a fixed seed and worker count") {
  auto cfg = small(4000, 2e-3);
  cfg.n_workers = 3;
  const auto e1 = estimate_price(kFig, kContract, 4.4, std::log(95.0), std::log(100.0), cfg);
  const auto e2 = estimate_price(kFig, kContract, 4.4, std::log(95.0), std::log(100.0), cfg);
  CHECK(e1.mean == e2.mean);
  CHECK(e1.std_err == e2.std_err);
  cfg.seed += 1;
  const auto e3 = estimate_price(kFig, kContract, 4.4, std::log(95.0), std::log(100.0), cfg);
  CHECK(e3.mean != e1.mean);
}

TEST_CASE("worker count changes streams, not the estimand") {
  auto cfg = small(20000, 2e-3);
  cfg.n_workers = 1;
  const auto one = estimate_price(kFig, kContract, 4.4, std::log(95.0), std::log(100.0), cfg);
  cfg.n_workers = 4;
  const auto four = estimate_price(kFig, kContract, 4.4, std::log(95.0), std::log(100.0), cfg);
  CHECK(one.mean != four.mean);
  CHECK(std::abs(one.mean - four.mean) <= 3 * std::hypot(one.std_err, four.std_err));
}

TEST_CASE("discounted asset is a martingale") {
  auto cfg = small(40000, 0.01);
  for (const auto& p : {kFig, make_params(0.05, 0.3, 1.0, 2.0), make_params(0.1, 0.2, 0.0, 1.0)}) {
    const auto est = estimate_discounted_asset(p, std::log(100.0), 1.0, cfg);
    CHECK(std::abs(est.mean - 100.0) <= 3 * est.std_err);
  }
  // a wrong drift is detected
  const auto bad = ModelParams<double>::unchecked(0.1, 0.2, 0.2, 3.0, 0.08);
  const auto est = estimate_discounted_asset(bad, std::log(100.0), 1.0, cfg);
  CHECK(std::abs(est.mean - 100.0) > 3 * est.std_err);
}

TEST_CASE("truncation is counted as zero and bounded") {
  auto cfg = small(500, 1e-3);
  cfg.t_max = 0.01;
  const auto est = estimate_price(kFig, kContract, 3.0, std::log(100.0), std::log(100.0), cfg);
  CHECK(est.n_truncated > 0);
  CHECK(est.truncation_bound > 0.0);
  CHECK(est.truncation_bound <= 100.0 * std::exp(-0.1 * 0.01) + 1e-12);
}

TEST_CASE("invalid configurations") {
  auto cfg = small(10, 0.0);
  CHECK_THROWS_AS(estimate_price(kFig, kContract, 4.4, 4.5, 4.6, cfg), DomainError);
  cfg = small(0, 1e-3);
  CHECK_THROWS_AS(estimate_price(kFig, kContract, 4.4, 4.5, 4.6, cfg), DomainError);
  CHECK_THROWS_AS(estimate_price(kFig, kContract, 4.4, 4.7, 4.6, small(10, 1e-3)), DomainError);
}

TEST_CASE("agrees with the closed form at a MID state") {
  const auto m = make_price_model(kFig, 100.0, kCap);
  const double x = std::log(90.0), xbar = std::log(100.0);
  const auto est = estimate_price(kFig, kContract, m.a_star, x, xbar, small(20000, 1e-3));
  CHECK(std::abs(est.mean - value(m, x, xbar)) <= 3 * est.std_err + 0.5);
}
