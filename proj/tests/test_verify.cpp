#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "ddput/verify.hpp"

using namespace ddput;

namespace {

const double kCap = std::log(1.2);
const auto kFig = make_params(0.1, 0.2, 0.2, 3.0);
const auto kBs = make_params(0.1, 0.2, 0.0, 1.0);

VerifyOptions quick() {
  VerifyOptions o;
  o.quick = true;
  return o;
}

const CheckResult* find(const std::vector<CheckResult>& rs, const std::string& prefix) {
  for (const auto& r : rs)
    if (r.name.rfind(prefix, 0) == 0) return &r;
  return nullptr;
}

}  // namespace

TEST_CASE("quick suite at reference parameters") {
  const auto rs = run_suite(kFig, 100.0, kCap, quick());
  REQUIRE(rs.size() > 20);
  for (const auto& r : rs) {
    // V(., xbar) decreases near the diagonal in the HIGH regime; reported, not asserted
    if (r.name.rfind("HIGH: V nondecreasing", 0) == 0) continue;
    INFO(r.name << " measured " << r.measured << " tol " << r.tolerance << " " << r.detail);
    CHECK(r.passed);
  }
  CHECK(find(rs, "smooth paste") != nullptr);
  CHECK(find(rs, "generator residual") != nullptr);
  CHECK(find(rs, "MC price") == nullptr);
}

TEST_CASE("quick suite without jumps passes entirely") {
  const auto rs = run_suite(kBs, 100.0, kCap, quick());
  for (const auto& r : rs) {
    INFO(r.name << " measured " << r.measured << " " << r.detail);
    CHECK(r.passed);
  }
  CHECK(all_passed(rs));
}

TEST_CASE("a wrong drift is caught by the martingale checks") {
  const auto bad = ModelParams<double>::unchecked(0.1, 0.2, 0.2, 3.0, 0.08);
  McConfig cfg;
  cfg.n_paths = 40000;
  cfg.dt = 0.01;
  const auto rs = martingale_checks(bad, cfg);
  REQUIRE(rs.size() == 2);
  CHECK_FALSE(rs[0].passed);
  CHECK_FALSE(rs[1].passed);
  const auto good = martingale_checks(kFig, cfg);
  CHECK(all_passed(good));
}

TEST_CASE("suite failures are reported, not thrown") {
  // merging negative roots make the basis degenerate
  const auto p = make_params(0.1, 0.2, 1e-22, 5.0);
  std::vector<CheckResult> rs;
  CHECK_NOTHROW(rs = run_suite(p, 100.0, kCap, quick()));
  CHECK_FALSE(all_passed(rs));
}

TEST_CASE("probes at reference parameters") {
  const auto m = make_price_model(kFig, 100.0, kCap);
  const double a = m.a_star, c = m.drawdown();
  CHECK(smooth_paste_error(m, a + 0.5 * c) < 1e-5);
  CHECK(continuous_paste_error(m, a + 0.5 * c) < 1e-9 * m.strike());
  for (double xbar : {a + 0.5 * c, 0.5 * (a + c + m.log_strike() + c), m.log_strike() + 1.5 * c})
    CHECK(normal_reflection(m, xbar) < 1e-5);
  CHECK(std::abs(generator_residual(m, a + 0.3 * c, a + 0.6 * c)) < 1e-6 * m.strike());
  CHECK(continuity_mismatch(m) < 1e-9);

  const auto d = dominance(m, 60);
  CHECK(d.points == 3600);
  CHECK(d.violations == 0);
  CHECK(d.strict_violations == 0);

  const double x = m.log_strike() + 0.5 * c;
  const auto k = derivative_kink(m, x);
  CHECK(std::abs(k.left - k.right) > 10 * k.noise);
}

TEST_CASE("reference states cover every regime") {
  const auto m = make_price_model(kFig, 100.0, kCap);
  const auto states = reference_states(m);
  REQUIRE(states.size() == 6);
  int counts[4] = {0, 0, 0, 0};
  for (const auto& [s, smax] : states) {
    REQUIRE(s <= smax);
    counts[static_cast<int>(regime(m, std::log(s), std::log(smax)))]++;
  }
  CHECK(counts[static_cast<int>(Regime::Low)] == 2);
  CHECK(counts[static_cast<int>(Regime::Mid)] == 2);
  CHECK(counts[static_cast<int>(Regime::High)] == 2);
}

TEST_CASE("table printing") {
  std::vector<CheckResult> rs{{"alpha", true, 1e-9, 1e-6, {}}, {"beta", false, 2.0, 1.0, "detail"}};
  std::ostringstream os;
  print_table(os, rs);
  const auto s = os.str();
  CHECK(s.find("PASS  alpha") != std::string::npos);
  CHECK(s.find("FAIL  beta") != std::string::npos);
  CHECK(s.find("detail") != std::string::npos);
  CHECK_FALSE(all_passed(rs));
  CHECK(all_passed({}));
}
