#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "ddput/scale.hpp"
#include "oracles.hpp"

using namespace ddput;

namespace {

struct Sample {
  ModelParams<double> p;
  double c;
};

std::vector<Sample> sweep(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> ur(0.01, 0.5), us(0.05, 0.6), ul(0.05, 2.0), urho(0.5, 10.0),
      uc(0.05, 1.0);
  std::vector<Sample> out;
  for (int i = 0; i < n; ++i) {
    const double r = ur(gen), s = us(gen), lam = ul(gen), rho = urho(gen), c = uc(gen);
    out.push_back({make_params(r, s, i % 4 == 0 ? 0.0 : lam, rho), c});
  }
  return out;
}

}  // namespace

TEST_CASE("figure parameters: exponents and boundary values") {
  const auto p = make_params(0.1, 0.2, 0.2, 3.0);
  const auto b = build_basis(p);
  REQUIRE(b.size() == 3);
  CHECK(b.gammas(0) == 1.0);
  CHECK(b.gammas(1) < 0.0);
  CHECK(b.gammas(2) < b.gammas(1));

  // bisection oracle on Psi - r on either side of the pole at -rho
  auto f = [&](double t) { return laplace_exponent(p, t) - p.r(); };
  const double g2 = oracle::bisect(f, -3.0 + 1e-12, -1e-9);
  const double g3 = oracle::bisect(f, -200.0, -3.0 - 1e-12);
  CHECK(b.gammas(1) == doctest::Approx(g2).epsilon(1e-12));
  CHECK(b.gammas(2) == doctest::Approx(g3).epsilon(1e-12));
  for (int i = 0; i < 3; ++i) CHECK(std::abs(f(b.gammas(i))) <= 1e-10);

  CHECK(w(b, 0.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(std::abs(w(b, 0.0)) < 1e-12);
  CHECK(w_prime(b, 0.0) == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(z(b, 0.0) == 1.0);
  CHECK(z_ext(b, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w(b, -0.3) == 0.0);
  CHECK(z(b, -0.3) == 1.0);
}

TEST_CASE("pure diffusion basis has the two quadratic roots") {
  const auto p = make_params(0.1, 0.2, 0.0, 1.0);
  const auto b = build_basis(p);
  REQUIRE(b.size() == 2);
  // 0.02 t^2 + 0.08 t - 0.1 = 0, roots by the quadratic formula
  const double disc = std::sqrt(0.08 * 0.08 + 4 * 0.02 * 0.1);
  CHECK(b.gammas(0) == doctest::Approx((-0.08 + disc) / 0.04).epsilon(1e-14));
  CHECK(b.gammas(1) == doctest::Approx((-0.08 - disc) / 0.04).epsilon(1e-14));
  CHECK(b.gammas(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(b.gammas(1) == doctest::Approx(-5.0).epsilon(1e-14));
  CHECK(w_prime(b, 0.0) == doctest::Approx(50.0).epsilon(1e-12));
}

TEST_CASE("nearly repeated roots are reported") {
  // rho = 2r/sigma^2 with a vanishing jump intensity: the two negative roots merge at -rho
  CHECK_THROWS_AS(build_basis(make_params(0.1, 0.2, 1e-22, 5.0)), DegenerateParameters);
  CHECK_NOTHROW(build_basis(make_params(0.1, 0.2, 1e-3, 5.0)));
}

TEST_CASE("laplace transform of W matches 1/(Psi - r)") {
  for (const auto& s : sweep(20, 7)) {
    const auto b = build_basis(s.p);
    for (double beta : {2.0, 3.0, 5.0}) {
      const double want = 1.0 / (laplace_exponent(s.p, beta) - s.p.r());
      const double quad =
          oracle::integrate(
              [&](double x) {
                const double damp = std::exp(-beta * x);
                return damp == 0.0 ? 0.0 : damp * w(b, x);
              },
              0.0, std::numeric_limits<double>::infinity());
      const double termwise = (b.coeffs / (beta - b.gammas)).sum();
      CHECK(std::abs(quad - want) <= 1e-8 * std::abs(want));
      CHECK(std::abs(termwise - want) <= 1e-10 * std::abs(want));
    }
  }
}

TEST_CASE("Z - 1 is r times the integral of W") {
  const auto p = make_params(0.1, 0.2, 0.2, 3.0);
  const auto b = build_basis(p);
  for (double c : {0.05, std::log(1.2), 0.7}) {
    const double integral = oracle::integrate([&](double x) { return w(b, x); }, 0.0, c);
    CHECK(std::abs(z(b, c) - 1.0 - p.r() * integral) <= 1e-9);
    CHECK(z(b, c) > 1.0);
    CHECK(z_prime(b, c) == doctest::Approx(p.r() * w(b, c)));
  }
}

TEST_CASE("dual basis") {
  const auto p = make_params(0.1, 0.2, 0.2, 3.0);
  const auto b = build_basis(p);
  const auto d = dual_basis(b);
  CHECK(d.gammas(0) == 0.0);
  CHECK(d.gammas(1) == b.gammas(1) - 1.0);
  CHECK(d.gammas(2) == b.gammas(2) - 1.0);
  CHECK((d.coeffs == b.coeffs).all());
  CHECK(d.r_used == 0.0);
  for (double x : {0.1, 0.5, 1.0}) {
    CHECK(std::abs(w(d, x) - std::exp(-x) * w(b, x)) <= 1e-12 * std::abs(w(d, x)));
    CHECK(z(d, x) == 1.0);
  }
  CHECK_THROWS_AS(dual_basis(d), DomainError);
}

TEST_CASE("drawdown constants at figure parameters") {
  const auto p = make_params(0.1, 0.2, 0.2, 3.0);
  const auto b = build_basis(p);
  const double c = std::log(1.2);
  const auto q = drawdown_constants(p, b, c);
  const auto pd = dual_constants(p, q);

  const double identity_a = z(b, c) - p.r() * w(b, c) * w(b, c) / w_prime(b, c);
  CHECK(std::abs(q.delta + q.gamma_const - identity_a) <= 1e-10 * identity_a);
  CHECK(std::abs(pd.delta + pd.gamma_const - 1.0) <= 1e-10);
  CHECK(pd.eta == doctest::Approx(q.eta - 1.0));
  CHECK(q.eta_minus_one == doctest::Approx(q.eta - 1.0).epsilon(1e-12));
  CHECK(q.eta > 1.0);
  CHECK(q.gamma_const > 0.0);
  CHECK(q.delta + q.gamma_const < 1.0);

  // Tilted eta from the tilted basis directly.
  const auto d = dual_basis(b);
  CHECK(w_prime(d, c) / w(d, c) == doctest::Approx(pd.eta).epsilon(1e-12));

  CHECK_THROWS_AS(drawdown_constants(p, b, 0.0), DomainError);
  CHECK_THROWS_AS(drawdown_constants(p, b, -0.1), DomainError);
}

TEST_CASE("jump weight by direct double integration") {
  // Gamma = int_0^c int_0^inf (W'(y)/eta - W(y)) lambda rho e^{rho (y - c - h)} dh dy
  for (const auto& [lam, rho, c] : {std::tuple{0.2, 3.0, std::log(1.2)}, std::tuple{1.5, 0.7, 0.4},
                                    std::tuple{0.05, 9.0, 0.9}}) {
    const auto p = make_params(0.1, 0.25, lam, rho);
    const auto b = build_basis(p);
    const auto q = drawdown_constants(p, b, c);
    const double inf = std::numeric_limits<double>::infinity();
    const double direct = oracle::integrate(
        [&](double y) {
          const double density = w_prime(b, y) / q.eta - w(b, y);
          const double inner = oracle::integrate(
              [&](double h) { return lam * rho * std::exp(rho * (y - c - h)); }, 0.0, inf, 1e-12);
          return density * inner;
        },
        0.0, c, 1e-12);
    CHECK(std::abs(direct - q.gamma_const) <= 1e-6 * std::abs(q.gamma_const));
  }
}

TEST_CASE("pure diffusion: no jump weight, creeping weight is identity A") {
  const auto p = make_params(0.1, 0.2, 0.0, 1.0);
  const auto b = build_basis(p);
  const double c = std::log(1.2);
  const auto q = drawdown_constants(p, b, c);
  CHECK(q.gamma_const == 0.0);
  const double identity_a = z(b, c) - p.r() * w(b, c) * w(b, c) / w_prime(b, c);
  CHECK(std::abs(q.delta - identity_a) <= 1e-10 * identity_a);
  const auto pd = dual_constants(p, q);
  CHECK(pd.gamma_const == 0.0);
  CHECK(std::abs(pd.delta - 1.0) <= 1e-10);
}

TEST_CASE("randomized sweep of basis and drawdown invariants") {
  for (const auto& s : sweep(300, 99)) {
    const auto& p = s.p;
    const auto b = build_basis(p);
    const double r = p.r();
    const double s2 = p.sigma() * p.sigma();
    CHECK(b.gammas(0) == doctest::Approx(1.0).epsilon(1e-12));
    for (Eigen::Index i = 1; i < b.size(); ++i) {
      CHECK(b.gammas(i) < 0.0);
      CHECK(b.gammas(i) < b.gammas(i - 1));
    }
    for (Eigen::Index i = 0; i < b.size(); ++i)
      CHECK(std::abs(laplace_exponent(p, b.gammas(i)) - r) <= 1e-10 * std::max(1.0, r));

    CHECK(std::abs(b.coeffs.sum()) <= 1e-10 * b.coeffs.abs().maxCoeff());
    CHECK(std::abs((b.coeffs * b.gammas).sum() - 2.0 / s2) <= 1e-10 * (2.0 / s2));
    CHECK(std::abs((r * b.coeffs / b.gammas).sum() - 1.0) <= 1e-10);
    if (p.has_jumps()) {
      CHECK(std::abs((b.coeffs / (b.gammas + p.rho())).sum()) <= 1e-10);
      CHECK(std::abs((b.coeffs * b.gammas / (b.gammas + p.rho())).sum()) <= 1e-10);
    }

    const auto q = drawdown_constants(p, b, s.c);
    const auto pd = dual_constants(p, q);
    // both sides can be far smaller than Z(c), which sets the rounding scale
    const double identity_a = z(b, s.c) - r * w(b, s.c) * w(b, s.c) / w_prime(b, s.c);
    CHECK(std::abs(q.delta + q.gamma_const - identity_a) <= 1e-10 * z(b, s.c));
    CHECK(std::abs(pd.delta + pd.gamma_const - 1.0) <= 1e-10);
    CHECK(q.eta_minus_one > 0.0);
    CHECK(q.gamma_const >= 0.0);
    CHECK((q.gamma_const == 0.0) == !p.has_jumps());
    CHECK(q.delta + q.gamma_const > 0.0);
    CHECK(q.delta + q.gamma_const < 1.0);

    // W positive and increasing on (0, 2]
    double prev = 0.0;
    for (int i = 1; i <= 200; ++i) {
      const double x = 2.0 * i / 200.0;
      const double wx = w(b, x);
      CHECK(wx > prev);
      prev = wx;
    }
  }
}
