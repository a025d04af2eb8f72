// Command-line front end: price, barrier, sweep, verify.

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ddput/inputs.hpp"
#include "ddput/mc.hpp"
#include "ddput/pricer.hpp"
#include "ddput/sweep.hpp"
#include "ddput/verify.hpp"

namespace {

struct McFlags {
  std::size_t paths = 200000;
  double dt = 1e-3;
  double t_max = 400.0;
  std::uint64_t seed = ddput::kDefaultSeed;
  unsigned workers = 1;

  ddput::McConfig config() const { return {paths, dt, t_max, seed, workers}; }
};

int cmd_price(const ddput::RunInputs& in, bool with_mc, const McFlags& mc) {
  double x = 0.0, xbar = 0.0;
  ddput::log_state(in, x, xbar);
  const auto m = ddput::make_price_model(ddput::model_params(in), ddput::strike(in), ddput::drawdown_threshold(in));
  const auto b = ddput::exercise_boundary(m, xbar);
  std::printf("value    %.10f\n", ddput::value(m, x, xbar));
  std::printf("regime   %s\n", ddput::regime_name(ddput::regime(m, x, xbar)));
  std::printf("a_star   %.12f\n", m.a_star);
  std::printf("barrier  %.10f\n", std::exp(m.a_star));
  if (b)
    std::printf("boundary %.10f\n", std::exp(*b));
  else
    std::printf("boundary none\n");
  if (with_mc) {
    const auto est = ddput::estimate_price(m.params(), {m.strike(), m.drawdown()}, m.a_star, x, xbar, mc.config());
    std::printf("mc       %.10f +- %.10f (truncation <= %.3g)\n", est.mean, est.std_err, est.truncation_bound);
  }
  return 0;
}

int cmd_barrier(const ddput::RunInputs& in) {
  const auto m = ddput::make_price_model(ddput::model_params(in), ddput::strike(in), ddput::drawdown_threshold(in));
  std::printf("a_star   %.12f\n", m.a_star);
  std::printf("barrier  %.10f\n", std::exp(m.a_star));
  std::printf("residual %.3e\n", ddput::barrier_residual(m.core, m.a_star));
  return 0;
}

int cmd_sweep(const ddput::RunInputs& in, const std::string& figure, const std::string& grid1,
              const std::string& grid2, bool has_grid1, bool has_grid2, const std::string& out) {
  ddput::SweepRequest req{figure, in, {}, {}};
  if (has_grid1) req.grid1 = ddput::parse_grid(grid1);
  if (has_grid2) req.grid2 = ddput::parse_grid(grid2);
  const auto table = ddput::run_sweep(req);
  if (table.rows.empty()) throw ddput::DomainError("sweep produced no rows");
  if (out.empty() || out == "-") {
    ddput::write_csv(std::cout, table);
    return std::cout ? 0 : 1;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot open '" << out << "' for writing\n";
    return 1;
  }
  ddput::write_csv(f, table);
  f.close();
  if (!f) {
    std::cerr << "error: failed writing '" << out << "'\n";
    return 1;
  }
  return 0;
}

int cmd_verify(const ddput::RunInputs& in, bool quick, const McFlags& mc) {
  ddput::VerifyOptions opts;
  opts.quick = quick;
  opts.mc = mc.config();
  const auto results =
      ddput::run_suite(ddput::model_params(in), ddput::strike(in), ddput::drawdown_threshold(in), opts);
  ddput::print_table(std::cout, results);
  const bool ok = ddput::all_passed(results);
  std::cout << (ok ? "all checks passed" : "some checks FAILED") << '\n';
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal exercise of an American put capped at the first drawdown epoch"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file mirroring the long flags; flags win");

  ddput::RunInputs in;
  app.add_option("--r", in.r, "discount rate")->capture_default_str();
  app.add_option("--sigma", in.sigma, "volatility")->capture_default_str();
  app.add_option("--lambda", in.lambda, "jump intensity")->capture_default_str();
  app.add_option("--rho", in.rho, "rate of the exponential log-jump sizes")->capture_default_str();
  app.add_option("--cap-ratio", in.cap_ratio, "drawdown ratio e^c (> 1)")->capture_default_str();
  app.add_option("--K", in.strike, "strike")->capture_default_str();
  app.add_option("--s", in.s, "current price")->capture_default_str();
  app.add_option("--smax", in.smax, "running maximum of the price")->capture_default_str();

  McFlags mc;
  app.add_option("--paths", mc.paths, "Monte Carlo paths")->capture_default_str();
  app.add_option("--dt", mc.dt, "Monte Carlo time step")->capture_default_str();
  app.add_option("--t-max", mc.t_max, "Monte Carlo horizon")->capture_default_str();
  app.add_option("--seed", mc.seed, "Monte Carlo seed")->envname("DRAWDOWN_PUT_SEED")->capture_default_str();
  app.add_option("--workers", mc.workers, "Monte Carlo worker threads")->capture_default_str();

  auto* price = app.add_subcommand("price", "price the option at (s, smax)");
  bool with_mc = false;
  price->add_flag("--mc", with_mc, "also print a Monte Carlo estimate");

  auto* barrier = app.add_subcommand("barrier", "solve the optimal exercise barrier");

  auto* sweep = app.add_subcommand("sweep", "write a CSV sweep for one figure");
  std::string figure, grid1, grid2, out;
  sweep->add_option("--figure", figure, "figure id")->required()->check(CLI::IsMember(ddput::figure_ids()));
  auto* g1 = sweep->add_option("--grid1", grid1, "first grid: a,b,c or lo:hi:n");
  auto* g2 = sweep->add_option("--grid2", grid2, "second grid: a,b,c or lo:hi:n");
  sweep->add_option("--out", out, "output CSV path (stdout if omitted)");

  auto* verify = app.add_subcommand("verify", "run the verification suite");
  bool quick = false;
  verify->add_flag("--quick", quick, "skip the Monte Carlo comparisons");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*price) return cmd_price(in, with_mc, mc);
    if (*barrier) return cmd_barrier(in);
    if (*sweep) return cmd_sweep(in, figure, grid1, grid2, g1->count() > 0, g2->count() > 0, out);
    if (*verify) return cmd_verify(in, quick, mc);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
