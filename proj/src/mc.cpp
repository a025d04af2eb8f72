#include "ddput/mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "ddput/errors.hpp"

namespace ddput {

const char* stop_kind_name(StopKind kind) {
  switch (kind) {
    case StopKind::Barrier: return "BARRIER";
    case StopKind::Drawdown: return "DRAWDOWN";
    case StopKind::Truncated: return "TRUNCATED";
  }
  return "?";
}

Stream::Stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  engine_.seed(seq);
}

namespace {

void check_config(const McConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw DomainError("mc: dt must be positive");
  if (!(cfg.t_max > 0.0)) throw DomainError("mc: t_max must be positive");
  if (cfg.n_paths == 0) throw DomainError("mc: n_paths must be positive");
  if (cfg.n_workers == 0) throw DomainError("mc: n_workers must be positive");
}

struct Partial {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t n = 0, barrier = 0, drawdown = 0, truncated = 0, jump_stops = 0;
};

// Runs `body(stream, partial)` once per path in each worker's block and
// combines the partials in worker order.
template <typename Body>
McEstimate run_workers(const McConfig& cfg, Body body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(cfg.n_workers, cfg.n_paths));
  std::vector<Partial> partials(workers);
  auto job = [&](unsigned w) {
    Stream stream(cfg.seed, w);
    const std::size_t begin = cfg.n_paths * w / workers;
    const std::size_t end = cfg.n_paths * (w + 1) / workers;
    for (std::size_t i = begin; i < end; ++i) body(stream, partials[w]);
  };
  if (workers == 1) {
    job(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(job, w);
    for (auto& t : threads) t.join();
  }

  Partial total;
  for (const auto& p : partials) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
    total.n += p.n;
    total.barrier += p.barrier;
    total.drawdown += p.drawdown;
    total.truncated += p.truncated;
    total.jump_stops += p.jump_stops;
  }
  McEstimate est;
  const double n = static_cast<double>(total.n);
  est.mean = total.sum / n;
  const double var = total.n > 1 ? std::max(0.0, (total.sum_sq - n * est.mean * est.mean) / (n - 1.0)) : 0.0;
  est.std_err = std::sqrt(var / n);
  est.n_paths = total.n;
  est.n_barrier = total.barrier;
  est.n_drawdown = total.drawdown;
  est.n_truncated = total.truncated;
  est.n_jump_stops = total.jump_stops;
  return est;
}

}  // namespace

PathOutcome simulate_path(const ModelParams<double>& params, const Contract& contract, double a, double x0,
                          double xbar0, const McConfig& cfg, Stream& stream) {
  auto& eng = stream.engine();
  const double K = contract.strike;
  const double c = contract.drawdown;
  const double r = params.r();
  auto payoff = [&](double t, double x) { return std::exp(-r * t) * std::max(K - std::exp(x), 0.0); };

  PathOutcome out;
  if (x0 <= a) {
    out = {0.0, StopKind::Barrier, x0, payoff(0.0, x0), false};
    return out;
  }
  if (xbar0 - x0 >= c) {
    out = {0.0, StopKind::Drawdown, x0, payoff(0.0, x0), false};
    return out;
  }

  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> mark(params.has_jumps() ? params.rho() : 1.0);
  std::exponential_distribution<double> wait(params.has_jumps() ? params.lambda() : 1.0);
  const double drift = params.mu() * cfg.dt;
  const double vol = params.sigma() * std::sqrt(cfg.dt);
  // Arrival times of the Poisson clock; the number falling in a step is Poisson(lambda dt).
  double next_jump = params.has_jumps() ? wait(eng) : std::numeric_limits<double>::infinity();

  double x = x0;
  double xbar = xbar0;
  const auto n_steps = static_cast<std::size_t>(std::ceil(cfg.t_max / cfg.dt));
  for (std::size_t step = 1; step <= n_steps; ++step) {
    const double t = static_cast<double>(step) * cfg.dt;
    x += drift + vol * normal(eng);
    bool jumped = false;
    while (next_jump <= t) {
      x -= mark(eng);
      next_jump += wait(eng);
      jumped = true;
    }
    if (x <= a) return {t, StopKind::Barrier, x, payoff(t, x), jumped};
    xbar = std::max(xbar, x);
    if (xbar - x >= c) return {t, StopKind::Drawdown, x, payoff(t, x), jumped};
  }
  out.stop_time = static_cast<double>(n_steps) * cfg.dt;
  out.stop_kind = StopKind::Truncated;
  out.x_at_stop = x;
  out.discounted_payoff = 0.0;
  return out;
}

McEstimate estimate_price(const ModelParams<double>& params, const Contract& contract, double a, double x,
                          double xbar, const McConfig& cfg) {
  check_config(cfg);
  if (x > xbar) throw DomainError("mc: state must satisfy x <= xbar");
  if (!(contract.strike > 0.0) || !(contract.drawdown > 0.0)) throw DomainError("mc: invalid contract");
  auto est = run_workers(cfg, [&](Stream& s, Partial& p) {
    const auto o = simulate_path(params, contract, a, x, xbar, cfg, s);
    p.sum += o.discounted_payoff;
    p.sum_sq += o.discounted_payoff * o.discounted_payoff;
    ++p.n;
    switch (o.stop_kind) {
      case StopKind::Barrier: ++p.barrier; break;
      case StopKind::Drawdown: ++p.drawdown; break;
      case StopKind::Truncated: ++p.truncated; break;
    }
    if (o.jumped) ++p.jump_stops;
  });
  const double t_max = std::ceil(cfg.t_max / cfg.dt) * cfg.dt;
  est.truncation_bound = contract.strike * std::exp(-params.r() * t_max) *
                         static_cast<double>(est.n_truncated) / static_cast<double>(est.n_paths);
  return est;
}

McEstimate estimate_discounted_asset(const ModelParams<double>& params, double x, double horizon,
                                     const McConfig& cfg) {
  check_config(cfg);
  if (!(horizon > 0.0)) throw DomainError("mc: horizon must be positive");
  const auto n_steps = static_cast<std::size_t>(std::ceil(horizon / cfg.dt));
  const double dt = horizon / static_cast<double>(n_steps);
  const double mean_jumps = params.lambda() * dt;
  return run_workers(cfg, [&](Stream& s, Partial& p) {
    auto& eng = s.engine();
    std::normal_distribution<double> normal(0.0, 1.0);
    std::poisson_distribution<int> count(mean_jumps > 0.0 ? mean_jumps : 1.0);
    double xt = x;
    for (std::size_t i = 0; i < n_steps; ++i) {
      xt += params.mu() * dt + params.sigma() * std::sqrt(dt) * normal(eng);
      if (mean_jumps > 0.0) {
        const int n = count(eng);
        // sum of n Exp(rho) marks is Gamma(n, 1/rho)
        if (n > 0) {
          std::gamma_distribution<double> marks(n, 1.0 / params.rho());
          xt -= marks(eng);
        }
      }
    }
    const double v = std::exp(-params.r() * horizon + xt);
    p.sum += v;
    p.sum_sq += v * v;
    ++p.n;
  });
}

}  // namespace ddput
