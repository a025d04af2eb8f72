#ifndef DDPUT_MC_HPP
#define DDPUT_MC_HPP

#include <cstddef>
#include <cstdint>
#include <random>

#include "ddput/model.hpp"

namespace ddput {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

struct McConfig {
  std::size_t n_paths = 200000;
  double dt = 1e-3;
  double t_max = 400.0;
  std::uint64_t seed = kDefaultSeed;
  unsigned n_workers = 1;
};

/// Strike and log drawdown threshold of the capped put.
struct Contract {
  double strike;
  double drawdown;
};

enum class StopKind { Barrier, Drawdown, Truncated };

const char* stop_kind_name(StopKind kind);

struct PathOutcome {
  double stop_time = 0.0;
  StopKind stop_kind = StopKind::Truncated;
  double x_at_stop = 0.0;
  double discounted_payoff = 0.0;
  bool jumped = false;  // the stopping step contained at least one jump
};

/// Random stream of one worker. Streams with different indices are seeded
/// from (seed, index) through a seed sequence.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t index);
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// One path of the log price on a grid of width dt, stopped at the first
/// grid time where X <= a or (running max - X) >= c, or truncated at t_max.
PathOutcome simulate_path(const ModelParams<double>& params, const Contract& contract, double a, double x0,
                          double xbar0, const McConfig& cfg, Stream& stream);

struct McEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  double truncation_bound = 0.0;
  std::size_t n_paths = 0;
  std::size_t n_barrier = 0;
  std::size_t n_drawdown = 0;
  std::size_t n_truncated = 0;
  std::size_t n_jump_stops = 0;
};

/// Mean discounted payoff of the rule "stop at tau_a or the drawdown epoch".
/// Worker w simulates a contiguous block of paths on stream w; partial sums
/// are reduced in worker order, so results depend only on (cfg, inputs).
McEstimate estimate_price(const ModelParams<double>& params, const Contract& contract, double a, double x,
                          double xbar, const McConfig& cfg);

/// E[e^{-r T} e^{X_T}] from x without stopping, sampled with exact
/// increments over steps of cfg.dt. Equals e^x under the martingale drift.
McEstimate estimate_discounted_asset(const ModelParams<double>& params, double x, double horizon,
                                     const McConfig& cfg);

}  // namespace ddput

#endif  // DDPUT_MC_HPP
