#ifndef DDPUT_VERIFY_HPP
#define DDPUT_VERIFY_HPP

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ddput/mc.hpp"
#include "ddput/model.hpp"
#include "ddput/pricer.hpp"

namespace ddput {

/// One line of a verification table. `measured` is compared against
/// `tolerance` by the check itself; `passed` is the verdict.
struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

bool all_passed(const std::vector<CheckResult>& results);
void print_table(std::ostream& os, const std::vector<CheckResult>& results);

// ---- numerical probes ------------------------------------------------------

/// Richardson-extrapolated slope of V(., xbar) at a*+, plus e^{a*}, relative to e^{a*}.
double smooth_paste_error(const PriceModel<double>& m, double xbar);

/// |V(a*, xbar) - (K - e^{a*})| approached from the continuation side.
double continuous_paste_error(const PriceModel<double>& m, double xbar);

/// One-sided derivative of V(xbar, .) in the running-maximum direction at x = xbar.
double normal_reflection(const PriceModel<double>& m, double xbar);

/// (L V - r V)(x, xbar) with the drift of the model, finite differences for
/// the diffusion part and adaptive quadrature for the jump part.
double generator_residual(const PriceModel<double>& m, double x, double xbar);

struct DominanceReport {
  std::size_t points = 0;
  std::size_t violations = 0;         // V < payoff
  std::size_t strict_violations = 0;  // V <= payoff strictly inside the continuation region
  double min_margin = 0.0;            // min over the grid of V - payoff
};

/// V >= (K - e^x)^+ on an n x n grid of the state space around the regimes.
DominanceReport dominance(const PriceModel<double>& m, int n);

/// Largest gap between adjacent case formulas on xbar = a* + c, xbar = log K + c
/// and on the stopping boundary, relative to K.
double continuity_mismatch(const PriceModel<double>& m);

struct KinkReport {
  double left = 0.0;   // d/dxbar from below log K + c
  double right = 0.0;  // d/dxbar from above
  double noise = 0.0;  // finite-difference noise floor
};

/// One-sided xbar-derivatives of V across xbar = log K + c at a fixed x in (log K, log K + c).
KinkReport derivative_kink(const PriceModel<double>& m, double x);

// ---- Monte Carlo comparison ---------------------------------------------------

struct McComparison {
  double s = 0.0, smax = 0.0;
  Regime regime = Regime::Stop;
  double closed_form = 0.0;
  McEstimate coarse;  // step dt
  McEstimate fine;    // step dt/2
  bool within_tolerance = false;
  bool refinement_stable = false;
};

/// Allowance on |closed form - MC| on top of 3 standard errors, relative to K.
inline constexpr double kMcBiasAllowance = 5e-3;

McComparison compare_with_mc(const PriceModel<double>& m, double s, double smax, const McConfig& cfg);

/// Six (s, smax) states covering LOW, MID and HIGH at the reference parameters.
std::vector<std::pair<double, double>> reference_states(const PriceModel<double>& m);

// ---- suites ------------------------------------------------------------------

std::vector<CheckResult> structural_checks(const ModelParams<double>& p, double c);
std::vector<CheckResult> laplace_checks(const ModelParams<double>& p);
std::vector<CheckResult> barrier_checks(const PriceModel<double>& m);
std::vector<CheckResult> hjb_checks(const PriceModel<double>& m);
std::vector<CheckResult> shape_checks(const PriceModel<double>& m);
std::vector<CheckResult> martingale_checks(const ModelParams<double>& p, const McConfig& cfg);
std::vector<CheckResult> mc_checks(const PriceModel<double>& m, const McConfig& cfg);

/// Direction of a* along each of the sweep grids around the given base parameters.
std::vector<CheckResult> sensitivity_checks(const ModelParams<double>& base, double strike, double c);

struct VerifyOptions {
  bool quick = false;  // skip the pricing Monte Carlo comparison
  McConfig mc;
};

std::vector<CheckResult> run_suite(const ModelParams<double>& p, double strike, double c,
                                   const VerifyOptions& opts);

}  // namespace ddput

#endif  // DDPUT_VERIFY_HPP
