#include "ddput/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include "ddput/pricer.hpp"

namespace ddput {

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  return g;
}

const std::vector<double>& pick(const std::vector<double>& custom, const std::vector<double>& fallback,
                                const char* name) {
  if (custom.empty()) return fallback;
  for (std::size_t i = 1; i < custom.size(); ++i)
    if (!(custom[i] > custom[i - 1])) throw DomainError(std::string(name) + " grid must be strictly increasing");
  return custom;
}

PriceModel<double> model_for(const RunInputs& in) {
  return make_price_model(model_params(in), strike(in), drawdown_threshold(in));
}

double base_value(const RunInputs& in) {
  double x = 0.0, xbar = 0.0;
  log_state(in, x, xbar);
  return value(model_for(in), x, xbar);
}

Table smooth_paste(const SweepRequest& req) {
  const auto m = model_for(req.base);
  // a running maximum inside the LOW regime, where the barrier is a*
  const double xbar = m.a_star + 0.5 * m.drawdown();
  const double smax = std::exp(xbar);
  const auto fallback = linspace(0.6 * std::exp(m.a_star), smax, 121);
  const auto& s_grid = pick(req.grid1, fallback, "s");
  Table t{{"s", "payoff", "value", "projection"}, {}};
  for (double s : s_grid) {
    if (!(s > 0.0) || s > smax) throw DomainError("smooth-paste: s must lie in (0, smax]");
    const double x = std::log(s);
    t.rows.push_back({s, std::max(m.strike() - s, 0.0), value(m, x, xbar), projected_value(m, x, xbar)});
  }
  return t;
}

Table surface(const SweepRequest& req, const std::vector<double>& s_default, const std::vector<double>& smax_default) {
  const auto m = model_for(req.base);
  const auto& s_grid = pick(req.grid1, s_default, "s");
  const auto& smax_grid = pick(req.grid2, smax_default, "smax");
  Table t{{"x", "xbar", "value"}, {}};
  for (double s : s_grid)
    for (double smax : smax_grid) {
      if (!(s > 0.0) || !(smax > 0.0)) throw DomainError("price-surface: prices must be positive");
      const double x = std::log(s), xbar = std::log(smax);
      t.rows.push_back({x, xbar, x > xbar ? 0.0 : value(m, x, xbar)});
    }
  return t;
}

template <typename Metric>
Table two_param(const SweepRequest& req, const std::vector<double>& d1, const std::vector<double>& d2,
                const char* n1, const char* n2, Metric metric) {
  const auto& g1 = pick(req.grid1, d1, n1);
  const auto& g2 = pick(req.grid2, d2, n2);
  Table t{{"param1", "param2", "metric"}, {}};
  for (double p1 : g1)
    for (double p2 : g2) t.rows.push_back({p1, p2, metric(p1, p2)});
  return t;
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"smooth-paste",       "price-surface",    "price-surface-zoom",
                                            "barrier-r-sigma",    "value-r-sigma",    "barrier-rho-lambda",
                                            "value-rho-lambda",   "value-rho",        "value-lambda"};
  return ids;
}

Table run_sweep(const SweepRequest& req) {
  const auto& f = req.figure;
  const RunInputs base = req.base;
  auto barrier_at = [](RunInputs in) { return std::exp(model_for(in).a_star); };

  if (f == "smooth-paste") return smooth_paste(req);
  if (f == "price-surface") return surface(req, linspace(60, 150, 46), linspace(80, 150, 36));
  if (f == "price-surface-zoom") return surface(req, linspace(85, 110, 51), linspace(95, 125, 31));

  const auto r_grid = linspace(0.05, 0.5, 10), sigma_grid = linspace(0.1, 0.5, 9);
  const auto rho_grid = linspace(1, 10, 10), lambda_grid = linspace(0, 1, 11);
  if (f == "barrier-r-sigma" || f == "value-r-sigma") {
    const bool barrier = f == "barrier-r-sigma";
    return two_param(req, r_grid, sigma_grid, "r", "sigma", [&](double r, double s) {
      RunInputs in = base;
      in.r = r;
      in.sigma = s;
      return barrier ? barrier_at(in) : base_value(in);
    });
  }
  if (f == "barrier-rho-lambda" || f == "value-rho-lambda") {
    const bool barrier = f == "barrier-rho-lambda";
    return two_param(req, rho_grid, lambda_grid, "rho", "lambda", [&](double rho, double lam) {
      RunInputs in = base;
      in.rho = rho;
      in.lambda = lam;
      return barrier ? barrier_at(in) : base_value(in);
    });
  }
  const auto s_grid = linspace(0.8 * base.smax, base.smax, 21);
  if (f == "value-rho") {
    return two_param(req, {1, 2, 3, 5, 10}, s_grid, "rho", "s", [&](double rho, double s) {
      RunInputs in = base;
      in.rho = rho;
      in.s = s;
      return base_value(in);
    });
  }
  if (f == "value-lambda") {
    return two_param(req, {0, 0.2, 0.5, 1}, s_grid, "lambda", "s", [&](double lam, double s) {
      RunInputs in = base;
      in.lambda = lam;
      in.s = s;
      return base_value(in);
    });
  }
  throw DomainError("unknown figure id '" + f + "'");
}

void write_csv(std::ostream& os, const Table& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) os << (i ? "," : "") << table.header[i];
  os << '\n';
  char buf[40];
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.12g", row[i] == 0.0 ? 0.0 : row[i]);
      os << (i ? "," : "") << buf;
    }
    os << '\n';
  }
}

std::vector<double> parse_grid(const std::string& text) {
  auto number = [&](const std::string& tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(v))
      throw DomainError("bad grid value '" + tok + "'");
    return v;
  };
  if (text.empty()) throw DomainError("grid is empty");
  if (std::count(text.begin(), text.end(), ':') == 2) {
    const auto p1 = text.find(':'), p2 = text.rfind(':');
    const double lo = number(text.substr(0, p1)), hi = number(text.substr(p1 + 1, p2 - p1 - 1));
    const double n = number(text.substr(p2 + 1));
    if (!(n >= 1) || n != std::floor(n)) throw DomainError("grid point count must be a positive integer");
    return linspace(lo, hi, static_cast<int>(n));
  }
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(number(tok));
  if (out.empty()) throw DomainError("grid is empty");
  return out;
}

}  // namespace ddput
