#ifndef DDPUT_SWEEP_HPP
#define DDPUT_SWEEP_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "ddput/inputs.hpp"

namespace ddput {

/// Figure identifiers understood by run_sweep.
const std::vector<std::string>& figure_ids();

/// A sweep request. Empty grids select the built-in grid of the figure;
/// custom grids must be nonempty and strictly increasing.
///
///   smooth-paste        grid1 = s                 columns s,payoff,value,projection
///   price-surface(-zoom) grid1 = s, grid2 = smax   columns x,xbar,value (log prices)
///   barrier-r-sigma     grid1 = r, grid2 = sigma  columns param1,param2,metric (metric = e^{a*})
///   value-r-sigma       grid1 = r, grid2 = sigma  metric = V(log s, log smax)
///   barrier-rho-lambda  grid1 = rho, grid2 = lambda
///   value-rho-lambda    grid1 = rho, grid2 = lambda
///   value-rho           grid1 = rho, grid2 = s    metric = V(log s, log smax)
///   value-lambda        grid1 = lambda, grid2 = s
struct SweepRequest {
  std::string figure;
  RunInputs base;
  std::vector<double> grid1;
  std::vector<double> grid2;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table run_sweep(const SweepRequest& req);

/// CSV with a header row, 12 significant digits and LF line endings.
void write_csv(std::ostream& os, const Table& table);

/// Parses "a,b,c" or "lo:hi:n" (n equally spaced points).
std::vector<double> parse_grid(const std::string& text);

}  // namespace ddput

#endif  // DDPUT_SWEEP_HPP
