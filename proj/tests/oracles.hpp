#pragma once

// Brute-force reference computations for the test suites. Everything here is
// deliberately independent of the closed forms it is used to check: plain
// grid enumeration over simplices plus local pattern-search refinement, and
// central finite differences.

#include <functional>
#include <span>
#include <vector>

namespace oracle {

using Objective = std::function<double(std::span<const double>)>;

struct MinResult {
  std::vector<double> argmin;
  double value = 0.0;
};

// Global minimum of f over the n-simplex: full grid scan at the given
// resolution followed by shrinking pairwise-transfer refinement.
MinResult minimize_on_simplex(std::size_t n, const Objective& f, double resolution = 1e-3,
                              double refine_until = 1e-9);

// Pattern-search-only refinement from a feasible start (used internally and
// for warm starts).
MinResult refine_on_simplex(std::vector<double> start, const Objective& f, double step,
                            double until);

// Central finite difference of a scalar function.
double central_diff(const std::function<double(double)>& f, double x, double h = 1e-5);

struct ConstrainedMinResult {
  std::vector<std::vector<double>> argmin;  // one point per simplex block
  double value = 0.0;
  bool feasible_found = false;
};

// Minimum of f over a product of probability simplices subject to
// g(points) <= bound. Grid scan over every block combination, then joint
// pairwise-transfer refinement that preserves feasibility.
ConstrainedMinResult minimize_on_simplex_product(
    const std::vector<std::size_t>& block_sizes,
    const std::function<double(const std::vector<std::vector<double>>&)>& f,
    const std::function<double(const std::vector<std::vector<double>>&)>& g, double bound,
    double resolution = 0.02, double refine_until = 1e-7);

}  // namespace oracle
