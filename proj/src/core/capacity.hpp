#pragma once

#include <span>
#include <vector>

#include "distribution.hpp"
#include "robust.hpp"

namespace erc {

// Joint description complexity of (model, outcome) under the worst-case
// distortions of a fixed action:
//   C_a(lambda, mu; pi) = H(pi) + sum_q pi(q) H(p-hat_{lambda,mu}(a; q)).
// Strictly decreasing in mu on (-inf, 1/lambda) whenever the regularity
// conditions below hold, with range (H(pi), H(pi) + log |Y|).
double complexity_functional(const PayoffTable& payoffs, const std::vector<StructuredModel>& models,
                             const FiniteDistribution& pi, double lambda, double mu,
                             std::size_t action);

struct RegularityC1 {
  std::vector<bool> nonconstant;  // per model: log q_a - lambda*u not constant on Y
  std::vector<bool> unique_min;   // per model: u - (1/lambda) log q_a has a unique minimizer
  bool all_hold = false;          // over the support of pi
};

RegularityC1 check_assumption_C1(const PayoffTable& payoffs,
                                 const std::vector<StructuredModel>& models,
                                 const FiniteDistribution& pi, double lambda, std::size_t action);

struct BudgetSolution {
  double budget = 0.0;
  double mu_B = 0.0;
  double kkt_residual = 0.0;  // |C_a(mu_B) - B| when binding, slack-consistency otherwise
  bool binding = false;
  std::vector<FiniteDistribution> distortions;  // per model at mu_B
};

// Inverts the complexity functional: finds mu_B in [0, 1/lambda) with
// C_a(lambda, mu_B; pi) = B when the budget binds (B below the mu = 0
// complexity), else returns the unconstrained mu = 0 solution. B must lie in
// the open range (H(pi), H(pi) + log |Y|).
BudgetSolution solve_budget(const PayoffTable& payoffs, const std::vector<StructuredModel>& models,
                            const FiniteDistribution& pi, double lambda, std::size_t action,
                            double budget);

struct CapacityProfile {
  std::vector<double> mu_grid;
  std::vector<double> complexity;  // C_a along the grid
  double limit_low = 0.0;          // H(pi) + log |Y|  (mu -> -inf)
  double limit_high = 0.0;         // H(pi)            (mu -> 1/lambda)
};

CapacityProfile capacity_profile(const PayoffTable& payoffs,
                                 const std::vector<StructuredModel>& models,
                                 const FiniteDistribution& pi, double lambda, std::size_t action,
                                 std::span<const double> mu_grid);

}  // namespace erc
