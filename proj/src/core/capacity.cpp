#include "capacity.hpp"

#include <cmath>

#include "info.hpp"

namespace erc {

namespace {

void require_valid(const PayoffTable& payoffs, const std::vector<StructuredModel>& models,
                   const FiniteDistribution& pi, double lambda, std::size_t action) {
  if (models.size() != pi.size())
    throw ConfigError("capacity: posterior length does not match model count");
  if (action >= payoffs.n_actions()) throw ConfigError("capacity: action out of range");
  if (lambda <= 0.0) throw PreconditionError("capacity: lambda must be positive");
  for (const auto& m : models) m.check_against(payoffs);
}

}  // namespace

double complexity_functional(const PayoffTable& payoffs, const std::vector<StructuredModel>& models,
                             const FiniteDistribution& pi, double lambda, double mu,
                             std::size_t action) {
  require_valid(payoffs, models, pi, lambda, action);
  const RobustParams params = RobustParams::make(lambda, mu);
  if (params.regime != Regime::Interior)
    throw PreconditionError("complexity_functional: mu must satisfy mu < 1/lambda");
  double total = shannon_entropy(pi);
  for (std::size_t k = 0; k < models.size(); ++k) {
    if (pi[k] == 0.0) continue;
    total += pi[k] * worst_case(payoffs.row(action), models[k].row(action), params).entropy;
  }
  return total;
}

RegularityC1 check_assumption_C1(const PayoffTable& payoffs,
                                 const std::vector<StructuredModel>& models,
                                 const FiniteDistribution& pi, double lambda, std::size_t action) {
  require_valid(payoffs, models, pi, lambda, action);
  constexpr double kTol = 1e-12;
  RegularityC1 reg;
  reg.nonconstant.resize(models.size());
  reg.unique_min.resize(models.size());
  reg.all_hold = true;
  const auto u = payoffs.row(action);
  for (std::size_t k = 0; k < models.size(); ++k) {
    const FiniteDistribution& q = models[k].row(action);
    double phi_min = std::numeric_limits<double>::infinity();
    double phi_max = -std::numeric_limits<double>::infinity();
    double crit_min = std::numeric_limits<double>::infinity();
    int min_count = 0;
    for (std::size_t y = 0; y < q.size(); ++y) {
      const double phi = std::log(q[y]) - lambda * u[y];
      phi_min = std::min(phi_min, phi);
      phi_max = std::max(phi_max, phi);
      const double crit = u[y] - std::log(q[y]) / lambda;
      if (crit < crit_min - kTol) {
        crit_min = crit;
        min_count = 1;
      } else if (crit <= crit_min + kTol) {
        ++min_count;
      }
    }
    reg.nonconstant[k] = (phi_max - phi_min) > kTol;
    reg.unique_min[k] = min_count == 1;
    if (pi[k] > 0.0 && !(reg.nonconstant[k] && reg.unique_min[k])) reg.all_hold = false;
  }
  return reg;
}

BudgetSolution solve_budget(const PayoffTable& payoffs, const std::vector<StructuredModel>& models,
                            const FiniteDistribution& pi, double lambda, std::size_t action,
                            double budget) {
  require_valid(payoffs, models, pi, lambda, action);
  const double h_pi = shannon_entropy(pi);
  const double log_y = std::log(static_cast<double>(payoffs.n_outcomes()));
  if (!(budget > h_pi && budget < h_pi + log_y))
    throw PreconditionError("solve_budget: budget must lie strictly between H(pi) and H(pi)+log|Y|");

  auto c_at = [&](double mu) {
    return complexity_functional(payoffs, models, pi, lambda, mu, action);
  };

  BudgetSolution sol;
  sol.budget = budget;
  const double c0 = c_at(0.0);
  if (budget >= c0) {
    // Constraint slack at the unconstrained optimum; multiplier is zero.
    sol.mu_B = 0.0;
    sol.binding = false;
    sol.kkt_residual = 0.0;
  } else {
    sol.binding = true;
    double lo = 0.0;                      // C(lo) = c0 > budget
    double hi = 1.0 / lambda - 1e-12;     // C(hi) close to H(pi) < budget
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (c_at(mid) > budget)
        lo = mid;
      else
        hi = mid;
      if (hi - lo < 1e-15) break;
    }
    sol.mu_B = 0.5 * (lo + hi);
    sol.kkt_residual = std::abs(c_at(sol.mu_B) - budget);
    if (sol.kkt_residual > 1e-8)
      throw ConvergenceError("solve_budget: bisection did not reach the budget tolerance");
  }
  const RobustParams params = RobustParams::make(lambda, sol.mu_B);
  for (const auto& model : models)
    sol.distortions.push_back(worst_case(payoffs.row(action), model.row(action), params).distortion);
  return sol;
}

CapacityProfile capacity_profile(const PayoffTable& payoffs,
                                 const std::vector<StructuredModel>& models,
                                 const FiniteDistribution& pi, double lambda, std::size_t action,
                                 std::span<const double> mu_grid) {
  CapacityProfile profile;
  profile.mu_grid.assign(mu_grid.begin(), mu_grid.end());
  profile.complexity.reserve(mu_grid.size());
  for (double mu : mu_grid)
    profile.complexity.push_back(complexity_functional(payoffs, models, pi, lambda, mu, action));
  const double h_pi = shannon_entropy(pi);
  profile.limit_low = h_pi + std::log(static_cast<double>(payoffs.n_outcomes()));
  profile.limit_high = h_pi;
  return profile;
}

}  // namespace erc
