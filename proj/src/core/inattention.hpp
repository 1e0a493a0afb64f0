#pragma once

#include <optional>
#include <span>
#include <vector>

#include "distribution.hpp"
#include "robust.hpp"

namespace erc {

// Discrete-choice problem with a Shannon information cost, a pessimistically
// distorted state distribution, and an entropy discipline on the distortion.
struct RIProblem {
  std::vector<std::string> states;
  std::vector<std::string> actions;
  std::vector<std::vector<double>> v;  // v[a][w]: payoff of action a in state w
  FiniteDistribution g;                // full-support reference prior over states
  double xi = 1.0;                     // information cost weight, > 0
  double lambda = 1.0;                 // > 0
  double mu = 0.0;                     // in [0, 1/lambda)

  RIProblem(std::vector<std::string> states_, std::vector<std::string> actions_,
            std::vector<std::vector<double>> v_, FiniteDistribution g_, double xi_,
            double lambda_, double mu_);

  std::size_t n_states() const { return states.size(); }
  std::size_t n_actions() const { return actions.size(); }
};

// Conditional choice rule: psi[w] is a distribution over actions.
using ChoiceRule = std::vector<std::vector<double>>;

struct RISolution {
  ChoiceRule psi;                  // psi[w][a]
  std::vector<double> psi_bar;     // unconditional choice probabilities
  // Worst-case state distribution at psi (placeholder until solved).
  FiniteDistribution m_star = FiniteDistribution::from_probs({1.0});
  std::vector<double> scales;      // xi_w = xi g(w) / m*(w)
  double objective = 0.0;          // saddle objective at the solution
  double stationarity_residual = 0.0;
  int iterations = 0;
  bool boundary = false;           // some action's psi_bar collapsed to zero
};

struct SaddleOptions {
  double damping = 0.5;      // log-space damping on the psi_bar update
  double tol = 1e-10;        // max |psi - psi_prev| termination
  int max_iters = 100000;
  std::optional<ChoiceRule> init;
};

// Information cost: xi times the mutual information between state and action
// under the prior g. Zero exactly when the rule ignores the state.
double shannon_cost(const ChoiceRule& psi, const FiniteDistribution& g, double xi);

// Induced state payoffs U_psi(w) = sum_a v(a, w) psi(a|w).
std::vector<double> induced_state_payoffs(const ChoiceRule& psi, const RIProblem& problem);

// Gibbs distortion of the prior at the induced payoffs.
FiniteDistribution worst_case_states(const ChoiceRule& psi, const RIProblem& problem);

// Saddle objective at psi: inner worst case minus the information cost.
double saddle_objective(const ChoiceRule& psi, const RIProblem& problem);

// Alternating solve: distortion step in closed form, choice step as a
// generalized logit with state-dependent scales, damped in log space.
RISolution solve_saddle(const RIProblem& problem, const SaddleOptions& options = {});

// |log odds slope mismatch| for a converged solution; zero at stationarity.
double log_odds_check(const RISolution& solution, const RIProblem& problem, std::size_t action_a,
                      std::size_t action_b, std::size_t state);

struct NeglectPoint {
  double mu = 0.0;
  FiniteDistribution m_star;
  std::vector<double> scales;
  double entropy_m = 0.0;
};

struct NeglectProfile {
  std::vector<NeglectPoint> points;
  std::size_t focal_state = 0;      // argmin of U_psi - (1/lambda) log g at the last point
  bool entropy_decreasing = false;  // H(m*) monotone down the grid
};

// Re-solves the problem along a mu grid walking toward 1/lambda and reports
// how the worst-case state distribution sharpens.
NeglectProfile probability_neglect_profile(const RIProblem& problem,
                                           std::span<const double> mu_grid,
                                           const SaddleOptions& options = {});

}  // namespace erc
