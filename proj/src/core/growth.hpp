#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "distribution.hpp"

namespace erc {

// Log-return portfolio problem with an entropy-perturbed Kelly objective.
// u(a, y) are log gross returns; mu in [0, 1) is the perturbation weight.
struct GrowthProblem {
  PayoffTable returns;     // u(a, y) = log gross return of action a in state y
  FiniteDistribution p;    // model over states Y used for the expectation
  double mu = 0.0;

  GrowthProblem(PayoffTable returns_, FiniteDistribution p_, double mu_);
};

// Entropy-perturbed wealth aggregator
//   G_mu(alpha, y) = (1 - mu) log sum_a alpha(a)^{1/(1-mu)} e^{u(a,y)/(1-mu)},
// computed through log-sum-exp; zero-weight actions are excluded. Equals the
// negative of min_q { E_q[-u] + R(q||alpha) + mu H(q) }.
double growth_aggregator(const FiniteDistribution& alpha, std::size_t state,
                         const PayoffTable& returns, double mu);

struct PortfolioSolution {
  FiniteDistribution alpha_star;
  double value = 0.0;          // E_p[G_mu(alpha*, y)]
  double foc_residual = 0.0;   // |f'| at an interior optimum, 0 at a certified corner
  bool boundary = false;
};

// Maximizes E_p[G_mu(alpha, y)] over the action simplex. Two actions reduce
// to a scanned-and-golden-sectioned line search certified by a first-order
// check; larger problems run projected gradient ascent with backtracking
// from the uniform portfolio.
PortfolioSolution optimal_portfolio(const GrowthProblem& problem);

// Growth-rate loss from optimizing against p_mis when the state distribution
// is p_true: E[G_mu at alpha*(p_true)] - E[G_mu at alpha*(p_mis)], both
// expectations under p_true. Nonnegative by optimality.
double misspecification_loss(const PayoffTable& returns, const FiniteDistribution& p_true,
                             const FiniteDistribution& p_mis, double mu);

struct SampledChoiceRule {
  std::vector<std::vector<double>> action_given_state;  // q(a|y), indexed [y][a]
  std::vector<double> action_marginal;                  // q(a)
  // q(y|a); rows only defined where q(a) > 0 (flagged below).
  std::vector<std::vector<double>> state_given_action;
  std::vector<bool> posterior_defined;
};

// Proportional-sampling rule induced by a mu = 0 optimizer:
//   q(a|y) = alpha(a) e^{u(a,y)} / sum_b alpha(b) e^{u(b,y)},
// with marginals under p and Bayes posteriors where defined.
SampledChoiceRule sampled_choice_rule(const FiniteDistribution& alpha_star,
                                      const FiniteDistribution& p, const PayoffTable& returns);

struct HullCheck {
  bool holds = false;
  std::vector<double> weights;  // over actions with q(a) > 0, when holds
  std::string certificate;      // why it failed, when it does not
};

// Does p_mis lie in the convex hull of the defined posteriors q(.|a)?
// Solved by exact low-dimensional geometry (at most 3 hull points).
HullCheck check_regularity_2(const FiniteDistribution& p_mis, const SampledChoiceRule& rule);

// Two assets with identical binary payoffs and identical downside mass delta;
// the foreign asset concentrates that mass on one crisis state.
struct HomeBiasInstance {
  int n_downside = 2;      // N >= 2 downside states
  double delta = 0.3;      // total downside probability, in (0, 1)
  double epsilon = 0.01;   // residual mass per non-crisis downside state, in (0, delta/N)
  double lambda = 1.0;
  double mu = 0.0;         // in [0, 1/lambda)

  void validate() const;
};

struct HomeBiasResult {
  double v_domestic = 0.0;
  double v_foreign = 0.0;
  double premium = 0.0;  // kappa log(Z_f / Z_d)
};

HomeBiasResult home_bias_premium(const HomeBiasInstance& instance);

}  // namespace erc
