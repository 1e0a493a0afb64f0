#include "inattention.hpp"

#include <algorithm>
#include <cmath>

#include "info.hpp"

namespace erc {

namespace {

constexpr double kSupportFloor = 1e-12;

std::vector<double> unconditional(const ChoiceRule& psi, const FiniteDistribution& g) {
  std::vector<double> bar(psi.front().size(), 0.0);
  for (std::size_t w = 0; w < psi.size(); ++w)
    for (std::size_t a = 0; a < bar.size(); ++a) bar[a] += g[w] * psi[w][a];
  return bar;
}

// One generalized-logit pass at fixed unconditional probabilities and scales.
ChoiceRule logit_rule(const std::vector<double>& psi_bar, const std::vector<double>& scales,
                      const RIProblem& problem) {
  ChoiceRule psi(problem.n_states(), std::vector<double>(problem.n_actions(), 0.0));
  for (std::size_t w = 0; w < problem.n_states(); ++w) {
    std::vector<double> log_terms(problem.n_actions(), -std::numeric_limits<double>::infinity());
    for (std::size_t a = 0; a < problem.n_actions(); ++a) {
      if (psi_bar[a] <= 0.0) continue;
      log_terms[a] = std::log(psi_bar[a]) + problem.v[a][w] / scales[w];
    }
    const double log_z = log_sum_exp(log_terms);
    for (std::size_t a = 0; a < problem.n_actions(); ++a)
      psi[w][a] = psi_bar[a] <= 0.0 ? 0.0 : std::exp(log_terms[a] - log_z);
  }
  return psi;
}

RISolution solve_once(const RIProblem& problem, const SaddleOptions& options,
                      const ChoiceRule& init) {
  RISolution sol;
  sol.psi = init;
  sol.psi_bar = unconditional(sol.psi, problem.g);
  sol.m_star = worst_case_states(sol.psi, problem);

  // The damping halves whenever progress stalls; near the entropy-penalty
  // saturation the undamped alternation ping-pongs between focal states, so
  // the distortion is smoothed in log space alongside the choice rule.
  double d = options.damping;
  double best_delta = std::numeric_limits<double>::infinity();
  int stalled = 0;
  std::vector<double> log_m(problem.n_states());
  for (std::size_t w = 0; w < problem.n_states(); ++w) log_m[w] = std::log(sol.m_star[w]);
  for (int iter = 1; iter <= options.max_iters; ++iter) {
    const FiniteDistribution m_target = worst_case_states(sol.psi, problem);
    double m_norm = 0.0;
    for (std::size_t w = 0; w < problem.n_states(); ++w) {
      log_m[w] = (1.0 - d) * log_m[w] + d * std::log(m_target[w]);
      m_norm += std::exp(log_m[w]);
    }
    std::vector<double> scales(problem.n_states());
    for (std::size_t w = 0; w < problem.n_states(); ++w) {
      log_m[w] -= std::log(m_norm);
      scales[w] = problem.xi * problem.g[w] / std::exp(log_m[w]);
    }

    const ChoiceRule psi_new = logit_rule(sol.psi_bar, scales, problem);
    std::vector<double> bar_raw = unconditional(psi_new, problem.g);

    // Damped log-space step on the unconditional probabilities.
    std::vector<double> bar_next(problem.n_actions(), 0.0);
    double bar_sum = 0.0;
    for (std::size_t a = 0; a < problem.n_actions(); ++a) {
      if (sol.psi_bar[a] <= 0.0 || bar_raw[a] <= 0.0) continue;
      bar_next[a] = std::exp((1.0 - d) * std::log(sol.psi_bar[a]) + d * std::log(bar_raw[a]));
      bar_sum += bar_next[a];
    }
    for (double& b : bar_next) b /= bar_sum;
    // Actions that collapse below the support floor are frozen at zero.
    bool frozen = false;
    for (std::size_t a = 0; a < problem.n_actions(); ++a) {
      if (bar_next[a] > 0.0 && bar_next[a] < kSupportFloor) {
        bar_next[a] = 0.0;
        frozen = true;
      }
    }
    if (frozen) {
      double s = 0.0;
      for (double b : bar_next) s += b;
      for (double& b : bar_next) b /= s;
      sol.boundary = true;
    }

    const ChoiceRule psi_next = logit_rule(bar_next, scales, problem);
    double delta = 0.0;
    for (std::size_t w = 0; w < problem.n_states(); ++w)
      for (std::size_t a = 0; a < problem.n_actions(); ++a)
        delta = std::max(delta, std::abs(psi_next[w][a] - sol.psi[w][a]));
    // The smoothed distortion must have caught up with its target too.
    for (std::size_t w = 0; w < problem.n_states(); ++w)
      delta = std::max(delta, std::abs(std::exp(log_m[w]) - m_target[w]));

    sol.psi = psi_next;
    sol.psi_bar = std::move(bar_next);
    sol.iterations = iter;
    if (delta < options.tol) break;
    if (delta < best_delta * 0.999) {
      best_delta = delta;
      stalled = 0;
    } else if (++stalled >= 200) {
      d = std::max(1e-3, 0.5 * d);
      stalled = 0;
    }
    if (iter == options.max_iters)
      throw ConvergenceError("solve_saddle: no convergence after max iterations; last step " +
                             std::to_string(delta));
  }

  // Tie the reported unconditionals exactly to the converged rule.
  sol.psi_bar = unconditional(sol.psi, problem.g);
  sol.m_star = worst_case_states(sol.psi, problem);
  sol.scales.resize(problem.n_states());
  for (std::size_t w = 0; w < problem.n_states(); ++w)
    sol.scales[w] = problem.xi * problem.g[w] / sol.m_star[w];
  sol.objective = saddle_objective(sol.psi, problem);

  // Stationarity: the converged rule must reproduce its own logit form.
  const ChoiceRule fixed_point = logit_rule(sol.psi_bar, sol.scales, problem);
  double resid = 0.0;
  for (std::size_t w = 0; w < problem.n_states(); ++w)
    for (std::size_t a = 0; a < problem.n_actions(); ++a)
      resid = std::max(resid, std::abs(fixed_point[w][a] - sol.psi[w][a]));
  sol.stationarity_residual = resid;
  return sol;
}

}  // namespace

RIProblem::RIProblem(std::vector<std::string> states_, std::vector<std::string> actions_,
                     std::vector<std::vector<double>> v_, FiniteDistribution g_, double xi_,
                     double lambda_, double mu_)
    : states(std::move(states_)),
      actions(std::move(actions_)),
      v(std::move(v_)),
      g(std::move(g_)),
      xi(xi_),
      lambda(lambda_),
      mu(mu_) {
  if (states.empty() || actions.empty()) throw ConfigError("RIProblem: empty states or actions");
  if (v.size() != actions.size()) throw ConfigError("RIProblem: one payoff row per action required");
  for (const auto& row : v)
    if (row.size() != states.size()) throw ConfigError("RIProblem: payoff row length mismatch");
  if (g.size() != states.size()) throw ConfigError("RIProblem: prior length does not match states");
  if (!g.full_support()) throw ConfigError("RIProblem: prior must have full support");
  if (xi <= 0.0) throw ConfigError("RIProblem: xi must be positive");
  if (lambda <= 0.0) throw ConfigError("RIProblem: lambda must be positive");
  if (mu < 0.0 || mu >= 1.0 / lambda)
    throw ConfigError("RIProblem: mu must lie in [0, 1/lambda)");
}

double shannon_cost(const ChoiceRule& psi, const FiniteDistribution& g, double xi) {
  if (psi.size() != g.size()) throw ConfigError("shannon_cost: rule length does not match prior");
  const std::vector<double> bar = unconditional(psi, g);
  double info = 0.0;
  for (std::size_t w = 0; w < psi.size(); ++w) {
    for (std::size_t a = 0; a < bar.size(); ++a) {
      if (psi[w][a] <= 0.0) continue;
      info += g[w] * psi[w][a] * std::log(psi[w][a] / bar[a]);
    }
  }
  return xi * std::max(0.0, info);
}

std::vector<double> induced_state_payoffs(const ChoiceRule& psi, const RIProblem& problem) {
  std::vector<double> u(problem.n_states(), 0.0);
  for (std::size_t w = 0; w < problem.n_states(); ++w)
    for (std::size_t a = 0; a < problem.n_actions(); ++a)
      u[w] += problem.v[a][w] * psi[w][a];
  return u;
}

FiniteDistribution worst_case_states(const ChoiceRule& psi, const RIProblem& problem) {
  const std::vector<double> u = induced_state_payoffs(psi, problem);
  const RobustParams params = RobustParams::make(problem.lambda, problem.mu);
  return worst_case(u, problem.g, params).distortion;
}

double saddle_objective(const ChoiceRule& psi, const RIProblem& problem) {
  const std::vector<double> u = induced_state_payoffs(psi, problem);
  const RobustParams params = RobustParams::make(problem.lambda, problem.mu);
  return worst_case(u, problem.g, params).value - shannon_cost(psi, problem.g, problem.xi);
}

RISolution solve_saddle(const RIProblem& problem, const SaddleOptions& options) {
  if (options.damping <= 0.0 || options.damping > 1.0)
    throw PreconditionError("solve_saddle: damping must lie in (0, 1]");
  ChoiceRule init = options.init.value_or(
      ChoiceRule(problem.n_states(),
                 std::vector<double>(problem.n_actions(), 1.0 / problem.n_actions())));
  if (init.size() != problem.n_states())
    throw ConfigError("solve_saddle: init rule has the wrong number of states");

  RISolution sol = solve_once(problem, options, init);
  if (sol.boundary) {
    // One perturbed restart before reporting boundary convergence.
    ChoiceRule perturbed = init;
    for (std::size_t w = 0; w < perturbed.size(); ++w) {
      double s = 0.0;
      for (std::size_t a = 0; a < perturbed[w].size(); ++a) {
        perturbed[w][a] = perturbed[w][a] * (1.0 + 0.01 * static_cast<double>(a + w % 3));
        s += perturbed[w][a];
      }
      for (double& x : perturbed[w]) x /= s;
    }
    RISolution retry = solve_once(problem, options, perturbed);
    if (!retry.boundary) return retry;
  }
  return sol;
}

double log_odds_check(const RISolution& solution, const RIProblem& problem, std::size_t action_a,
                      std::size_t action_b, std::size_t state) {
  if (action_a >= problem.n_actions() || action_b >= problem.n_actions() ||
      state >= problem.n_states())
    throw ConfigError("log_odds_check: index out of range");
  if (action_a == action_b) return 0.0;
  if (solution.psi_bar[action_a] <= 0.0 || solution.psi_bar[action_b] <= 0.0)
    throw PreconditionError("log_odds_check: both actions must be in the support of psi_bar");
  const double lhs = std::log(solution.psi[state][action_a] / solution.psi[state][action_b]);
  const double base = std::log(solution.psi_bar[action_a] / solution.psi_bar[action_b]);
  const double slope = (problem.v[action_a][state] - problem.v[action_b][state]) /
                       solution.scales[state];
  return std::abs(lhs - base - slope);
}

NeglectProfile probability_neglect_profile(const RIProblem& problem,
                                           std::span<const double> mu_grid,
                                           const SaddleOptions& options) {
  if (mu_grid.empty()) throw PreconditionError("probability_neglect_profile: empty mu grid");
  NeglectProfile profile;
  std::vector<double> last_u;
  for (double mu : mu_grid) {
    RIProblem at_mu(problem.states, problem.actions, problem.v, problem.g, problem.xi,
                    problem.lambda, mu);
    const RISolution sol = solve_saddle(at_mu, options);
    NeglectPoint point{mu, sol.m_star, sol.scales, shannon_entropy(sol.m_star)};
    profile.points.push_back(std::move(point));
    last_u = induced_state_payoffs(sol.psi, at_mu);
  }
  // Focal state: argmin of U_psi - (1/lambda) log g at the sharpest solve.
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t w = 0; w < problem.n_states(); ++w) {
    const double crit = last_u[w] - std::log(problem.g[w]) / problem.lambda;
    if (crit < best) {
      best = crit;
      profile.focal_state = w;
    }
  }
  profile.entropy_decreasing = true;
  for (std::size_t k = 0; k + 1 < profile.points.size(); ++k)
    if (profile.points[k + 1].entropy_m > profile.points[k].entropy_m + 1e-12)
      profile.entropy_decreasing = false;
  return profile;
}

}  // namespace erc
