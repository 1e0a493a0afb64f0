#include "growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "info.hpp"
#include "robust.hpp"

namespace erc {

namespace {

double expected_aggregator(const FiniteDistribution& alpha, const GrowthProblem& problem) {
  double total = 0.0;
  for (std::size_t y = 0; y < problem.p.size(); ++y) {
    if (problem.p[y] == 0.0) continue;
    total += problem.p[y] * growth_aggregator(alpha, y, problem.returns, problem.mu);
  }
  return total;
}

FiniteDistribution two_action_mix(const PayoffTable& returns, double a0) {
  a0 = std::clamp(a0, 0.0, 1.0);
  return FiniteDistribution(returns.actions(), {a0, 1.0 - a0});
}

// Projection of an arbitrary vector onto the probability simplex.
std::vector<double> project_simplex(std::vector<double> v) {
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  int rho = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cum += sorted[i];
    const double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (sorted[i] - t > 0.0) {
      rho = static_cast<int>(i + 1);
      theta = t;
    }
  }
  (void)rho;
  for (double& x : v) x = std::max(0.0, x - theta);
  return v;
}

}  // namespace

GrowthProblem::GrowthProblem(PayoffTable returns_, FiniteDistribution p_, double mu_)
    : returns(std::move(returns_)), p(std::move(p_)), mu(mu_) {
  if (mu < 0.0 || mu >= 1.0) throw PreconditionError("GrowthProblem: mu must lie in [0, 1)");
  if (p.labels() != returns.outcomes())
    throw ConfigError("GrowthProblem: state distribution labels do not match return states");
}

double growth_aggregator(const FiniteDistribution& alpha, std::size_t state,
                         const PayoffTable& returns, double mu) {
  if (mu < 0.0 || mu >= 1.0) throw PreconditionError("growth_aggregator: mu must lie in [0, 1)");
  if (alpha.size() != returns.n_actions())
    throw ConfigError("growth_aggregator: portfolio length does not match actions");
  if (state >= returns.n_outcomes()) throw ConfigError("growth_aggregator: state out of range");
  const double s = 1.0 / (1.0 - mu);
  std::vector<double> terms;
  terms.reserve(alpha.size());
  for (std::size_t a = 0; a < alpha.size(); ++a) {
    if (alpha[a] <= 0.0) continue;
    terms.push_back(s * (std::log(alpha[a]) + returns.u(a, state)));
  }
  return log_sum_exp(terms) / s;
}

PortfolioSolution optimal_portfolio(const GrowthProblem& problem) {
  const std::size_t n = problem.returns.n_actions();

  if (n == 1) {
    FiniteDistribution alpha = FiniteDistribution::point_mass(problem.returns.actions(), 0);
    const double value = expected_aggregator(alpha, problem);
    return PortfolioSolution{std::move(alpha), value, 0.0, true};
  }

  if (n == 2) {
    auto f = [&](double a0) { return expected_aggregator(two_action_mix(problem.returns, a0), problem); };
    // Coarse scan picks the bracket, golden section refines it.
    const int kScan = 512;
    double best_x = 0.0, best_f = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kScan; ++i) {
      const double x = static_cast<double>(i) / kScan;
      const double fx = f(x);
      if (fx > best_f) {
        best_f = fx;
        best_x = x;
      }
    }
    double lo = std::max(0.0, best_x - 1.5 / kScan);
    double hi = std::min(1.0, best_x + 1.5 / kScan);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > 1e-12) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = f(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = f(x1);
      }
    }
    double x_star = 0.5 * (lo + hi);
    // Snap to a corner when it does at least as well as the interior point.
    if (x_star < 1e-5 && f(0.0) >= f(x_star) - 1e-14) x_star = 0.0;
    if (x_star > 1.0 - 1e-5 && f(1.0) >= f(x_star) - 1e-14) x_star = 1.0;

    // Value comparisons only localize the optimum to about sqrt(eps); polish
    // interior points by bisecting the sign of the central-difference slope.
    if (x_star > 0.0 && x_star < 1.0) {
      const double fd_h = std::min({1e-5, 0.5 * x_star, 0.5 * (1.0 - x_star)});
      auto slope = [&](double x) { return (f(x + fd_h) - f(x - fd_h)) / (2.0 * fd_h); };
      double g_lo = x_star - 2e-6, g_hi = x_star + 2e-6;
      if (g_lo > fd_h && g_hi < 1.0 - fd_h && slope(g_lo) > 0.0 && slope(g_hi) < 0.0) {
        for (int iter = 0; iter < 60; ++iter) {
          const double mid = 0.5 * (g_lo + g_hi);
          if (slope(mid) > 0.0)
            g_lo = mid;
          else
            g_hi = mid;
        }
        x_star = 0.5 * (g_lo + g_hi);
      }
    }

    PortfolioSolution sol{two_action_mix(problem.returns, x_star), f(x_star), 0.0, false};
    if (x_star <= 0.0 || x_star >= 1.0) {
      sol.boundary = true;
      const double h = 1e-5;
      const double inward = x_star <= 0.0 ? (f(h) - f(0.0)) / h : (f(1.0) - f(1.0 - h)) / h;
      // At a maximizing corner the slope must keep pointing into the corner.
      if ((x_star <= 0.0 && inward > 1e-7) || (x_star >= 1.0 && inward < -1e-7))
        throw ConvergenceError("optimal_portfolio: corner failed the first-order sign check");
    } else {
      const double h = std::min({1e-5, 0.5 * x_star, 0.5 * (1.0 - x_star)});
      sol.foc_residual = std::abs((f(x_star + h) - f(x_star - h)) / (2.0 * h));
      if (sol.foc_residual > 1e-9)
        throw ConvergenceError("optimal_portfolio: interior first-order residual too large");
    }
    return sol;
  }

  // n >= 3: projected gradient ascent with backtracking from uniform.
  std::vector<double> alpha(n, 1.0 / static_cast<double>(n));
  auto value_at = [&](const std::vector<double>& a) {
    return expected_aggregator(FiniteDistribution(problem.returns.actions(), a), problem);
  };
  const double h = 1e-7;
  double f_cur = value_at(alpha);
  for (int iter = 0; iter < 5000; ++iter) {
    std::vector<double> grad(n);
    for (std::size_t a = 0; a < n; ++a) {
      std::vector<double> up = alpha, dn = alpha;
      up[a] = std::min(1.0, up[a] + h);
      dn[a] = std::max(0.0, dn[a] - h);
      up = project_simplex(up);
      dn = project_simplex(dn);
      grad[a] = (value_at(up) - value_at(dn)) / (2.0 * h);
    }
    double step = 1.0;
    bool improved = false;
    while (step > 1e-12) {
      std::vector<double> trial(n);
      for (std::size_t a = 0; a < n; ++a) trial[a] = alpha[a] + step * grad[a];
      trial = project_simplex(trial);
      const double f_trial = value_at(trial);
      if (f_trial > f_cur + 1e-15) {
        alpha = std::move(trial);
        f_cur = f_trial;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  PortfolioSolution sol{FiniteDistribution(problem.returns.actions(), alpha), f_cur, 0.0, false};
  for (double a : alpha)
    if (a <= 1e-9) sol.boundary = true;
  return sol;
}

double misspecification_loss(const PayoffTable& returns, const FiniteDistribution& p_true,
                             const FiniteDistribution& p_mis, double mu) {
  const GrowthProblem truth(returns, p_true, mu);
  const GrowthProblem wrong(returns, p_mis, mu);
  const PortfolioSolution at_truth = optimal_portfolio(truth);
  const PortfolioSolution at_wrong = optimal_portfolio(wrong);
  double realized_wrong = 0.0;
  for (std::size_t y = 0; y < p_true.size(); ++y) {
    if (p_true[y] == 0.0) continue;
    realized_wrong += p_true[y] * growth_aggregator(at_wrong.alpha_star, y, returns, mu);
  }
  return at_truth.value - realized_wrong;
}

SampledChoiceRule sampled_choice_rule(const FiniteDistribution& alpha_star,
                                      const FiniteDistribution& p, const PayoffTable& returns) {
  if (alpha_star.size() != returns.n_actions())
    throw ConfigError("sampled_choice_rule: portfolio length does not match actions");
  if (p.size() != returns.n_outcomes())
    throw ConfigError("sampled_choice_rule: state distribution does not match states");
  const std::size_t n_a = returns.n_actions();
  const std::size_t n_y = returns.n_outcomes();
  SampledChoiceRule rule;
  rule.action_given_state.assign(n_y, std::vector<double>(n_a, 0.0));
  rule.action_marginal.assign(n_a, 0.0);
  for (std::size_t y = 0; y < n_y; ++y) {
    double z = 0.0;
    for (std::size_t a = 0; a < n_a; ++a) {
      const double w = alpha_star[a] * std::exp(returns.u(a, y));
      rule.action_given_state[y][a] = w;
      z += w;
    }
    for (std::size_t a = 0; a < n_a; ++a) {
      rule.action_given_state[y][a] /= z;
      rule.action_marginal[a] += p[y] * rule.action_given_state[y][a];
    }
  }
  rule.state_given_action.assign(n_a, std::vector<double>(n_y, 0.0));
  rule.posterior_defined.assign(n_a, false);
  for (std::size_t a = 0; a < n_a; ++a) {
    if (rule.action_marginal[a] <= 0.0) continue;
    rule.posterior_defined[a] = true;
    for (std::size_t y = 0; y < n_y; ++y)
      rule.state_given_action[a][y] = p[y] * rule.action_given_state[y][a] / rule.action_marginal[a];
  }
  return rule;
}

HullCheck check_regularity_2(const FiniteDistribution& p_mis, const SampledChoiceRule& rule) {
  std::vector<std::vector<double>> points;
  std::vector<std::size_t> point_actions;
  for (std::size_t a = 0; a < rule.posterior_defined.size(); ++a) {
    if (rule.posterior_defined[a]) {
      points.push_back(rule.state_given_action[a]);
      point_actions.push_back(a);
    }
  }
  HullCheck result;
  result.weights.assign(rule.posterior_defined.size(), 0.0);
  if (points.empty()) {
    result.certificate = "no posteriors are defined";
    return result;
  }
  const std::size_t dim = p_mis.size();
  const double tol = 1e-9;

  auto matches = [&](const std::vector<double>& combo) {
    for (std::size_t y = 0; y < dim; ++y)
      if (std::abs(combo[y] - p_mis[y]) > tol) return false;
    return true;
  };

  if (points.size() == 1) {
    if (matches(points[0])) {
      result.holds = true;
      result.weights[point_actions[0]] = 1.0;
    } else {
      result.certificate = "single posterior differs from the candidate model";
    }
    return result;
  }

  if (points.size() == 2) {
    // Solve p_mis = t v0 + (1-t) v1 on the coordinate where the posteriors
    // differ the most, then verify every coordinate.
    std::size_t pivot = 0;
    double best_gap = 0.0;
    for (std::size_t y = 0; y < dim; ++y) {
      const double gap = std::abs(points[0][y] - points[1][y]);
      if (gap > best_gap) {
        best_gap = gap;
        pivot = y;
      }
    }
    if (best_gap < tol) {
      if (matches(points[0])) {
        result.holds = true;
        result.weights[point_actions[0]] = 1.0;
      } else {
        result.certificate = "coincident posteriors differ from the candidate model";
      }
      return result;
    }
    double t = (p_mis[pivot] - points[1][pivot]) / (points[0][pivot] - points[1][pivot]);
    if (t < -tol || t > 1.0 + tol) {
      result.certificate = "segment coefficient " + std::to_string(t) + " lies outside [0, 1]";
      return result;
    }
    t = std::clamp(t, 0.0, 1.0);
    std::vector<double> combo(dim);
    for (std::size_t y = 0; y < dim; ++y)
      combo[y] = t * points[0][y] + (1.0 - t) * points[1][y];
    if (!matches(combo)) {
      result.certificate = "candidate model is off the posterior segment";
      return result;
    }
    result.holds = true;
    result.weights[point_actions[0]] = t;
    result.weights[point_actions[1]] = 1.0 - t;
    return result;
  }

  if (points.size() == 3) {
    // Barycentric solve on two independent coordinates, verified on all.
    for (std::size_t c1 = 0; c1 < dim; ++c1) {
      for (std::size_t c2 = c1 + 1; c2 < dim; ++c2) {
        const double a11 = points[0][c1] - points[2][c1];
        const double a12 = points[1][c1] - points[2][c1];
        const double a21 = points[0][c2] - points[2][c2];
        const double a22 = points[1][c2] - points[2][c2];
        const double det = a11 * a22 - a12 * a21;
        if (std::abs(det) < 1e-12) continue;
        const double b1 = p_mis[c1] - points[2][c1];
        const double b2 = p_mis[c2] - points[2][c2];
        double w0 = (b1 * a22 - a12 * b2) / det;
        double w1 = (a11 * b2 - b1 * a21) / det;
        double w2 = 1.0 - w0 - w1;
        if (w0 < -tol || w1 < -tol || w2 < -tol) continue;
        w0 = std::max(0.0, w0);
        w1 = std::max(0.0, w1);
        w2 = std::max(0.0, w2);
        std::vector<double> combo(dim);
        for (std::size_t y = 0; y < dim; ++y)
          combo[y] = w0 * points[0][y] + w1 * points[1][y] + w2 * points[2][y];
        if (!matches(combo)) continue;
        result.holds = true;
        result.weights[point_actions[0]] = w0;
        result.weights[point_actions[1]] = w1;
        result.weights[point_actions[2]] = w2;
        return result;
      }
    }
    result.certificate = "no barycentric combination of the three posteriors matches";
    return result;
  }

  throw PreconditionError("check_regularity_2: more than three defined posteriors unsupported");
}

void HomeBiasInstance::validate() const {
  if (n_downside < 2) throw PreconditionError("HomeBiasInstance: need at least two downside states");
  if (delta <= 0.0 || delta >= 1.0)
    throw PreconditionError("HomeBiasInstance: delta must lie in (0, 1)");
  if (epsilon <= 0.0 || epsilon >= delta / n_downside)
    throw PreconditionError("HomeBiasInstance: epsilon must lie in (0, delta/N)");
  if (lambda <= 0.0) throw PreconditionError("HomeBiasInstance: lambda must be positive");
  if (mu < 0.0 || mu >= 1.0 / lambda)
    throw PreconditionError("HomeBiasInstance: mu must lie in [0, 1/lambda)");
}

HomeBiasResult home_bias_premium(const HomeBiasInstance& instance) {
  instance.validate();
  const int n = instance.n_downside;
  const RobustParams params = RobustParams::make(instance.lambda, instance.mu);

  // log Z_a = log( e^{-1/kappa} q_a(y*)^beta + sum_i q_a(y_i)^beta ),
  // assembled as one log-sum-exp over N+1 summands so that tiny epsilon^beta
  // terms cannot underflow the total.
  auto log_z = [&](const std::vector<double>& downside) {
    std::vector<double> terms;
    terms.reserve(downside.size() + 1);
    terms.push_back(-1.0 / params.kappa + params.beta * std::log(1.0 - instance.delta));
    for (double q : downside) terms.push_back(params.beta * std::log(q));
    return log_sum_exp(terms);
  };

  std::vector<double> domestic(n, instance.delta / n);
  std::vector<double> foreign(n, instance.epsilon);
  foreign[0] = instance.delta - (n - 1) * instance.epsilon;

  const double log_z_d = log_z(domestic);
  const double log_z_f = log_z(foreign);
  HomeBiasResult result;
  result.v_domestic = -params.kappa * log_z_d;
  result.v_foreign = -params.kappa * log_z_f;
  result.premium = params.kappa * (log_z_f - log_z_d);
  return result;
}

}  // namespace erc
