#include <doctest.h>

#include <cmath>

#include "growth.hpp"
#include "info.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace erc;

namespace {

// Two-asset instance with gross returns [[3,1],[1,4]]; the standard
// counterexample environment for payoff-dependent misspecification losses.
PayoffTable counterexample_returns() {
  return PayoffTable({"a1", "a2"}, {"y1", "y2"},
                     {{std::log(3.0), std::log(1.0)}, {std::log(1.0), std::log(4.0)}});
}

const FiniteDistribution kEvenPrior = FiniteDistribution({"y1", "y2"}, {0.5, 0.5});
const FiniteDistribution kTiltedPrior = FiniteDistribution({"y1", "y2"}, {9.0 / 11.0, 2.0 / 11.0});

}  // namespace

TEST_CASE("aggregator closed form at the edges") {
  const PayoffTable returns = counterexample_returns();
  const FiniteDistribution alpha({"a1", "a2"}, {0.4, 0.6});

  // mu = 0 reduces to the log of the portfolio gross return.
  const double direct = std::log(0.4 * 3.0 + 0.6 * 1.0);
  CHECK(growth_aggregator(alpha, 0, returns, 0.0) == doctest::Approx(direct).epsilon(1e-14));

  // Degenerate portfolios pass the log return through for every mu.
  const FiniteDistribution point = FiniteDistribution::point_mass({"a1", "a2"}, 1);
  for (double mu : {0.0, 0.3, 0.7, 0.95})
    CHECK(growth_aggregator(point, 1, returns, mu) ==
          doctest::Approx(std::log(4.0)).epsilon(1e-13));

  // Interior portfolios lose value strictly once mu > 0.
  for (double mu : {0.1, 0.5, 0.9}) {
    CHECK(growth_aggregator(alpha, 0, returns, mu) < direct - 1e-9);
  }
}

TEST_CASE("aggregator equals the negated penalized minimization") {
  const PayoffTable returns = counterexample_returns();
  Rng rng(5);
  for (int k = 0; k < 25; ++k) {
    const auto alpha_probs = testutil::random_simplex(rng, 2);
    const FiniteDistribution alpha({"a1", "a2"}, alpha_probs);
    const double mu = rng.uniform(0.0, 0.9);
    const std::size_t y = rng.next_u64() % 2;
    std::vector<double> neg_u{-returns.u(0, y), -returns.u(1, y)};
    const auto objective = [&](std::span<const double> q) {
      return testutil::penalized_objective(q, neg_u, alpha_probs, 1.0, mu);
    };
    const auto brute = oracle::minimize_on_simplex(2, objective, 1e-3);
    CHECK(std::abs(growth_aggregator(alpha, y, returns, mu) - (-brute.value)) <= 1e-5);
  }
}

TEST_CASE("even prior optimum reproduces 5/12") {
  const PortfolioSolution sol =
      optimal_portfolio(GrowthProblem(counterexample_returns(), kEvenPrior, 0.0));
  CHECK(sol.alpha_star[0] == doctest::Approx(5.0 / 12.0).epsilon(1e-8));
  CHECK_FALSE(sol.boundary);
  CHECK(sol.foc_residual <= 1e-9);
}

TEST_CASE("tilted prior sends the portfolio to the first corner for every mu") {
  for (double mu : {0.0, 0.1, 0.3, 0.5, 0.7, 0.9}) {
    const PortfolioSolution sol =
        optimal_portfolio(GrowthProblem(counterexample_returns(), kTiltedPrior, mu));
    CHECK(sol.alpha_star[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sol.boundary);
  }
}

TEST_CASE("single-action portfolio is trivial") {
  const PayoffTable one({"a"}, {"y1", "y2"}, {{std::log(2.0), std::log(0.5)}});
  const PortfolioSolution sol = optimal_portfolio(GrowthProblem(one, kEvenPrior, 0.4));
  CHECK(sol.alpha_star[0] == 1.0);
  CHECK(sol.value == doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(0.5)).epsilon(1e-14));
}

TEST_CASE("misspecification loss of the counterexample") {
  const PayoffTable returns = counterexample_returns();
  CHECK(misspecification_loss(returns, kEvenPrior, kEvenPrior, 0.0) ==
        doctest::Approx(0.0).epsilon(1e-12));

  const double l0 = misspecification_loss(returns, kEvenPrior, kTiltedPrior, 0.0);
  CHECK(l0 == doctest::Approx(0.5 * std::log(121.0 / 72.0)).epsilon(1e-8));

  for (double mu = 0.1; mu < 0.95; mu += 0.1) {
    const double l_mu = misspecification_loss(returns, kEvenPrior, kTiltedPrior, mu);
    CHECK(l_mu >= -1e-12);
    CHECK(l_mu < l0 - 1e-6);
  }
}

TEST_CASE("sampled choice rule posteriors") {
  const PayoffTable returns = counterexample_returns();
  const FiniteDistribution alpha({"a1", "a2"}, {5.0 / 12.0, 7.0 / 12.0});
  const SampledChoiceRule rule = sampled_choice_rule(alpha, kEvenPrior, returns);
  CHECK(rule.action_given_state[0][0] == doctest::Approx(15.0 / 22.0).epsilon(1e-12));
  CHECK(rule.action_given_state[1][0] == doctest::Approx(5.0 / 33.0).epsilon(1e-12));
  CHECK(rule.posterior_defined[0]);
  CHECK(rule.state_given_action[0][0] == doctest::Approx(9.0 / 11.0).epsilon(1e-12));

  // Degenerate portfolio: the rule follows it with certainty.
  const SampledChoiceRule pointy =
      sampled_choice_rule(FiniteDistribution::point_mass({"a1", "a2"}, 0), kEvenPrior, returns);
  CHECK(pointy.action_given_state[0][0] == 1.0);
  CHECK(pointy.action_given_state[1][0] == 1.0);
  CHECK_FALSE(pointy.posterior_defined[1]);

  // Identical payoff columns convey nothing: posteriors equal the prior.
  const PayoffTable flat({"a1", "a2"}, {"y1", "y2"},
                         {{std::log(2.0), std::log(2.0)}, {std::log(2.0), std::log(2.0)}});
  const SampledChoiceRule blank =
      sampled_choice_rule(FiniteDistribution({"a1", "a2"}, {0.5, 0.5}), kEvenPrior, flat);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t y = 0; y < 2; ++y)
      CHECK(blank.state_given_action[a][y] == doctest::Approx(kEvenPrior[y]).epsilon(1e-12));
}

TEST_CASE("hull membership of the candidate model") {
  const PayoffTable returns = counterexample_returns();
  const FiniteDistribution alpha({"a1", "a2"}, {5.0 / 12.0, 7.0 / 12.0});
  const SampledChoiceRule rule = sampled_choice_rule(alpha, kEvenPrior, returns);

  // The tilted prior is itself the first posterior.
  const HullCheck exact = check_regularity_2(kTiltedPrior, rule);
  CHECK(exact.holds);
  CHECK(exact.weights[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(exact.weights[1] == doctest::Approx(0.0).epsilon(1e-9));

  // Midpoint of the two posteriors.
  std::vector<double> mid(2);
  for (std::size_t y = 0; y < 2; ++y)
    mid[y] = 0.5 * (rule.state_given_action[0][y] + rule.state_given_action[1][y]);
  const HullCheck middle = check_regularity_2(FiniteDistribution({"y1", "y2"}, mid), rule);
  CHECK(middle.holds);
  CHECK(middle.weights[0] == doctest::Approx(0.5).epsilon(1e-9));

  // More extreme than both posteriors: outside the segment.
  const HullCheck outside =
      check_regularity_2(FiniteDistribution({"y1", "y2"}, {0.99, 0.01}), rule);
  CHECK_FALSE(outside.holds);
  CHECK_FALSE(outside.certificate.empty());
}

TEST_CASE("home-bias premium vanishes without complexity aversion") {
  HomeBiasInstance instance;
  instance.n_downside = 10;
  instance.delta = 0.3;
  instance.epsilon = 0.01;
  instance.lambda = 1.0;
  instance.mu = 0.0;
  const HomeBiasResult result = home_bias_premium(instance);
  CHECK(std::abs(result.premium) <= 1e-12);
  CHECK(result.v_domestic == doctest::Approx(result.v_foreign).epsilon(1e-12));
}

TEST_CASE("home-bias premium is positive once simplicity is priced") {
  HomeBiasInstance instance;
  instance.n_downside = 10;
  instance.delta = 0.3;
  instance.epsilon = 0.01;
  instance.lambda = 1.0;
  for (double mu = 0.1; mu < 0.95; mu += 0.1) {
    instance.mu = mu;
    CHECK(home_bias_premium(instance).premium > 0.0);
  }
}

TEST_CASE("extreme concentration approaches mu log N") {
  HomeBiasInstance instance;
  instance.delta = 0.99;
  instance.epsilon = 1e-8;
  instance.lambda = 1.0;
  instance.mu = 0.5;
  for (int n : {5, 10, 50}) {
    instance.n_downside = n;
    const double premium = home_bias_premium(instance).premium;
    CHECK(std::abs(premium - instance.mu * std::log(static_cast<double>(n))) <= 1e-3);
  }
}

TEST_CASE("concentrating the downside never lowers the premium") {
  HomeBiasInstance instance;
  instance.n_downside = 6;
  instance.delta = 0.4;
  instance.lambda = 1.0;
  instance.mu = 0.35;
  double previous = -1.0;
  for (double eps : {0.06, 0.03, 0.01, 0.003, 0.001, 1e-4, 1e-6}) {
    instance.epsilon = eps;
    const double premium = home_bias_premium(instance).premium;
    CHECK(premium >= previous - 1e-12);
    previous = premium;
  }
}

TEST_CASE("premium sign matches the power-sum comparison") {
  // v_d >= v_f exactly when the foreign downside power sum dominates; both
  // sides recomputed in plain linear arithmetic.
  HomeBiasInstance instance;
  instance.n_downside = 4;
  instance.delta = 0.4;
  instance.lambda = 1.0;
  for (double mu : {0.2, 0.5, 0.8}) {
    for (double eps : {0.05, 0.02, 0.005}) {
      instance.mu = mu;
      instance.epsilon = eps;
      const HomeBiasResult r = home_bias_premium(instance);
      const double kappa = 1.0 / instance.lambda - mu;
      const double beta = 1.0 / (instance.lambda * kappa);
      const double head = std::exp(-1.0 / kappa) * std::pow(1.0 - instance.delta, beta);
      double z_d = head, z_f = head;
      for (int i = 0; i < instance.n_downside; ++i) {
        z_d += std::pow(instance.delta / instance.n_downside, beta);
        z_f += std::pow(i == 0 ? instance.delta - 3 * eps : eps, beta);
      }
      CHECK((r.premium > 0.0) == (z_f > z_d));
      CHECK(r.premium == doctest::Approx(kappa * std::log(z_f / z_d)).epsilon(1e-10));
    }
  }
}

TEST_CASE("home-bias instance validation") {
  HomeBiasInstance bad;
  bad.n_downside = 1;
  CHECK_THROWS_AS((void)home_bias_premium(bad), PreconditionError);
  bad.n_downside = 4;
  bad.delta = 0.2;
  bad.epsilon = 0.2;  // >= delta / N
  CHECK_THROWS_AS((void)home_bias_premium(bad), PreconditionError);
  bad.epsilon = 0.01;
  bad.mu = 2.0;  // >= 1/lambda
  CHECK_THROWS_AS((void)home_bias_premium(bad), PreconditionError);
}
