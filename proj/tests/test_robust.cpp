#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "robust.hpp"
#include "testutil.hpp"

using namespace erc;

namespace {

// Example instance reused throughout: binary risky payoff against a
// 70/30 model at unit concern.
const std::vector<double> kRiskyU{1.0, 0.0};
const FiniteDistribution kRiskyQ = FiniteDistribution::from_probs({0.7, 0.3});

}  // namespace

TEST_CASE("parameter regimes and derived constants") {
  const RobustParams interior = RobustParams::make(1.0, 0.4);
  CHECK(interior.regime == Regime::Interior);
  CHECK(interior.kappa == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(interior.beta == doctest::Approx(1.0 / 0.6).epsilon(1e-15));
  // kappa * beta = 1/lambda, the identity behind the escort re-writing.
  CHECK(std::abs(interior.kappa * interior.beta - 1.0 / interior.lambda) <= 1e-14);

  CHECK(RobustParams::make(2.0, 0.5).regime == Regime::Corner);
  CHECK(RobustParams::make(2.0, 0.6).regime == Regime::Corner);
  CHECK(RobustParams::make(0.0, 0.3).regime == Regime::BayesLimit);
  CHECK(RobustParams::make(1.0, -5.0).regime == Regime::Interior);

  Rng rng(17);
  for (int k = 0; k < 100; ++k) {
    const double lambda = rng.uniform(0.2, 2.0);
    const double mu = rng.uniform(-1.0, 1.0 / lambda - 1e-6);
    const RobustParams p = RobustParams::make(lambda, mu);
    REQUIRE(p.regime == Regime::Interior);
    CHECK(std::abs(p.kappa * p.beta * lambda - 1.0) <= 1e-14 * std::max(1.0, std::abs(p.beta)));
  }
}

TEST_CASE("worst case reproduces the published two-outcome distortions") {
  const WorstCaseResult at_zero = worst_case(kRiskyU, kRiskyQ, RobustParams::make(1.0, 0.0));
  CHECK(at_zero.distortion[0] == doctest::Approx(0.462).epsilon(1e-3));
  CHECK(at_zero.distortion[1] == doctest::Approx(0.538).epsilon(1e-3));

  const WorstCaseResult averse = worst_case(kRiskyU, kRiskyQ, RobustParams::make(1.0, 0.4));
  CHECK(averse.distortion[0] == doctest::Approx(0.437).epsilon(1e-3));

  const WorstCaseResult loving = worst_case(kRiskyU, kRiskyQ, RobustParams::make(1.0, -0.4));
  CHECK(loving.distortion[0] == doctest::Approx(0.473).epsilon(1e-3));

  // Exact closed form recomputed by hand for the mu = 0 point.
  const double w_g = 0.7 * std::exp(-1.0);
  CHECK(at_zero.distortion[0] == doctest::Approx(w_g / (w_g + 0.3)).epsilon(1e-12));
}

TEST_CASE("constant payoffs collapse the tilt to an escort") {
  const std::vector<double> flat{0.25, 0.25, 0.25};
  const FiniteDistribution q = FiniteDistribution::from_probs({0.5, 0.3, 0.2});
  const RobustParams params = RobustParams::make(1.25, 0.3);
  const WorstCaseResult wc = worst_case(flat, q, params);
  const EscortModel escort = escort_transform(q, params.beta);
  for (std::size_t y = 0; y < q.size(); ++y)
    CHECK(wc.distortion[y] == doctest::Approx(escort.escort[y]).epsilon(1e-12));
}

TEST_CASE("worst case value matches the brute-force simplex oracle") {
  Rng rng(23);
  for (int k = 0; k < 40; ++k) {
    const std::size_t n = 2 + k % 2;
    const auto u = testutil::random_payoffs(rng, n);
    const auto q_probs = testutil::random_simplex(rng, n);
    const FiniteDistribution q = FiniteDistribution::from_probs(q_probs);
    const double lambda = rng.uniform(0.2, 2.0);
    const double mu = rng.uniform(-1.0, 1.0 / lambda - 1e-3);
    const RobustParams params = RobustParams::make(lambda, mu);
    const WorstCaseResult wc = worst_case(u, q, params);

    const auto objective = [&](std::span<const double> p) {
      return testutil::penalized_objective(p, u, q_probs, lambda, mu);
    };
    const auto brute = oracle::minimize_on_simplex(n, objective, 1e-3);
    CHECK(std::abs(wc.value - brute.value) <= 1e-6);
    double l1 = 0.0;
    for (std::size_t y = 0; y < n; ++y) l1 += std::abs(wc.distortion[y] - brute.argmin[y]);
    CHECK(l1 <= 1e-3);
  }
}

TEST_CASE("worst case rejects wrong regimes and degenerate models") {
  CHECK_THROWS_AS((void)worst_case(kRiskyU, kRiskyQ, RobustParams::make(1.0, 1.5)),
                  PreconditionError);
  CHECK_THROWS_AS((void)worst_case(kRiskyU, kRiskyQ, RobustParams::make(0.0, 0.0)),
                  PreconditionError);
  const FiniteDistribution degenerate = FiniteDistribution::from_probs({1.0, 0.0});
  CHECK_THROWS_AS((void)worst_case(kRiskyU, degenerate, RobustParams::make(1.0, 0.0)),
                  PreconditionError);
}

TEST_CASE("corner evaluation enumerates the supported outcomes") {
  const FiniteDistribution uniform = FiniteDistribution::from_probs({0.5, 0.5});
  const WorstCaseResult wc = worst_case_corner(kRiskyU, uniform, 1.0);
  CHECK(wc.value == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(wc.distortion[1] == 1.0);

  // All outcomes tie on a flat payoff: lowest index wins.
  const std::vector<double> flat{0.3, 0.3, 0.3};
  const FiniteDistribution u3 = FiniteDistribution::from_probs({1.0 / 3, 1.0 / 3, 1.0 / 3});
  const WorstCaseResult tie = worst_case_corner(flat, u3, 2.0);
  CHECK(tie.distortion[0] == 1.0);
  CHECK(tie.value == doctest::Approx(0.3 + std::log(3.0) / 2.0).epsilon(1e-14));

  const std::vector<double> skewed{0.0, 10.0};
  const FiniteDistribution q = FiniteDistribution::from_probs({0.99, 0.01});
  const WorstCaseResult sk = worst_case_corner(skewed, q, 0.1);
  const double direct = std::min(0.0 + 10.0 * std::log(1.0 / 0.99), 10.0 + 10.0 * std::log(100.0));
  CHECK(sk.value == doctest::Approx(direct).epsilon(1e-14));
  CHECK(sk.value == doctest::Approx(0.1005).epsilon(1e-3));
  CHECK(sk.distortion[0] == 1.0);
}

TEST_CASE("interior value approaches the corner value at the boundary") {
  Rng rng(31);
  for (int k = 0; k < 25; ++k) {
    const std::size_t n = 2 + k % 3;
    const auto u = testutil::random_payoffs(rng, n);
    const FiniteDistribution q = FiniteDistribution::from_probs(testutil::random_simplex(rng, n));
    const double lambda = rng.uniform(0.3, 2.0);
    const double near = worst_case(u, q, RobustParams::make(lambda, 1.0 / lambda - 1e-6)).value;
    const double corner = worst_case_corner(u, q, lambda).value;
    CHECK(std::abs(near - corner) <= 1e-3);
  }
}

TEST_CASE("posterior value dispatches per regime") {
  const PayoffTable payoffs({"r"}, {"g", "b"}, {{1.0, 0.0}});
  const StructuredModel q("q", {kRiskyQ});

  const FiniteDistribution degenerate({"q"}, {1.0});
  const double interior = posterior_value(payoffs, 0, {q}, degenerate, RobustParams::make(1.0, 0.0));
  CHECK(interior == doctest::Approx(worst_case(kRiskyU, kRiskyQ, RobustParams::make(1.0, 0.0)).value)
                        .epsilon(1e-15));

  // Bayes limit: expected utility plus the entropy-weighted model term.
  const double bayes = posterior_value(payoffs, 0, {q}, degenerate, RobustParams::make(0.0, 0.25));
  const double expected = 0.7 + 0.25 * shannon_entropy(kRiskyQ);
  CHECK(bayes == doctest::Approx(expected).epsilon(1e-14));

  // Two models average the two per-model values.
  const StructuredModel qh("qh", {FiniteDistribution::from_probs({0.7, 0.3})});
  const StructuredModel ql("ql", {FiniteDistribution::from_probs({0.3, 0.7})});
  const FiniteDistribution half({"qh", "ql"}, {0.5, 0.5});
  const RobustParams params = RobustParams::make(1.0, 0.0);
  const double avg = posterior_value(payoffs, 0, {qh, ql}, half, params);
  const double vh = worst_case(kRiskyU, qh.row(0), params).value;
  const double vl = worst_case(kRiskyU, ql.row(0), params).value;
  CHECK(avg == doctest::Approx(0.5 * (vh + vl)).epsilon(1e-14));
}

TEST_CASE("best reply ties break to the lowest index") {
  const PayoffTable payoffs({"a", "b"}, {"g", "bd"}, {{1.0, 0.0}, {1.0, 0.0}});
  const StructuredModel q("q", {kRiskyQ, kRiskyQ});
  const BestReply reply =
      best_reply(payoffs, {q}, FiniteDistribution({"q"}, {1.0}), RobustParams::make(1.0, 0.2));
  CHECK(reply.argmax.size() == 2);
  CHECK(reply.chosen == 0);

  const PayoffTable solo({"only"}, {"g", "bd"}, {{1.0, 0.0}});
  const StructuredModel q1("q", {kRiskyQ});
  const BestReply single =
      best_reply(solo, {q1}, FiniteDistribution({"q"}, {1.0}), RobustParams::make(1.0, 0.2));
  CHECK(single.chosen == 0);
  CHECK(single.argmax.size() == 1);
}

TEST_CASE("complexity aversion flips the running example toward safety") {
  // Safe arm pays u_bar against a uniform model; risky arm as above. With
  // two outcomes the risky distortion entropy sits barely below log 2, so
  // the flip window in u_bar is narrow; this value lies inside it: risky
  // wins at mu = 0, safe at mu = 0.4.
  const double u_bar = 0.583;
  const PayoffTable payoffs({"risky", "safe"}, {"g", "b"},
                            {{1.0, 0.0}, {u_bar, u_bar}});
  const StructuredModel q("q",
                          {kRiskyQ, FiniteDistribution::from_probs({0.5, 0.5})});
  const FiniteDistribution pi({"q"}, {1.0});
  const BestReply neutral = best_reply(payoffs, {q}, pi, RobustParams::make(1.0, 0.0));
  CHECK(neutral.chosen == 0);
  const BestReply averse = best_reply(payoffs, {q}, pi, RobustParams::make(1.0, 0.4));
  CHECK(averse.chosen == 1);

  // Crossover located by bisection must sit strictly between the endpoints.
  double lo = 0.0, hi = 0.4;
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const BestReply at_mid = best_reply(payoffs, {q}, pi, RobustParams::make(1.0, mid));
    if (at_mid.chosen == 0)
      lo = mid;
    else
      hi = mid;
  }
  CHECK(lo > 0.0);
  CHECK(hi < 0.4);
}

TEST_CASE("envelope derivatives match finite differences") {
  // Flat payoffs against a uniform model: entropy term is maximal and the
  // divergence term vanishes.
  const std::vector<double> flat{0.2, 0.2};
  const FiniteDistribution uniform = FiniteDistribution::from_probs({0.5, 0.5});
  const EnvelopeDerivatives flat_env =
      envelope_derivatives(flat, uniform, RobustParams::make(1.0, 0.2));
  CHECK(flat_env.dv_dmu == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(flat_env.dv_dlambda == doctest::Approx(0.0).epsilon(1e-12));

  const EnvelopeDerivatives ex =
      envelope_derivatives(kRiskyU, kRiskyQ, RobustParams::make(1.0, 0.0));
  CHECK(ex.dv_dmu == doctest::Approx(0.6903).epsilon(1e-3));

  Rng rng(41);
  for (int k = 0; k < 30; ++k) {
    const std::size_t n = 2 + k % 3;
    const auto u = testutil::random_payoffs(rng, n);
    const FiniteDistribution q = FiniteDistribution::from_probs(testutil::random_simplex(rng, n));
    const double lambda = rng.uniform(0.3, 1.8);
    const double mu = rng.uniform(-0.8, 1.0 / lambda - 1e-2);
    const EnvelopeDerivatives env = envelope_derivatives(u, q, RobustParams::make(lambda, mu));
    const double fd_mu = oracle::central_diff(
        [&](double m) { return worst_case(u, q, RobustParams::make(lambda, m)).value; }, mu);
    const double fd_lambda = oracle::central_diff(
        [&](double l) { return worst_case(u, q, RobustParams::make(l, mu)).value; }, lambda);
    CHECK(std::abs(env.dv_dmu - fd_mu) <= 1e-6 * std::max(1.0, std::abs(fd_mu)));
    CHECK(std::abs(env.dv_dlambda - fd_lambda) <= 1e-6 * std::max(1.0, std::abs(fd_lambda)));
  }
}

TEST_CASE("escort transform") {
  const FiniteDistribution q = FiniteDistribution::from_probs({0.7, 0.3});
  const EscortModel identity = escort_transform(q, 1.0);
  CHECK(identity.escort[0] == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(identity.log_norm == doctest::Approx(0.0).epsilon(1e-14));

  const EscortModel flat = escort_transform(FiniteDistribution::from_probs({0.2, 0.5, 0.3}), 0.0);
  for (std::size_t y = 0; y < 3; ++y)
    CHECK(flat.escort[y] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(flat.log_norm == doctest::Approx(std::log(3.0)).epsilon(1e-14));

  const EscortModel powered = escort_transform(q, 5.0 / 3.0);
  const double w0 = std::pow(0.7, 5.0 / 3.0), w1 = std::pow(0.3, 5.0 / 3.0);
  CHECK(powered.escort[0] == doctest::Approx(w0 / (w0 + w1)).epsilon(1e-12));
  CHECK(powered.escort[0] == doctest::Approx(0.8041).epsilon(1e-4));

  // Support preservation with a zero entry.
  const EscortModel partial = escort_transform(FiniteDistribution::from_probs({0.6, 0.0, 0.4}), 2.0);
  CHECK(partial.escort[1] == 0.0);
  CHECK(partial.escort[0] > 0.0);
}

TEST_CASE("escort re-representation has vanishing residual") {
  CHECK(arc_equivalence_check(kRiskyU, kRiskyQ, RobustParams::make(1.0, 0.0)) <= 1e-14);
  CHECK(arc_equivalence_check(kRiskyU, kRiskyQ, RobustParams::make(1.0, 0.4)) <= 1e-10);

  Rng rng(53);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto u = testutil::random_payoffs(rng, 4);
    const FiniteDistribution q = FiniteDistribution::from_probs(testutil::random_simplex(rng, 4));
    const double lambda = rng.uniform(0.2, 2.0);
    const double mu = rng.uniform(-1.0, 1.0 / lambda - 1e-2);
    worst = std::max(worst, arc_equivalence_check(u, q, RobustParams::make(lambda, mu)));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("distortion entropy falls as complexity aversion rises") {
  // The two-outcome running instance: any binary payoff row is affine in
  // log q, so the conservative degeneracy flag stays off, yet the entropy
  // still falls strictly because the tilt-likelihood map is nonconstant.
  std::vector<double> grid;
  for (double mu = -0.4; mu <= 0.4 + 1e-12; mu += 0.01) grid.push_back(mu);
  const EntropyMuProfile binary = entropy_mu_profile(kRiskyU, kRiskyQ, 1.0, grid);
  CHECK_FALSE(binary.nondegenerate);
  CHECK(binary.min_step_drop > 1e-12);

  // Three outcomes: generic instances clear the flag and decrease strictly.
  const std::vector<double> u3{0.9, 0.1, -0.5};
  const FiniteDistribution q3 = FiniteDistribution::from_probs({0.5, 0.3, 0.2});
  const EntropyMuProfile generic = entropy_mu_profile(u3, q3, 1.0, grid);
  CHECK(generic.nondegenerate);
  CHECK(generic.strictly_decreasing);
  CHECK(generic.min_step_drop > 1e-12);

  // Knife edge: payoffs affine in log-probabilities with slope 1/lambda make
  // the distortion family constant in mu.
  const double lambda = 1.0 / 3.0;
  std::vector<double> affine(3);
  for (std::size_t y = 0; y < 3; ++y) affine[y] = 2.0 + 3.0 * std::log(q3[y]);
  std::vector<double> small_grid;
  for (double mu = -0.5; mu <= 2.0; mu += 0.25) small_grid.push_back(mu);
  const EntropyMuProfile flat = entropy_mu_profile(affine, q3, lambda, small_grid);
  CHECK_FALSE(flat.nondegenerate);
  for (double h : flat.entropies)
    CHECK(h == doctest::Approx(flat.entropies.front()).epsilon(1e-12));
}

TEST_CASE("values and distortions are stable under tiny perturbations") {
  Rng rng(61);
  for (int k = 0; k < 20; ++k) {
    const auto u = testutil::random_payoffs(rng, 3);
    auto q_probs = testutil::random_simplex(rng, 3);
    const double lambda = rng.uniform(0.3, 1.5);
    const double mu = rng.uniform(-0.5, 1.0 / lambda - 0.05);
    const WorstCaseResult base =
        worst_case(u, FiniteDistribution::from_probs(q_probs), RobustParams::make(lambda, mu));
    auto q2 = q_probs;
    q2[0] += 1e-8;
    q2[1] -= 1e-8;
    const WorstCaseResult moved = worst_case(
        u, FiniteDistribution::from_probs(q2), RobustParams::make(lambda + 1e-8, mu - 1e-8));
    CHECK(std::abs(base.value - moved.value) <= 1e-6);
    for (std::size_t y = 0; y < 3; ++y)
      CHECK(std::abs(base.distortion[y] - moved.distortion[y]) <= 1e-6);
  }
}

TEST_CASE("feasibility upper bound of the value") {
  Rng rng(71);
  for (int k = 0; k < 50; ++k) {
    const std::size_t n = 2 + k % 3;
    const auto u = testutil::random_payoffs(rng, n);
    const auto q_probs = testutil::random_simplex(rng, n);
    const FiniteDistribution q = FiniteDistribution::from_probs(q_probs);
    const double lambda = rng.uniform(0.2, 2.0);
    const double mu = rng.uniform(-1.0, 1.0 / lambda - 1e-3);
    double e_u = 0.0;
    for (std::size_t y = 0; y < n; ++y) e_u += q_probs[y] * u[y];
    const double bound = e_u + mu * shannon_entropy(q);
    CHECK(worst_case(u, q, RobustParams::make(lambda, mu)).value <= bound + 1e-12);
  }
}
