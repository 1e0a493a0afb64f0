#include "robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace erc {

namespace {

constexpr double kArgmaxTol = 1e-10;

void require_same_shape(std::span<const double> u_row, const FiniteDistribution& q) {
  if (u_row.size() != q.size())
    throw ConfigError("robust: payoff row and model have different lengths");
}

double direct_objective(std::span<const double> u_row, const FiniteDistribution& q,
                        const FiniteDistribution& p, double lambda, double mu) {
  double e_u = 0.0;
  for (std::size_t y = 0; y < p.size(); ++y) e_u += p[y] * u_row[y];
  const double r = relative_entropy(p, q);
  return e_u + r / lambda + mu * shannon_entropy(p);
}

}  // namespace

RobustParams RobustParams::make(double lambda, double mu) {
  if (!std::isfinite(lambda) || !std::isfinite(mu))
    throw ConfigError("RobustParams: lambda and mu must be finite");
  if (lambda < 0.0) throw ConfigError("RobustParams: lambda must be nonnegative");
  RobustParams p;
  p.lambda = lambda;
  p.mu = mu;
  if (lambda == 0.0) {
    p.regime = Regime::BayesLimit;
    p.kappa = std::numeric_limits<double>::infinity();
    p.beta = 1.0;
    return p;
  }
  p.kappa = 1.0 / lambda - mu;
  p.regime = p.kappa > 0.0 ? Regime::Interior : Regime::Corner;
  // 1/(1 - lambda*mu), written through kappa so that kappa*beta = 1/lambda
  // holds to rounding even when kappa is tiny.
  p.beta = p.kappa == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / (lambda * p.kappa);
  return p;
}

WorstCaseResult worst_case(std::span<const double> u_row, const FiniteDistribution& q,
                           const RobustParams& params) {
  require_same_shape(u_row, q);
  if (params.regime != Regime::Interior)
    throw PreconditionError("worst_case: interior regime required (mu < 1/lambda)");
  if (!q.full_support())
    throw PreconditionError("worst_case: model must have full support");

  const std::size_t n = q.size();
  std::vector<double> log_w(n);
  for (std::size_t y = 0; y < n; ++y)
    log_w[y] = -u_row[y] / params.kappa + params.beta * std::log(q[y]);
  // Normalize against the shifted weights directly: at extreme beta the raw
  // log-weights are huge and exp(log_w - log_z) would lose the cancellation.
  const double shift = *std::max_element(log_w.begin(), log_w.end());
  std::vector<double> probs(n);
  double total = 0.0;
  for (std::size_t y = 0; y < n; ++y) {
    probs[y] = std::exp(log_w[y] - shift);
    total += probs[y];
  }
  for (double& p : probs) p /= total;
  const double log_z = shift + std::log(total);
  FiniteDistribution distortion(q.labels(), std::move(probs));

  WorstCaseResult result{std::move(distortion), -params.kappa * log_z, 0.0, 0.0};
  result.entropy = shannon_entropy(result.distortion);
  result.kl_to_model = relative_entropy(result.distortion, q);

  const double direct = direct_objective(u_row, q, result.distortion, params.lambda, params.mu);
  const double scale = std::max({1.0, std::abs(result.value), std::abs(direct)});
  // The identity -kappa log Z loses |shift| * kappa * eps to cancellation when
  // kappa is huge (lambda near zero); allow exactly that much extra slack.
  const double tol = 1e-8 * scale + 1e-13 * params.kappa * std::max(1.0, std::abs(shift));
  if (std::abs(direct - result.value) > tol)
    throw InternalError("worst_case: normalizer identity and direct objective disagree");
  return result;
}

WorstCaseResult worst_case_corner(std::span<const double> u_row, const FiniteDistribution& q,
                                  double lambda) {
  require_same_shape(u_row, q);
  if (lambda <= 0.0) throw PreconditionError("worst_case_corner: lambda must be positive");
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_y = 0;
  for (std::size_t y = 0; y < q.size(); ++y) {
    if (q[y] <= 0.0) continue;
    const double candidate = u_row[y] + std::log(1.0 / q[y]) / lambda;
    if (candidate < best) {  // strict improvement keeps the lowest index on ties
      best = candidate;
      best_y = y;
    }
  }
  WorstCaseResult result{FiniteDistribution::point_mass(q.labels(), best_y), best, 0.0, 0.0};
  result.kl_to_model = std::log(1.0 / q[best_y]);
  return result;
}

double posterior_value(const PayoffTable& payoffs, std::size_t action,
                       const std::vector<StructuredModel>& models, const FiniteDistribution& pi,
                       const RobustParams& params) {
  if (models.size() != pi.size())
    throw ConfigError("posterior_value: posterior length does not match model count");
  if (action >= payoffs.n_actions()) throw ConfigError("posterior_value: action out of range");
  const auto u_row = payoffs.row(action);
  double total = 0.0;
  for (std::size_t k = 0; k < models.size(); ++k) {
    if (pi[k] == 0.0) continue;
    const FiniteDistribution& q_a = models[k].row(action);
    double v = 0.0;
    switch (params.regime) {
      case Regime::Interior:
        v = worst_case(u_row, q_a, params).value;
        break;
      case Regime::Corner:
        v = worst_case_corner(u_row, q_a, params.lambda).value;
        break;
      case Regime::BayesLimit: {
        double e_u = 0.0;
        for (std::size_t y = 0; y < q_a.size(); ++y) e_u += q_a[y] * u_row[y];
        v = e_u + params.mu * shannon_entropy(q_a);
        break;
      }
    }
    total += pi[k] * v;
  }
  return total;
}

BestReply best_reply(const PayoffTable& payoffs, const std::vector<StructuredModel>& models,
                     const FiniteDistribution& pi, const RobustParams& params) {
  BestReply reply;
  reply.values.resize(payoffs.n_actions());
  for (std::size_t a = 0; a < payoffs.n_actions(); ++a)
    reply.values[a] = posterior_value(payoffs, a, models, pi, params);
  const double best = *std::max_element(reply.values.begin(), reply.values.end());
  for (std::size_t a = 0; a < reply.values.size(); ++a)
    if (reply.values[a] >= best - kArgmaxTol) reply.argmax.push_back(a);
  reply.chosen = reply.argmax.front();
  return reply;
}

EnvelopeDerivatives envelope_derivatives(std::span<const double> u_row,
                                         const FiniteDistribution& q,
                                         const RobustParams& params) {
  const WorstCaseResult wc = worst_case(u_row, q, params);
  return EnvelopeDerivatives{wc.entropy, -wc.kl_to_model / (params.lambda * params.lambda)};
}

EscortModel escort_transform(const FiniteDistribution& q, double beta) {
  if (!std::isfinite(beta)) throw PreconditionError("escort_transform: beta must be finite");
  const std::size_t n = q.size();
  std::vector<double> log_w(n, -std::numeric_limits<double>::infinity());
  for (std::size_t y = 0; y < n; ++y)
    if (q[y] > 0.0) log_w[y] = beta * std::log(q[y]);
  const double shift = *std::max_element(log_w.begin(), log_w.end());
  std::vector<double> probs(n, 0.0);
  double total = 0.0;
  for (std::size_t y = 0; y < n; ++y) {
    if (q[y] <= 0.0) continue;
    probs[y] = std::exp(log_w[y] - shift);
    total += probs[y];
  }
  for (double& p : probs) p /= total;
  return EscortModel{q, FiniteDistribution(q.labels(), std::move(probs)), beta,
                     shift + std::log(total)};
}

double arc_equivalence_check(std::span<const double> u_row, const FiniteDistribution& q,
                             const RobustParams& params) {
  if (params.regime != Regime::Interior)
    throw PreconditionError("arc_equivalence_check: interior regime required");
  const double lhs = worst_case(u_row, q, params).value;

  const EscortModel escort = escort_transform(q, params.beta);
  // Multiplier evaluation against the escort: penalty weight kappa means
  // lambda_arc = 1/kappa and mu = 0.
  const RobustParams arc = RobustParams::make(1.0 / params.kappa, 0.0);
  const double rhs = -params.kappa * escort.log_norm + worst_case(u_row, escort.escort, arc).value;
  return std::abs(lhs - rhs);
}

bool payoff_affine_in_log_model(std::span<const double> u_row, const FiniteDistribution& q,
                                double tol) {
  if (!q.full_support())
    throw PreconditionError("payoff_affine_in_log_model: model must have full support");
  const std::size_t n = q.size();
  double u_mean = 0.0, l_mean = 0.0;
  std::vector<double> lq(n);
  for (std::size_t y = 0; y < n; ++y) {
    lq[y] = std::log(q[y]);
    u_mean += u_row[y];
    l_mean += lq[y];
  }
  u_mean /= static_cast<double>(n);
  l_mean /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t y = 0; y < n; ++y) {
    num += (u_row[y] - u_mean) * (lq[y] - l_mean);
    den += (lq[y] - l_mean) * (lq[y] - l_mean);
  }
  const double slope = den > 0.0 ? num / den : 0.0;
  double max_resid = 0.0;
  for (std::size_t y = 0; y < n; ++y)
    max_resid = std::max(max_resid,
                         std::abs((u_row[y] - u_mean) - slope * (lq[y] - l_mean)));
  return max_resid <= tol;
}

EntropyMuProfile entropy_mu_profile(std::span<const double> u_row, const FiniteDistribution& q,
                                    double lambda, std::span<const double> mu_grid) {
  if (mu_grid.empty()) throw PreconditionError("entropy_mu_profile: empty mu grid");
  EntropyMuProfile profile;
  profile.mu_grid.assign(mu_grid.begin(), mu_grid.end());
  profile.entropies.reserve(mu_grid.size());
  for (double mu : mu_grid) {
    const RobustParams params = RobustParams::make(lambda, mu);
    if (params.regime != Regime::Interior)
      throw PreconditionError("entropy_mu_profile: every grid point must satisfy mu < 1/lambda");
    profile.entropies.push_back(worst_case(u_row, q, params).entropy);
  }
  profile.nondegenerate = !payoff_affine_in_log_model(u_row, q);
  profile.min_step_drop = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < profile.entropies.size(); ++k)
    profile.min_step_drop = std::min(profile.min_step_drop,
                                     profile.entropies[k] - profile.entropies[k + 1]);
  if (profile.entropies.size() < 2) profile.min_step_drop = 0.0;
  profile.strictly_decreasing = profile.entropies.size() >= 2 && profile.min_step_drop > 0.0;
  return profile;
}

}  // namespace erc
