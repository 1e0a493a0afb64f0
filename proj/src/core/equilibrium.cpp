#include "equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "info.hpp"

namespace erc {

namespace {

constexpr double kFitTol = 1e-10;
constexpr double kVerifyTol = 1e-8;
constexpr double kSupportTol = 1e-12;

std::vector<std::string> model_names(const std::vector<StructuredModel>& models) {
  std::vector<std::string> names;
  names.reserve(models.size());
  for (const auto& m : models) names.push_back(m.name());
  return names;
}

double misfit_at(const std::vector<StructuredModel>& models, std::size_t k,
                 const FiniteDistribution& alpha, const StructuredModel& true_dgp) {
  return model_misfit(models[k], alpha, true_dgp);
}

// Enumerates alpha vectors on a simplex grid with K subdivisions.
void enumerate_grid(std::size_t n, int K, std::vector<double>& scratch,
                    const std::function<void(const std::vector<double>&)>& visit, int remaining,
                    std::size_t index) {
  if (index + 1 == n) {
    scratch[index] = static_cast<double>(remaining) / K;
    visit(scratch);
    return;
  }
  for (int take = 0; take <= remaining; ++take) {
    scratch[index] = static_cast<double>(take) / K;
    enumerate_grid(n, K, scratch, visit, remaining - take, index + 1);
  }
}

}  // namespace

double model_misfit(const StructuredModel& q, const FiniteDistribution& alpha,
                    const StructuredModel& true_dgp) {
  if (alpha.size() != q.n_actions())
    throw ConfigError("model_misfit: mixed action length does not match model actions");
  double total = 0.0;
  for (std::size_t a = 0; a < alpha.size(); ++a) {
    if (alpha[a] == 0.0) continue;
    total += alpha[a] * relative_entropy(true_dgp.row(a), q.row(a));
  }
  return total;
}

std::vector<std::size_t> best_fit_set(const std::vector<StructuredModel>& models,
                                      const FiniteDistribution& alpha,
                                      const StructuredModel& true_dgp) {
  std::vector<double> misfits(models.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < models.size(); ++k) {
    misfits[k] = misfit_at(models, k, alpha, true_dgp);
    best = std::min(best, misfits[k]);
  }
  std::vector<std::size_t> fit;
  for (std::size_t k = 0; k < models.size(); ++k)
    if (misfits[k] <= best + kFitTol) fit.push_back(k);
  return fit;
}

double value_difference(const PayoffTable& payoffs, const std::vector<StructuredModel>& models,
                        double lambda, double mu_bar, const FiniteDistribution& pi,
                        std::size_t action_i, std::size_t action_j) {
  if (mu_bar * lambda * lambda >= 1.0 && lambda > 0.0)
    throw PreconditionError("value_difference: mu_bar * lambda^2 must stay below 1");
  const RobustParams params = RobustParams::make(lambda, mu_bar * lambda);
  return posterior_value(payoffs, action_i, models, pi, params) -
         posterior_value(payoffs, action_j, models, pi, params);
}

double entropy_gap(const PayoffTable& payoffs, const std::vector<StructuredModel>& models,
                   double lambda, double mu_bar, const FiniteDistribution& pi,
                   std::size_t action_i, std::size_t action_j) {
  if (lambda <= 0.0) throw PreconditionError("entropy_gap: lambda must be positive");
  if (mu_bar * lambda * lambda >= 1.0)
    throw PreconditionError("entropy_gap: mu_bar * lambda^2 must stay below 1");
  const RobustParams params = RobustParams::make(lambda, mu_bar * lambda);
  auto average_entropy = [&](std::size_t action) {
    double h = 0.0;
    for (std::size_t k = 0; k < models.size(); ++k) {
      if (pi[k] == 0.0) continue;
      h += pi[k] * worst_case(payoffs.row(action), models[k].row(action), params).entropy;
    }
    return h;
  };
  return average_entropy(action_i) - average_entropy(action_j);
}

TripleResiduals verify_equilibrium(const PayoffTable& payoffs,
                                   const std::vector<StructuredModel>& models,
                                   const StructuredModel& true_dgp, double c, double mu_bar,
                                   const FiniteDistribution& alpha, const FiniteDistribution& eta,
                                   double tau) {
  TripleResiduals res;
  double min_misfit = std::numeric_limits<double>::infinity();
  std::vector<double> misfits(models.size());
  for (std::size_t k = 0; k < models.size(); ++k) {
    misfits[k] = misfit_at(models, k, alpha, true_dgp);
    min_misfit = std::min(min_misfit, misfits[k]);
  }
  for (std::size_t k = 0; k < models.size(); ++k)
    if (eta[k] > kSupportTol) res.fit = std::max(res.fit, misfits[k] - min_misfit);

  res.tau = std::abs(tau - min_misfit / c);

  const RobustParams params = RobustParams::make(tau, mu_bar * tau);
  const BestReply reply = best_reply(payoffs, models, eta, params);
  const double best = reply.values[reply.chosen];
  for (std::size_t a = 0; a < alpha.size(); ++a)
    if (alpha[a] > kSupportTol)
      res.best_reply = std::max(res.best_reply, best - reply.values[a]);
  return res;
}

namespace {

// Candidate beliefs supported on the best-fit set: uniform, each vertex, and
// for exactly two best-fit models the mix that makes two supported actions
// indifferent (found by bisection).
std::vector<FiniteDistribution> eta_candidates(const std::vector<StructuredModel>& models,
                                               const std::vector<std::size_t>& fit,
                                               const PayoffTable& payoffs, double tau,
                                               double mu_bar,
                                               const std::vector<std::size_t>& supported) {
  const auto names = model_names(models);
  std::vector<FiniteDistribution> candidates;
  std::vector<double> uniform(models.size(), 0.0);
  for (std::size_t k : fit) uniform[k] = 1.0 / static_cast<double>(fit.size());
  candidates.emplace_back(names, uniform);
  if (fit.size() > 1) {
    for (std::size_t k : fit) {
      std::vector<double> vertex(models.size(), 0.0);
      vertex[k] = 1.0;
      candidates.emplace_back(names, vertex);
    }
  }
  if (fit.size() == 2 && supported.size() >= 2) {
    const RobustParams params = RobustParams::make(tau, mu_bar * tau);
    auto delta_at = [&](double w) {
      std::vector<double> probs(models.size(), 0.0);
      probs[fit[0]] = w;
      probs[fit[1]] = 1.0 - w;
      FiniteDistribution eta(names, probs);
      return posterior_value(payoffs, supported[0], models, eta, params) -
             posterior_value(payoffs, supported[1], models, eta, params);
    };
    double lo = 0.0, hi = 1.0;
    double f_lo = delta_at(lo), f_hi = delta_at(hi);
    if (f_lo * f_hi < 0.0) {
      for (int iter = 0; iter < 80; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = delta_at(mid);
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
          lo = mid;
          f_lo = f_mid;
        } else {
          hi = mid;
        }
      }
      std::vector<double> probs(models.size(), 0.0);
      probs[fit[0]] = 0.5 * (lo + hi);
      probs[fit[1]] = 1.0 - probs[fit[0]];
      candidates.emplace_back(names, probs);
    }
  }
  return candidates;
}

}  // namespace

std::vector<EquilibriumTriple> find_mixed_equilibria(const PayoffTable& payoffs,
                                                     const std::vector<StructuredModel>& models,
                                                     const StructuredModel& true_dgp, double c,
                                                     double mu_bar, double grid_resolution) {
  if (payoffs.n_actions() < 2)
    throw PreconditionError("find_mixed_equilibria: at least two actions required");
  if (grid_resolution <= 0.0 || grid_resolution > 0.1)
    throw PreconditionError("find_mixed_equilibria: grid resolution must lie in (0, 0.1]");
  if (c <= 0.0) throw PreconditionError("find_mixed_equilibria: c must be positive");

  const std::size_t n = payoffs.n_actions();
  std::vector<EquilibriumTriple> found;

  auto consider = [&](const std::vector<double>& alpha_probs) {
    FiniteDistribution alpha(payoffs.actions(), alpha_probs);
    const auto fit = best_fit_set(models, alpha, true_dgp);
    const double tau = misfit_at(models, fit.front(), alpha, true_dgp) / c;
    std::vector<std::size_t> supported;
    for (std::size_t a = 0; a < n; ++a)
      if (alpha_probs[a] > kSupportTol) supported.push_back(a);
    for (const auto& eta : eta_candidates(models, fit, payoffs, tau, mu_bar, supported)) {
      const TripleResiduals res =
          verify_equilibrium(payoffs, models, true_dgp, c, mu_bar, alpha, eta, tau);
      if (res.best_reply < kVerifyTol && res.fit < kFitTol && res.tau < kVerifyTol) {
        // Deduplicate against earlier finds.
        bool duplicate = false;
        for (const auto& triple : found) {
          double dist = 0.0;
          for (std::size_t a = 0; a < n; ++a) dist += std::abs(triple.alpha[a] - alpha[a]);
          for (std::size_t k = 0; k < models.size(); ++k)
            dist += std::abs(triple.eta[k] - eta[k]);
          if (dist < 1e-6) duplicate = true;
        }
        if (!duplicate) found.push_back(EquilibriumTriple{alpha, eta, tau, res});
      }
    }
  };

  const int K = std::max(2, static_cast<int>(std::lround(1.0 / grid_resolution)));
  std::vector<double> scratch(n, 0.0);
  enumerate_grid(n, K, scratch, consider, K, 0);

  // Edge refinement: for every pair of actions, bisect the indifference of
  // the pair along the alpha edge that mixes only those two, under each
  // belief-candidate rule, and re-verify the refined point.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      auto alpha_at = [&](double w) {
        std::vector<double> probs(n, 0.0);
        probs[i] = w;
        probs[j] = 1.0 - w;
        return probs;
      };
      // The belief rule index selects which candidate belief is tracked
      // while bisecting; rules whose candidate vanishes fall out naturally.
      for (int rule = 0; rule < 4; ++rule) {
        auto delta_for = [&](double w) -> std::optional<double> {
          const auto probs = alpha_at(w);
          FiniteDistribution alpha(payoffs.actions(), probs);
          const auto fit = best_fit_set(models, alpha, true_dgp);
          const double tau = misfit_at(models, fit.front(), alpha, true_dgp) / c;
          std::vector<std::size_t> supported{i, j};
          const auto candidates = eta_candidates(models, fit, payoffs, tau, mu_bar, supported);
          if (rule >= static_cast<int>(candidates.size())) return std::nullopt;
          const RobustParams params = RobustParams::make(tau, mu_bar * tau);
          return posterior_value(payoffs, i, models, candidates[rule], params) -
                 posterior_value(payoffs, j, models, candidates[rule], params);
        };
        const int kProbe = 64;
        std::optional<double> prev = delta_for(0.0);
        for (int step = 1; step <= kProbe; ++step) {
          const double w = static_cast<double>(step) / kProbe;
          std::optional<double> cur = delta_for(w);
          if (prev && cur && *prev * *cur < 0.0) {
            double lo = static_cast<double>(step - 1) / kProbe, hi = w;
            double f_lo = *prev;
            for (int iter = 0; iter < 80; ++iter) {
              const double mid = 0.5 * (lo + hi);
              const auto f_mid = delta_for(mid);
              if (!f_mid) break;
              if ((*f_mid < 0.0) == (f_lo < 0.0)) {
                lo = mid;
                f_lo = *f_mid;
              } else {
                hi = mid;
              }
            }
            consider(alpha_at(0.5 * (lo + hi)));
          }
          prev = cur;
        }
      }
    }
  }

  return found;
}

double belief_threshold(const PayoffTable& payoffs, const StructuredModel& optimistic,
                        const StructuredModel& pessimistic, double lambda, double mu_bar,
                        std::size_t risky_action, std::size_t safe_action) {
  const std::vector<StructuredModel> models{optimistic, pessimistic};
  auto delta_at = [&](double theta) {
    FiniteDistribution pi({optimistic.name(), pessimistic.name()}, {theta, 1.0 - theta});
    return value_difference(payoffs, models, lambda, mu_bar, pi, risky_action, safe_action);
  };
  const double at_zero = delta_at(0.0);
  const double at_one = delta_at(1.0);
  if (!(at_zero < 0.0 && at_one > 0.0))
    throw PreconditionError("belief_threshold: sign condition fails; endpoint values " +
                            std::to_string(at_zero) + " and " + std::to_string(at_one));
  double prev = at_zero;
  for (int k = 1; k <= 10; ++k) {
    const double cur = delta_at(static_cast<double>(k) / 10.0);
    if (cur < prev)
      throw PreconditionError("belief_threshold: value difference is not increasing in theta");
    prev = cur;
  }
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (delta_at(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

std::vector<FiniteDistribution> belief_grid(const std::vector<StructuredModel>& models,
                                            double resolution) {
  const auto names = model_names(models);
  std::vector<FiniteDistribution> grid;
  if (models.size() == 1) {
    grid.emplace_back(names, std::vector<double>{1.0});
    return grid;
  }
  const int K = std::max(1, static_cast<int>(std::lround(1.0 / resolution)));
  std::vector<double> scratch(models.size(), 0.0);
  enumerate_grid(models.size(), K, scratch,
                 [&](const std::vector<double>& probs) { grid.emplace_back(names, probs); }, K, 0);
  return grid;
}

}  // namespace

EliminationResult elimination_threshold(const PayoffTable& payoffs,
                                        const std::vector<StructuredModel>& models,
                                        std::size_t action_i, std::size_t action_j,
                                        double lambda_lo, double lambda_hi, double mubar0,
                                        const EliminationOptions& options) {
  if (lambda_lo <= 0.0 || lambda_hi < lambda_lo)
    throw PreconditionError("elimination_threshold: need 0 < lambda_lo <= lambda_hi");
  if (mubar0 < 0.0) throw PreconditionError("elimination_threshold: mubar0 must be nonnegative");
  EliminationResult result;
  if (action_i == action_j) {
    result.diagnostics = "identical actions have a zero entropy gap";
    return result;
  }
  const double mubar_max = (1.0 - 1e-9) / (lambda_hi * lambda_hi);
  if (mubar0 >= mubar_max) {
    result.diagnostics = "mubar0 leaves no admissible complexity range";
    return result;
  }

  const auto beliefs = belief_grid(models, options.pi_resolution);
  std::vector<double> lambdas(options.lambda_steps);
  for (int s = 0; s < options.lambda_steps; ++s)
    lambdas[s] = options.lambda_steps == 1
                     ? lambda_lo
                     : lambda_lo + (lambda_hi - lambda_lo) * s / (options.lambda_steps - 1);
  std::vector<double> mubars(options.mubar_steps);
  for (int s = 0; s < options.mubar_steps; ++s)
    mubars[s] = options.mubar_steps == 1
                    ? mubar0
                    : mubar0 + (mubar_max - mubar0) * s / (options.mubar_steps - 1);

  double min_gap = std::numeric_limits<double>::infinity();
  for (double lambda : lambdas)
    for (double mubar : mubars)
      for (const auto& pi : beliefs)
        min_gap = std::min(min_gap,
                           -entropy_gap(payoffs, models, lambda, mubar, pi, action_i, action_j));
  result.entropy_gap_min = min_gap;
  if (min_gap <= 0.0) {
    result.diagnostics = "no uniform entropy dominance of the kept action";
    return result;
  }

  double max_adv = -std::numeric_limits<double>::infinity();
  for (double lambda : lambdas)
    for (const auto& pi : beliefs)
      max_adv = std::max(max_adv,
                         value_difference(payoffs, models, lambda, mubar0, pi, action_i, action_j));
  result.initial_advantage = max_adv;

  result.formula_threshold = mubar0 + std::max(0.0, max_adv) / (lambda_lo * min_gap);
  const bool condition = max_adv < lambda_lo * min_gap * (1.0 / (lambda_hi * lambda_hi) - mubar0);
  if (!condition) {
    result.diagnostics = "initial advantage too large for the sufficient bound";
    return result;
  }
  result.feasible = true;

  if (max_adv <= 0.0) {
    result.certified_threshold = mubar0;
    return result;
  }
  auto dominated_at = [&](double mubar) {
    for (double lambda : lambdas)
      for (const auto& pi : beliefs)
        if (value_difference(payoffs, models, lambda, mubar, pi, action_i, action_j) >= 0.0)
          return false;
    return true;
  };
  // First dominating grid level, then bisection against the last failing one;
  // the positive entropy gap makes the domination predicate monotone in mubar.
  double below = mubar0;
  for (double mubar : mubars) {
    if (dominated_at(mubar)) {
      double lo = below, hi = mubar;
      for (int iter = 0; iter < 60; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (dominated_at(mid))
          hi = mid;
        else
          lo = mid;
      }
      result.certified_threshold = hi;
      break;
    }
    below = mubar;
  }
  if (!result.certified_threshold)
    result.diagnostics = "no grid complexity level dominates everywhere";
  return result;
}

double chamberlain_entropy_bound(double p) {
  if (p <= 0.0 || p >= 1.0)
    throw PreconditionError("chamberlain_entropy_bound: p must lie in (0, 1)");
  return -p * std::log(p) - (1.0 - p) * std::log((1.0 - p) / 3.0);
}

ChamberlainReport chamberlain_gap_certificate(const ChamberlainParams& params) {
  if (!(0.0 < params.r_low && params.r_low < params.r_free && params.r_free < params.r_high))
    throw PreconditionError("chamberlain: returns must satisfy 0 < R_L < r_f < R_H");
  if (!(params.q_h > 0.5 && params.q_h < 1.0))
    throw PreconditionError("chamberlain: q_h must lie in (1/2, 1)");
  if (params.w0 <= 0.0) throw PreconditionError("chamberlain: initial wealth must be positive");
  if (params.lambda_lo <= 0.0 || params.lambda_hi < params.lambda_lo)
    throw PreconditionError("chamberlain: invalid lambda interval");
  if (params.gamma <= 0.0) throw PreconditionError("chamberlain: gamma must be positive");

  auto crra = [&](double w) {
    return params.gamma == 1.0 ? std::log(w)
                               : std::pow(w, 1.0 - params.gamma) / (1.0 - params.gamma);
  };

  ChamberlainReport report;
  const double log2 = std::log(2.0);
  const double hbar = chamberlain_entropy_bound(params.pbar);
  if (!(log2 > hbar))
    throw PreconditionError("chamberlain: pbar fails log 2 > Hbar(pbar)");
  report.h_star = log2 - hbar;

  // Return histories HH, HL, LH, LL under the symmetric exchangeable model.
  const std::vector<std::string> outcomes{"HH", "HL", "LH", "LL"};
  const std::vector<double> q_probs{params.q_h / 2.0, (1.0 - params.q_h) / 2.0,
                                    (1.0 - params.q_h) / 2.0, params.q_h / 2.0};
  const FiniteDistribution q(outcomes, q_probs);

  const double u_safe = crra(params.w0 * params.r_free * params.r_free);
  const std::vector<double> wealth{params.w0 * params.r_high * params.r_high,
                                   params.w0 * params.r_high * params.r_low,
                                   params.w0 * params.r_low * params.r_high,
                                   params.w0 * params.r_low * params.r_low};
  std::vector<double> u_risky(4), u_safe_row(4, u_safe);
  for (int y = 0; y < 4; ++y) u_risky[y] = crra(wealth[y]);

  report.delta_gap = crra(params.w0 * params.r_high * params.r_low) -
                     crra(params.w0 * params.r_low * params.r_low);
  report.kappa_bar =
      report.delta_gap / std::log(3.0 * params.pbar / (1.0 - params.pbar));
  report.mubar0 = (1.0 / params.lambda_lo - report.kappa_bar) / params.lambda_lo;

  if (report.mubar0 * params.lambda_hi * params.lambda_hi >= 1.0) {
    report.feasible = false;
    report.diagnostics = "mubar0 * lambda_hi^2 >= 1: no admissible complexity range";
    return report;
  }
  report.feasible = true;

  const double mubar_lo = std::max(0.0, report.mubar0);
  const double mubar_hi = (1.0 - 1e-9) / (params.lambda_hi * params.lambda_hi);
  report.min_gap = std::numeric_limits<double>::infinity();
  report.min_mass = std::numeric_limits<double>::infinity();
  report.min_h_safe = std::numeric_limits<double>::infinity();
  for (int ls = 0; ls < params.lambda_steps; ++ls) {
    const double lambda = params.lambda_steps == 1
                              ? params.lambda_lo
                              : params.lambda_lo + (params.lambda_hi - params.lambda_lo) * ls /
                                                       (params.lambda_steps - 1);
    for (int ms = 0; ms < params.mubar_steps; ++ms) {
      const double mubar = params.mubar_steps == 1
                               ? mubar_lo
                               : mubar_lo + (mubar_hi - mubar_lo) * ms / (params.mubar_steps - 1);
      const RobustParams rp = RobustParams::make(lambda, mubar * lambda);
      const WorstCaseResult risky = worst_case(u_risky, q, rp);
      const WorstCaseResult safe = worst_case(u_safe_row, q, rp);
      ChamberlainRow row;
      row.lambda = lambda;
      row.mu_bar = mubar;
      row.h_safe = safe.entropy;
      row.h_risky = risky.entropy;
      row.gap = safe.entropy - risky.entropy;
      row.mass_on_crash = risky.distortion[3];
      report.rows.push_back(row);
      report.min_gap = std::min(report.min_gap, row.gap);
      report.min_mass = std::min(report.min_mass, row.mass_on_crash);
      report.min_h_safe = std::min(report.min_h_safe, row.h_safe);
    }
  }
  return report;
}

}  // namespace erc
