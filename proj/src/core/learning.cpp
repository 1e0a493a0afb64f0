#include "learning.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "info.hpp"

namespace erc {

Environment::Environment(PayoffTable payoffs_, StructuredModel true_dgp_,
                         std::vector<StructuredModel> models_, FiniteDistribution prior_,
                         double c_, double mu_bar_, double lambda_cap_, double lambda0_)
    : payoffs(std::move(payoffs_)),
      true_dgp(std::move(true_dgp_)),
      models(std::move(models_)),
      prior(std::move(prior_)),
      c(c_),
      mu_bar(mu_bar_),
      lambda_cap(lambda_cap_),
      lambda0(lambda0_) {
  if (models.empty()) throw ConfigError("Environment: at least one candidate model required");
  for (const auto& m : models) m.check_against(payoffs);
  true_dgp.check_against(payoffs);
  if (prior.size() != models.size())
    throw ConfigError("Environment: prior length does not match model count");
  if (c <= 0.0) throw ConfigError("Environment: c must be positive");
  if (mu_bar < 0.0) throw ConfigError("Environment: mu_bar must be nonnegative");
  if (lambda_cap <= 0.0) throw ConfigError("Environment: lambda_cap must be positive");
  if (mu_bar * lambda_cap * lambda_cap >= 1.0)
    throw ConfigError("Environment: mu_bar * lambda_cap^2 must be below 1");
  if (lambda0 < 0.0 || lambda0 > lambda_cap)
    throw ConfigError("Environment: lambda0 must lie in [0, lambda_cap]");
}

void History::record(int action, int outcome) {
  steps.emplace_back(action, outcome);
  counts[action][outcome] += 1;
  t += 1;
}

FiniteDistribution AgentState::posterior(const std::vector<StructuredModel>& models) const {
  std::vector<std::string> labels;
  labels.reserve(models.size());
  for (const auto& m : models) labels.push_back(m.name());
  std::vector<double> probs(log_posterior.size());
  const double log_z = log_sum_exp(log_posterior);
  for (std::size_t k = 0; k < probs.size(); ++k) probs[k] = std::exp(log_posterior[k] - log_z);
  return FiniteDistribution(std::move(labels), std::move(probs));
}

FiniteDistribution update_posterior(const FiniteDistribution& pi, std::size_t action,
                                    std::size_t outcome,
                                    const std::vector<StructuredModel>& models) {
  if (pi.size() != models.size())
    throw ConfigError("update_posterior: posterior length does not match model count");
  std::vector<double> log_w(pi.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < pi.size(); ++k) {
    if (pi[k] <= 0.0) continue;
    log_w[k] = std::log(pi[k]) + std::log(models[k].row(action)[outcome]);
  }
  const double log_z = log_sum_exp(log_w);
  std::vector<double> probs(pi.size(), 0.0);
  for (std::size_t k = 0; k < pi.size(); ++k)
    if (pi[k] > 0.0) probs[k] = std::exp(log_w[k] - log_z);
  return FiniteDistribution(pi.labels(), std::move(probs));
}

double llr(const History& history, const std::vector<StructuredModel>& models) {
  if (history.t < 1) throw PreconditionError("llr: history must contain at least one step");
  // Per-action empirical log-likelihood of the unrestricted benchmark:
  // sum_y n_ay log(n_ay / n_a), the maximum any model could attain.
  double unrestricted = 0.0;
  const std::size_t n_actions = history.counts.size();
  std::vector<long long> per_action(n_actions, 0);
  for (std::size_t a = 0; a < n_actions; ++a) {
    for (long long n_ay : history.counts[a]) per_action[a] += n_ay;
    if (per_action[a] == 0) continue;
    for (long long n_ay : history.counts[a]) {
      if (n_ay == 0) continue;
      unrestricted += static_cast<double>(n_ay) *
                      std::log(static_cast<double>(n_ay) / static_cast<double>(per_action[a]));
    }
  }
  double best_model = -std::numeric_limits<double>::infinity();
  for (const auto& model : models) {
    double ll = 0.0;
    for (std::size_t a = 0; a < n_actions; ++a) {
      if (per_action[a] == 0) continue;
      for (std::size_t y = 0; y < history.counts[a].size(); ++y) {
        const long long n_ay = history.counts[a][y];
        if (n_ay == 0) continue;
        ll += static_cast<double>(n_ay) * std::log(model.row(a)[y]);
      }
    }
    best_model = std::max(best_model, ll);
  }
  return std::max(0.0, unrestricted - best_model);
}

namespace {

double lambda_from_history(const Environment& env, const History& history, bool& clipped) {
  const double raw = llr(history, env.models) / (env.c * static_cast<double>(history.t));
  clipped = raw > env.lambda_cap;
  return std::clamp(raw, 0.0, env.lambda_cap);
}

AgentState initial_state(const Environment& env) {
  AgentState state;
  state.log_posterior.resize(env.models.size());
  for (std::size_t k = 0; k < env.models.size(); ++k)
    state.log_posterior[k] = env.prior[k] > 0.0 ? std::log(env.prior[k])
                                                : -std::numeric_limits<double>::infinity();
  state.lambda_t = env.lambda0;
  state.mu_t = env.mu_bar * env.lambda0;
  state.freq.assign(env.payoffs.n_actions(), 0.0);
  return state;
}

}  // namespace

StepResult step(const Environment& env, AgentState& state, History& history, Rng& rng) {
  const RobustParams params = RobustParams::make(state.lambda_t, state.mu_t);
  const FiniteDistribution pi = state.posterior(env.models);
  const BestReply reply = best_reply(env.payoffs, env.models, pi, params);
  const int action = static_cast<int>(reply.chosen);

  const int outcome = rng.sample(env.true_dgp.row(action).probs());

  // Refresh posterior in log space.
  for (std::size_t k = 0; k < env.models.size(); ++k) {
    if (std::isinf(state.log_posterior[k])) continue;
    state.log_posterior[k] += std::log(env.models[k].row(action)[outcome]);
  }
  const double log_z = log_sum_exp(state.log_posterior);
  for (double& lp : state.log_posterior) lp -= log_z;

  history.record(action, outcome);
  bool clipped = false;
  state.lambda_t = lambda_from_history(env, history, clipped);
  state.mu_t = env.mu_bar * state.lambda_t;
  for (std::size_t a = 0; a < state.freq.size(); ++a) {
    long long n_a = 0;
    for (long long n : history.counts[a]) n_a += n;
    state.freq[a] = static_cast<double>(n_a) / static_cast<double>(history.t);
  }
  return StepResult{action, outcome};
}

Trajectory simulate(const Environment& env, long long horizon, std::uint64_t seed,
                    long long snapshot_every) {
  if (horizon < 1) throw PreconditionError("simulate: horizon must be at least 1");
  if (snapshot_every < 1) throw PreconditionError("simulate: snapshot cadence must be positive");
  Rng rng(seed);
  AgentState state = initial_state(env);
  History history(env.payoffs.n_actions(), env.payoffs.n_outcomes());

  Trajectory trajectory;
  trajectory.seed = seed;
  trajectory.steps.reserve(static_cast<std::size_t>(horizon));

  double payoff_sum = 0.0;
  for (long long t = 0; t < horizon; ++t) {
    StepRecord record;
    record.lambda = state.lambda_t;  // concern in force when the action is chosen
    record.mu = state.mu_t;

    const StepResult result = step(env, state, history, rng);
    record.action = result.action;
    record.outcome = result.outcome;
    trajectory.steps.push_back(record);
    payoff_sum += env.payoffs.u(result.action, result.outcome);

    if (state.lambda_t >= env.lambda_cap) trajectory.clipped_steps += 1;

    if ((t + 1) % snapshot_every == 0 || t + 1 == horizon) {
      PosteriorSnapshot snap;
      snap.t = t + 1;
      snap.posterior = state.posterior(env.models).probs();
      snap.freq = state.freq;
      trajectory.snapshots.push_back(std::move(snap));
    }
  }
  trajectory.final_posterior = state.posterior(env.models).probs();
  trajectory.final_freq = state.freq;
  trajectory.final_lambda = state.lambda_t;
  trajectory.final_mu = state.mu_t;
  trajectory.realized_payoff_mean = payoff_sum / static_cast<double>(horizon);
  return trajectory;
}

std::vector<Trajectory> run_batch(const Environment& env, long long horizon,
                                  const std::vector<std::uint64_t>& seeds,
                                  long long snapshot_every, int threads) {
  std::vector<Trajectory> results(seeds.size());
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned n_threads =
      threads > 0 ? static_cast<unsigned>(threads) : std::min<unsigned>(hw, seeds.size());
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i)
      results[i] = simulate(env, horizon, seeds[i], snapshot_every);
    return results;
  }
  // Static partition: worker w runs seeds w, w + n, w + 2n, ...; each writes
  // only its own slots.
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < n_threads; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < seeds.size(); i += n_threads)
        results[i] = simulate(env, horizon, seeds[i], snapshot_every);
    });
  }
  for (auto& th : pool) th.join();
  return results;
}

CycleDiagnostic cycle_diagnostic(const Trajectory& trajectory, long long window,
                                 std::size_t n_actions) {
  const long long horizon = static_cast<long long>(trajectory.steps.size());
  if (window < 1 || window > horizon / 4)
    throw PreconditionError("cycle_diagnostic: window must lie in [1, horizon/4]");
  CycleDiagnostic diag;
  for (std::size_t i = 1; i < trajectory.steps.size(); ++i)
    if (trajectory.steps[i].action != trajectory.steps[i - 1].action) diag.switch_count += 1;

  diag.window_freqs.assign(4, std::vector<double>(n_actions, 0.0));
  for (int w = 0; w < 4; ++w) {
    const long long begin = horizon - (4 - w) * window;
    const long long end = begin + window;
    for (long long i = begin; i < end; ++i)
      diag.window_freqs[w][trajectory.steps[static_cast<std::size_t>(i)].action] += 1.0;
    for (double& f : diag.window_freqs[w]) f /= static_cast<double>(window);
  }

  for (std::size_t a = 0; a < n_actions; ++a) {
    bool owns_all = true;
    for (int w = 0; w < 4; ++w)
      if (diag.window_freqs[w][a] <= 0.99) owns_all = false;
    if (owns_all) {
      diag.verdict = CycleVerdict::Converged;
      diag.converged_action = static_cast<int>(a);
      return diag;
    }
  }
  bool mixing = true;
  for (int w = 0; w < 4 && mixing; ++w)
    for (std::size_t a = 0; a < n_actions; ++a)
      if (diag.window_freqs[w][a] <= 0.05) mixing = false;
  diag.verdict = mixing ? CycleVerdict::Mixing : CycleVerdict::Undetermined;
  return diag;
}

double objective_payoff(const FiniteDistribution& alpha, const Environment& env) {
  if (alpha.size() != env.payoffs.n_actions())
    throw ConfigError("objective_payoff: mixed action length does not match actions");
  double total = 0.0;
  for (std::size_t a = 0; a < alpha.size(); ++a) {
    if (alpha[a] == 0.0) continue;
    double mean_u = 0.0;
    const FiniteDistribution& p_a = env.true_dgp.row(a);
    for (std::size_t y = 0; y < p_a.size(); ++y) mean_u += p_a[y] * env.payoffs.u(a, y);
    total += alpha[a] * mean_u;
  }
  return total;
}

}  // namespace erc
