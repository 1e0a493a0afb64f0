#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "distribution.hpp"
#include "rng.hpp"
#include "robust.hpp"

namespace erc {

// Repeated-choice environment: a true data generating process, a finite set
// of candidate models learned by Bayes rule, and a misspecification concern
// that tracks how much the best candidate underfits an unrestricted model.
struct Environment {
  PayoffTable payoffs;
  StructuredModel true_dgp;
  std::vector<StructuredModel> models;
  FiniteDistribution prior;
  double c = 1.0;          // time normalization of the fit statistic, > 0
  double mu_bar = 0.0;     // complexity weight, >= 0; effective mu_t = mu_bar * lambda_t
  double lambda_cap = 1.0; // hard cap on lambda_t; requires mu_bar * cap^2 < 1
  double lambda0 = 0.0;    // concern before any data; the fit statistic needs t >= 1

  Environment(PayoffTable payoffs_, StructuredModel true_dgp_,
              std::vector<StructuredModel> models_, FiniteDistribution prior_, double c_,
              double mu_bar_, double lambda_cap_, double lambda0_ = 0.0);
};

struct History {
  std::vector<std::pair<int, int>> steps;        // (action, outcome) pairs
  std::vector<std::vector<long long>> counts;    // counts[a][y]
  long long t = 0;

  explicit History(std::size_t n_actions = 0, std::size_t n_outcomes = 0)
      : counts(n_actions, std::vector<long long>(n_outcomes, 0)) {}
  void record(int action, int outcome);
};

struct AgentState {
  std::vector<double> log_posterior;  // over models, normalized each step
  double lambda_t = 0.0;
  double mu_t = 0.0;
  std::vector<double> freq;  // running action frequencies

  FiniteDistribution posterior(const std::vector<StructuredModel>& models) const;
};

// Bayes update pi'(q) proportional to pi(q) q_a(y), done in log space.
FiniteDistribution update_posterior(const FiniteDistribution& pi, std::size_t action,
                                    std::size_t outcome,
                                    const std::vector<StructuredModel>& models);

// Fit statistic of the model class on a history: the log-likelihood gap to
// the unrestricted alternative, which reduces to count-weighted divergences
// from the per-action empirical outcome distributions. Always >= 0.
double llr(const History& history, const std::vector<StructuredModel>& models);

struct StepRecord {
  int action = 0;
  int outcome = 0;
  double lambda = 0.0;  // concern used when choosing this step's action
  double mu = 0.0;
};

struct PosteriorSnapshot {
  long long t = 0;
  std::vector<double> posterior;
  std::vector<double> freq;
};

struct Trajectory {
  std::vector<StepRecord> steps;
  std::vector<PosteriorSnapshot> snapshots;
  std::vector<double> final_posterior;
  std::vector<double> final_freq;
  double final_lambda = 0.0;
  double final_mu = 0.0;
  double realized_payoff_mean = 0.0;
  long long clipped_steps = 0;  // times the fit statistic exceeded the cap
  std::uint64_t seed = 0;
};

struct StepResult {
  int action = 0;
  int outcome = 0;
};

// One period: choose a best reply at (lambda_t, mu_bar * lambda_t, pi_t),
// draw the outcome from the true DGP, then refresh posterior, counts,
// frequencies, and the concern (clipped into [0, lambda_cap]).
StepResult step(const Environment& env, AgentState& state, History& history, Rng& rng);

Trajectory simulate(const Environment& env, long long horizon, std::uint64_t seed,
                    long long snapshot_every = 100);

// Independent runs, one per seed; workers share nothing mutable.
std::vector<Trajectory> run_batch(const Environment& env, long long horizon,
                                  const std::vector<std::uint64_t>& seeds,
                                  long long snapshot_every = 100, int threads = 0);

enum class CycleVerdict { Converged, Mixing, Undetermined };

struct CycleDiagnostic {
  long long switch_count = 0;
  std::vector<std::vector<double>> window_freqs;  // last four windows x actions
  CycleVerdict verdict = CycleVerdict::Undetermined;
  int converged_action = -1;
};

// Trailing-window behavior classifier: Converged(a) when one action owns
// more than 99% of each of the last four windows, Mixing when every action
// keeps more than 5% in each of them.
CycleDiagnostic cycle_diagnostic(const Trajectory& trajectory, long long window,
                                 std::size_t n_actions);

// Expected payoff of a mixed action under the true DGP.
double objective_payoff(const FiniteDistribution& alpha, const Environment& env);

}  // namespace erc
