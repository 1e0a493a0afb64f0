#pragma once

#include <optional>
#include <vector>

#include "distribution.hpp"
#include "robust.hpp"

namespace erc {

// Average divergence of a candidate model from the true DGP under play alpha:
//   D(q; alpha) = sum_a alpha(a) R(p*_a || q_a).
double model_misfit(const StructuredModel& q, const FiniteDistribution& alpha,
                    const StructuredModel& true_dgp);

// Indices of the models within 1e-10 of the smallest misfit.
std::vector<std::size_t> best_fit_set(const std::vector<StructuredModel>& models,
                                      const FiniteDistribution& alpha,
                                      const StructuredModel& true_dgp);

// Pairwise value difference V(i) - V(j) at (lambda, mu_bar * lambda, pi).
double value_difference(const PayoffTable& payoffs, const std::vector<StructuredModel>& models,
                        double lambda, double mu_bar, const FiniteDistribution& pi,
                        std::size_t action_i, std::size_t action_j);

// Posterior-averaged distortion entropy difference H_i - H_j at the same
// parameters; the slope of the value difference in mu_bar is lambda times it.
double entropy_gap(const PayoffTable& payoffs, const std::vector<StructuredModel>& models,
                   double lambda, double mu_bar, const FiniteDistribution& pi,
                   std::size_t action_i, std::size_t action_j);

struct TripleResiduals {
  double fit = 0.0;        // worst excess misfit of a model eta puts weight on
  double best_reply = 0.0; // worst value shortfall of a supported action
  double tau = 0.0;        // |tau - min misfit / c|
};

struct EquilibriumTriple {
  FiniteDistribution alpha;
  FiniteDistribution eta;
  double tau = 0.0;
  TripleResiduals residuals;
};

// Independent re-verification of the three equilibrium conditions; used on
// every triple the search returns and available to callers.
TripleResiduals verify_equilibrium(const PayoffTable& payoffs,
                                   const std::vector<StructuredModel>& models,
                                   const StructuredModel& true_dgp, double c, double mu_bar,
                                   const FiniteDistribution& alpha, const FiniteDistribution& eta,
                                   double tau);

// Grid scan over mixed actions with candidate beliefs on the best-fit set
// (uniform, vertices, and a bisected two-model mix), keeping triples whose
// conditions verify below 1e-8, refined by indifference bisection along
// two-action edges. An empty result is a valid outcome.
std::vector<EquilibriumTriple> find_mixed_equilibria(const PayoffTable& payoffs,
                                                     const std::vector<StructuredModel>& models,
                                                     const StructuredModel& true_dgp, double c,
                                                     double mu_bar, double grid_resolution = 0.005);

// Unique posterior weight on the optimistic model at which a risky action
// ties the safe one. Requires the value difference to change sign between
// the degenerate beliefs; bisected to 1e-10.
double belief_threshold(const PayoffTable& payoffs, const StructuredModel& optimistic,
                        const StructuredModel& pessimistic, double lambda, double mu_bar,
                        std::size_t risky_action, std::size_t safe_action);

struct EliminationOptions {
  int lambda_steps = 21;
  int mubar_steps = 101;
  double pi_resolution = 0.1;  // belief grid spacing for |Q| >= 2
};

struct EliminationResult {
  bool feasible = false;
  double entropy_gap_min = 0.0;   // min over the grid of H_j - H_i
  double initial_advantage = 0.0; // max over the grid of V(i) - V(j) at mubar0
  double formula_threshold = 0.0;
  std::optional<double> certified_threshold;  // smallest grid mubar dominating everywhere
  std::string diagnostics;
};

// Complexity level above which action i never beats action j on the stated
// (lambda, belief) region. Returns both the sufficient closed-form bound and
// an empirically certified grid threshold.
EliminationResult elimination_threshold(const PayoffTable& payoffs,
                                        const std::vector<StructuredModel>& models,
                                        std::size_t action_i, std::size_t action_j,
                                        double lambda_lo, double lambda_hi, double mubar0,
                                        const EliminationOptions& options = {});

// Two-period CRRA portfolio environment with an exchangeable binary return
// model; certifies that the safe plan's worst-case distortion stays uniformly
// more entropic than the risky plan's on an admissible parameter grid.
struct ChamberlainParams {
  double gamma = 2.0;    // relative risk aversion
  double r_high = 1.3;   // risky gross return, high state
  double r_low = 0.7;    // risky gross return, low state
  double r_free = 1.02;  // risk-free gross return
  double w0 = 1.0;       // initial wealth
  double q_h = 0.6;      // persistence of the high state, > 1/2
  double pbar = 0.9;     // target concentration of the risky distortion
  double lambda_lo = 0.95;
  double lambda_hi = 1.0;
  int lambda_steps = 6;
  int mubar_steps = 8;
};

struct ChamberlainRow {
  double lambda = 0.0;
  double mu_bar = 0.0;
  double h_safe = 0.0;
  double h_risky = 0.0;
  double gap = 0.0;
  double mass_on_crash = 0.0;  // risky distortion weight on the double-loss history
};

struct ChamberlainReport {
  bool feasible = false;
  double delta_gap = 0.0;   // utility gap above the double-loss history
  double kappa_bar = 0.0;
  double mubar0 = 0.0;
  double h_star = 0.0;      // log 2 - Hbar(pbar)
  double min_gap = 0.0;
  double min_mass = 0.0;
  double min_h_safe = 0.0;
  std::vector<ChamberlainRow> rows;
  std::string diagnostics;
};

ChamberlainReport chamberlain_gap_certificate(const ChamberlainParams& params);

// Entropy of a distribution with mass p on one state and the rest split
// evenly over three others; the comparison bound used by the certificate.
double chamberlain_entropy_bound(double p);

}  // namespace erc
