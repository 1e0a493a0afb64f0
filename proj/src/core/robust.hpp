#pragma once

#include <span>
#include <vector>

#include "distribution.hpp"
#include "info.hpp"

namespace erc {

// Parameter regime of the penalized criterion
//   min_p  E_p[u] + (1/lambda) R(p||q) + mu H(p).
//
// Interior (mu < 1/lambda) admits the Gibbs closed form; Corner
// (mu >= 1/lambda) collapses to the worst supported outcome and is
// mu-invariant; BayesLimit is the exact lambda = 0 criterion
// E_q[u] + mu H(q), requested explicitly rather than via a threshold.
enum class Regime { Interior, Corner, BayesLimit };

struct RobustParams {
  double lambda = 0.0;
  double mu = 0.0;
  double kappa = 0.0;  // 1/lambda - mu (Interior/Corner)
  double beta = 0.0;   // 1/(1 - lambda*mu), defined only when lambda*mu != 1
  Regime regime = Regime::BayesLimit;

  static RobustParams make(double lambda, double mu);
};

struct WorstCaseResult {
  FiniteDistribution distortion;  // the minimizing p-hat
  double value = 0.0;             // minimized objective
  double entropy = 0.0;           // H(p-hat)
  double kl_to_model = 0.0;       // R(p-hat || q_a)
};

struct EscortModel {
  FiniteDistribution base;
  FiniteDistribution escort;  // proportional to base^beta on supp(base)
  double beta = 0.0;
  double log_norm = 0.0;  // log sum_y base(y)^beta
};

// Interior closed form: p-hat(y) proportional to exp(-u(y)/kappa) q(y)^beta,
// value = -kappa log Z. The value is cross-checked against a direct
// evaluation of the objective at p-hat; a gap above 1e-8 escalates as an
// internal-consistency error.
WorstCaseResult worst_case(std::span<const double> u_row, const FiniteDistribution& q,
                           const RobustParams& params);

// Corner regime (mu >= 1/lambda): value = min over supp(q) of
// u(y) + (1/lambda) log(1/q(y)), distortion a point mass on the minimizer.
// Ties break to the lowest outcome index. Literally independent of mu.
WorstCaseResult worst_case_corner(std::span<const double> u_row, const FiniteDistribution& q,
                                  double lambda);

// Posterior-averaged value sum_q pi(q) v(a; q), dispatching per regime.
double posterior_value(const PayoffTable& payoffs, std::size_t action,
                       const std::vector<StructuredModel>& models, const FiniteDistribution& pi,
                       const RobustParams& params);

struct BestReply {
  std::vector<double> values;       // per-action posterior values
  std::vector<std::size_t> argmax;  // all actions within 1e-10 of the max
  std::size_t chosen = 0;           // lowest index in the argmax set
};

BestReply best_reply(const PayoffTable& payoffs, const std::vector<StructuredModel>& models,
                     const FiniteDistribution& pi, const RobustParams& params);

struct EnvelopeDerivatives {
  double dv_dmu = 0.0;     // H(p-hat)
  double dv_dlambda = 0.0;  // -R(p-hat || q)/lambda^2
};

EnvelopeDerivatives envelope_derivatives(std::span<const double> u_row,
                                         const FiniteDistribution& q, const RobustParams& params);

// Normalized power transform q^beta / Z(q), computed in log space.
EscortModel escort_transform(const FiniteDistribution& q, double beta);

// Residual of the re-representation
//   v_{lambda,mu}(u; q) = -kappa log Z(q) + min_p { E_p[u] + kappa R(p||escort) },
// both sides computed independently. Returns |residual|.
double arc_equivalence_check(std::span<const double> u_row, const FiniteDistribution& q,
                             const RobustParams& params);

struct EntropyMuProfile {
  std::vector<double> mu_grid;
  std::vector<double> entropies;
  bool nondegenerate = false;        // payoffs not affine in log q
  bool strictly_decreasing = false;  // verdict, asserted only when nondegenerate
  double min_step_drop = 0.0;        // smallest H(mu_k) - H(mu_{k+1}) along the grid
};

// Entropy of the worst-case distortion along a mu grid (all entries must be
// interior). The degeneracy flag detects u = b1 + b2 log q pointwise.
EntropyMuProfile entropy_mu_profile(std::span<const double> u_row, const FiniteDistribution& q,
                                    double lambda, std::span<const double> mu_grid);

// True when there exist constants b1, b2 with u(y) = b1 + b2 log q(y) for
// every outcome (the knife-edge excluded by the strict-monotonicity result).
bool payoff_affine_in_log_model(std::span<const double> u_row, const FiniteDistribution& q,
                                double tol = 1e-12);

}  // namespace erc
