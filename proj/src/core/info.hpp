#pragma once

#include <cmath>
#include <limits>
#include <span>

#include "distribution.hpp"

namespace erc {

// Sentinel for R(p || q) when p is not absolutely continuous w.r.t. q.
// A divergent divergence is meaningful, not an error; callers test with
// is_infinite_divergence().
inline constexpr double kInfiniteDivergence = std::numeric_limits<double>::infinity();
inline bool is_infinite_divergence(double v) { return std::isinf(v); }

// Shannon entropy in nats, -sum p log p with 0 log 0 := 0.
double shannon_entropy(std::span<const double> probs);
double shannon_entropy(const FiniteDistribution& p);

// Relative entropy R(p || q) in nats. Terms with p(y) = 0 contribute zero;
// any y with p(y) > 0 and q(y) = 0 makes the result kInfiniteDivergence.
double relative_entropy(std::span<const double> p, std::span<const double> q);
double relative_entropy(const FiniteDistribution& p, const FiniteDistribution& q);

// log sum_i w_i exp(x_i) via max-shift, overflow-free for |x_i| <= 700.
// Weights default to 1; zero weights are skipped, all-zero weights are a
// precondition error.
double log_sum_exp(std::span<const double> xs);
double log_sum_exp(std::span<const double> xs, std::span<const double> weights);

}  // namespace erc
