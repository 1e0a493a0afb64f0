#include "info.hpp"

#include <algorithm>
#include <cmath>

namespace erc {

double shannon_entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  // Clamp the -0.0 that a point mass produces.
  return h < 0.0 ? 0.0 : h;
}

double shannon_entropy(const FiniteDistribution& p) { return shannon_entropy(p.probs()); }

double relative_entropy(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw ConfigError("relative_entropy: dimension mismatch");
  double r = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return kInfiniteDivergence;
    r += p[i] * std::log(p[i] / q[i]);
  }
  return r < 0.0 ? 0.0 : r;
}

double relative_entropy(const FiniteDistribution& p, const FiniteDistribution& q) {
  if (!p.same_labels(q))
    throw ConfigError("relative_entropy: label sets differ");
  return relative_entropy(p.probs(), q.probs());
}

double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) throw PreconditionError("log_sum_exp: empty input");
  const double m = *std::max_element(xs.begin(), xs.end());
  if (std::isinf(m) && m < 0) return m;  // all terms are exp(-inf) = 0
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

double log_sum_exp(std::span<const double> xs, std::span<const double> weights) {
  if (xs.empty()) throw PreconditionError("log_sum_exp: empty input");
  if (xs.size() != weights.size())
    throw ConfigError("log_sum_exp: weights length mismatch");
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (weights[i] < 0.0) throw PreconditionError("log_sum_exp: negative weight");
    if (weights[i] > 0.0) m = std::max(m, xs[i] + std::log(weights[i]));
  }
  if (std::isinf(m))
    throw PreconditionError("log_sum_exp: all weights are zero");
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (weights[i] > 0.0) s += std::exp(xs[i] + std::log(weights[i]) - m);
  }
  return m + std::log(s);
}

}  // namespace erc
