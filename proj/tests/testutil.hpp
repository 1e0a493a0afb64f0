#pragma once

// Shared random-instance generators for the unit and acceptance suites.

#include <span>
#include <vector>

#include "distribution.hpp"
#include "info.hpp"
#include "rng.hpp"

namespace testutil {

// Payoff row with entries in [-1, 1].
inline std::vector<double> random_payoffs(erc::Rng& rng, std::size_t n) {
  std::vector<double> u(n);
  for (double& x : u) x = rng.uniform(-1.0, 1.0);
  return u;
}

// Full-support probability vector with every entry at least floor/(1+n*floor).
inline std::vector<double> random_simplex(erc::Rng& rng, std::size_t n, double floor = 0.05) {
  std::vector<double> p(n);
  double total = 0.0;
  for (double& x : p) {
    x = floor + rng.next_double();
    total += x;
  }
  for (double& x : p) x /= total;
  return p;
}

// Penalized objective evaluated directly from its definition; the oracle-side
// counterpart of the library's closed forms.
inline double penalized_objective(std::span<const double> p, std::span<const double> u,
                                  std::span<const double> q, double lambda, double mu) {
  double value = 0.0;
  for (std::size_t y = 0; y < p.size(); ++y) value += p[y] * u[y];
  value += erc::relative_entropy(p, q) / lambda;
  value += mu * erc::shannon_entropy(p);
  return value;
}

}  // namespace testutil
