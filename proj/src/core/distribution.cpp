#include "distribution.hpp"

#include <cmath>
#include <numeric>

namespace erc {

namespace {

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  return labels;
}

}  // namespace

FiniteDistribution::FiniteDistribution(std::vector<std::string> labels, std::vector<double> probs)
    : labels_(std::move(labels)), probs_(std::move(probs)) {
  if (probs_.empty()) throw ConfigError("FiniteDistribution: empty probability vector");
  if (labels_.size() != probs_.size())
    throw ConfigError("FiniteDistribution: labels and probabilities differ in length");
  double sum = 0.0;
  for (double& p : probs_) {
    if (!std::isfinite(p)) throw ConfigError("FiniteDistribution: non-finite entry");
    if (p < 0.0) {
      if (p < -1e-12) throw ConfigError("FiniteDistribution: negative entry");
      p = 0.0;
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumSlack)
    throw ConfigError("FiniteDistribution: entries sum to " + std::to_string(sum) +
                      ", outside the accepted simplex slack");
  for (double& p : probs_) p /= sum;
  const double resum = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  if (std::abs(resum - 1.0) > 1e-12)
    throw InternalError("FiniteDistribution: renormalization failed");
  if (support().empty()) throw ConfigError("FiniteDistribution: empty support");
}

FiniteDistribution FiniteDistribution::from_probs(std::vector<double> probs) {
  auto labels = default_labels(probs.size());
  return FiniteDistribution(std::move(labels), std::move(probs));
}

FiniteDistribution FiniteDistribution::uniform(std::vector<std::string> labels) {
  std::vector<double> probs(labels.size(), 1.0 / static_cast<double>(labels.size()));
  return FiniteDistribution(std::move(labels), std::move(probs));
}

FiniteDistribution FiniteDistribution::point_mass(std::vector<std::string> labels,
                                                  std::size_t index) {
  if (index >= labels.size()) throw ConfigError("FiniteDistribution: point mass index out of range");
  std::vector<double> probs(labels.size(), 0.0);
  probs[index] = 1.0;
  return FiniteDistribution(std::move(labels), std::move(probs));
}

bool FiniteDistribution::full_support() const {
  for (double p : probs_)
    if (p <= 0.0) return false;
  return true;
}

std::vector<std::size_t> FiniteDistribution::support() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < probs_.size(); ++i)
    if (probs_[i] > 0.0) idx.push_back(i);
  return idx;
}

PayoffTable::PayoffTable(std::vector<std::string> actions, std::vector<std::string> outcomes,
                         std::vector<std::vector<double>> u)
    : actions_(std::move(actions)), outcomes_(std::move(outcomes)), u_(std::move(u)) {
  if (actions_.empty() || outcomes_.empty())
    throw ConfigError("PayoffTable: actions and outcomes must be nonempty");
  if (u_.size() != actions_.size())
    throw ConfigError("PayoffTable: one payoff row per action required");
  for (const auto& row : u_) {
    if (row.size() != outcomes_.size())
      throw ConfigError("PayoffTable: payoff row length does not match outcomes");
    for (double v : row)
      if (!std::isfinite(v)) throw ConfigError("PayoffTable: non-finite payoff entry");
  }
}

std::size_t PayoffTable::action_index(const std::string& label) const {
  for (std::size_t i = 0; i < actions_.size(); ++i)
    if (actions_[i] == label) return i;
  throw ConfigError("PayoffTable: unknown action label '" + label + "'");
}

StructuredModel::StructuredModel(std::string name, std::vector<FiniteDistribution> per_action)
    : name_(std::move(name)), rows_(std::move(per_action)) {
  if (rows_.empty()) throw ConfigError("StructuredModel: no per-action distributions");
  for (const auto& row : rows_)
    if (!row.full_support())
      throw ConfigError("StructuredModel '" + name_ + "': every outcome needs positive probability");
}

StructuredModel::StructuredModel(NoSupportCheck, std::string name,
                                 std::vector<FiniteDistribution> per_action)
    : name_(std::move(name)), rows_(std::move(per_action)) {
  if (rows_.empty()) throw ConfigError("StructuredModel: no per-action distributions");
}

StructuredModel StructuredModel::dgp(std::string name, std::vector<FiniteDistribution> per_action) {
  return StructuredModel(NoSupportCheck{}, std::move(name), std::move(per_action));
}

void StructuredModel::check_against(const PayoffTable& table) const {
  if (rows_.size() != table.n_actions())
    throw ConfigError("StructuredModel '" + name_ + "': row count does not match actions");
  for (const auto& row : rows_) {
    if (row.size() != table.n_outcomes())
      throw ConfigError("StructuredModel '" + name_ + "': row length does not match outcomes");
  }
}

}  // namespace erc
