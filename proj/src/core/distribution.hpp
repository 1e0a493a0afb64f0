#pragma once

#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace erc {

// Probability vector over a labeled finite set. The one simplex type shared
// by every module: outcome distributions, posteriors over models, mixed
// actions, priors over states.
//
// Construction accepts vectors within 1e-9 of the simplex, renormalizes them,
// and guarantees |sum - 1| <= 1e-12 afterwards. Anything further off is a
// data error, not float drift, and is rejected.
class FiniteDistribution {
 public:
  static constexpr double kSumSlack = 1e-9;

  FiniteDistribution(std::vector<std::string> labels, std::vector<double> probs);

  // Unlabeled convenience constructor; labels become "0", "1", ...
  static FiniteDistribution from_probs(std::vector<double> probs);
  static FiniteDistribution uniform(std::vector<std::string> labels);
  static FiniteDistribution point_mass(std::vector<std::string> labels, std::size_t index);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }
  const std::vector<std::string>& labels() const { return labels_; }

  bool full_support() const;
  bool same_labels(const FiniteDistribution& other) const { return labels_ == other.labels_; }
  // Indices with positive probability; never empty by construction.
  std::vector<std::size_t> support() const;

 private:
  std::vector<std::string> labels_;
  std::vector<double> probs_;
};

// Bounded utility table u(a, y) over ordered action and outcome labels.
class PayoffTable {
 public:
  PayoffTable(std::vector<std::string> actions, std::vector<std::string> outcomes,
              std::vector<std::vector<double>> u);

  std::size_t n_actions() const { return actions_.size(); }
  std::size_t n_outcomes() const { return outcomes_.size(); }
  const std::vector<std::string>& actions() const { return actions_; }
  const std::vector<std::string>& outcomes() const { return outcomes_; }
  double u(std::size_t action, std::size_t outcome) const { return u_[action][outcome]; }
  std::span<const double> row(std::size_t action) const { return u_[action]; }
  std::size_t action_index(const std::string& label) const;

 private:
  std::vector<std::string> actions_;
  std::vector<std::string> outcomes_;
  std::vector<std::vector<double>> u_;
};

// One candidate model: an outcome distribution per action, all full support.
// True data-generating processes reuse the shape but may put zero mass on
// outcomes (a deterministic DGP is legitimate); use dgp() for those. Finiteness
// of the fit statistics only needs the candidate models to be full support.
class StructuredModel {
 public:
  StructuredModel(std::string name, std::vector<FiniteDistribution> per_action);
  static StructuredModel dgp(std::string name, std::vector<FiniteDistribution> per_action);

  // Validates shape against a payoff table (one row per action, rows over the
  // table's outcome labels).
  void check_against(const PayoffTable& table) const;

  const std::string& name() const { return name_; }
  std::size_t n_actions() const { return rows_.size(); }
  const FiniteDistribution& row(std::size_t action) const { return rows_[action]; }

 private:
  struct NoSupportCheck {};
  StructuredModel(NoSupportCheck, std::string name, std::vector<FiniteDistribution> per_action);

  std::string name_;
  std::vector<FiniteDistribution> rows_;
};

}  // namespace erc
