#include "scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "capacity.hpp"
#include "equilibrium.hpp"
#include "errors.hpp"
#include "growth.hpp"
#include "inattention.hpp"
#include "info.hpp"
#include "learning.hpp"
#include "robust.hpp"
#include "version.hpp"

namespace erc {

using nlohmann::json;

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

namespace {

void check_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const auto& key : allowed)
      if (item.key() == key) ok = true;
    if (!ok) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

const json& require(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  return j.at(key);
}

double require_number(const json& j, const std::string& key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& j, const std::string& key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

std::vector<std::string> parse_labels(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a nonempty array");
  std::vector<std::string> labels;
  for (const auto& v : j) {
    if (!v.is_string()) throw ConfigError(where + ": labels must be strings");
    labels.push_back(v.get<std::string>());
  }
  return labels;
}

std::vector<double> parse_vector(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a nonempty array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(where + ": entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::vector<double>> parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a nonempty matrix");
  std::vector<std::vector<double>> out;
  for (const auto& row : j) out.push_back(parse_vector(row, where));
  return out;
}

PayoffTable parse_payoffs(const json& j, const std::string& where) {
  check_keys(j, {"actions", "outcomes", "u"}, where);
  return PayoffTable(parse_labels(require(j, "actions", where), where + ".actions"),
                     parse_labels(require(j, "outcomes", where), where + ".outcomes"),
                     parse_matrix(require(j, "u", where), where + ".u"));
}

std::vector<FiniteDistribution> parse_rows(const json& j, const std::vector<std::string>& outcomes,
                                           const std::string& where) {
  const auto matrix = parse_matrix(j, where);
  std::vector<FiniteDistribution> rows;
  for (const auto& row : matrix) rows.emplace_back(outcomes, row);
  return rows;
}

std::vector<StructuredModel> parse_models(const json& j, const PayoffTable& payoffs,
                                          const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a nonempty model array");
  std::vector<StructuredModel> models;
  for (const auto& m : j) {
    check_keys(m, {"name", "rows"}, where);
    const std::string name = require(m, "name", where).get<std::string>();
    StructuredModel model(name, parse_rows(require(m, "rows", where), payoffs.outcomes(), where));
    model.check_against(payoffs);
    models.push_back(std::move(model));
  }
  return models;
}

json dist_json(const FiniteDistribution& d) {
  json out = json::object();
  for (std::size_t i = 0; i < d.size(); ++i) out[d.labels()[i]] = d[i];
  return out;
}

json vector_json(const std::vector<double>& v) { return json(v); }

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : n_cols_(header.size()) {
    append_row(header);
  }
  void append_row(const std::vector<std::string>& cells) {
    if (cells.size() != n_cols_) throw InternalError("CsvTable: ragged row");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::size_t n_cols_;
  std::ostringstream out_;
};

struct Invariants {
  int checks = 0;
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok) failures.push_back(what);
  }
  json to_json() const {
    json j;
    j["checks"] = checks;
    j["failures"] = failures;
    return j;
  }
};

// ---------------------------------------------------------------------------
// static: per-model worst cases, posterior values, best reply
// ---------------------------------------------------------------------------

void run_static(const json& cfg, json& results,
                std::vector<std::pair<std::string, std::string>>& tables, Invariants& inv) {
  check_keys(cfg, {"schema_version", "kind", "payoffs", "models", "prior", "lambda", "mu"},
             "static");
  const PayoffTable payoffs = parse_payoffs(require(cfg, "payoffs", "static"), "static.payoffs");
  const auto models = parse_models(require(cfg, "models", "static"), payoffs, "static.models");
  std::vector<std::string> names;
  for (const auto& m : models) names.push_back(m.name());
  const FiniteDistribution prior(names, parse_vector(require(cfg, "prior", "static"), "static.prior"));
  const double lambda = require_number(cfg, "lambda", "static");
  const double mu = require_number(cfg, "mu", "static");
  const RobustParams params = RobustParams::make(lambda, mu);

  results["regime"] = params.regime == Regime::Interior  ? "interior"
                      : params.regime == Regime::Corner ? "corner"
                                                        : "bayes-limit";
  if (params.regime == Regime::Interior) {
    const double kb = params.kappa * params.beta * lambda - 1.0;
    inv.expect(std::abs(kb) <= 1e-14 * std::max(1.0, std::abs(params.beta)),
               "kappa*beta == 1/lambda identity");
  }

  const BestReply reply = best_reply(payoffs, models, prior, params);
  json values = json::object();
  for (std::size_t a = 0; a < payoffs.n_actions(); ++a)
    values[payoffs.actions()[a]] = reply.values[a];
  results["values"] = values;
  json argmax = json::array();
  for (std::size_t a : reply.argmax) argmax.push_back(payoffs.actions()[a]);
  results["best_reply"] = {{"argmax", argmax}, {"chosen", payoffs.actions()[reply.chosen]}};

  if (params.regime != Regime::BayesLimit) {
    CsvTable table({"model", "action", "outcome", "probability"});
    json per_model = json::array();
    for (const auto& model : models) {
      json m;
      m["model"] = model.name();
      json per_action = json::array();
      for (std::size_t a = 0; a < payoffs.n_actions(); ++a) {
        const WorstCaseResult wc =
            params.regime == Regime::Interior
                ? worst_case(payoffs.row(a), model.row(a), params)
                : worst_case_corner(payoffs.row(a), model.row(a), lambda);
        double total = 0.0;
        for (std::size_t y = 0; y < wc.distortion.size(); ++y) total += wc.distortion[y];
        inv.expect(std::abs(total - 1.0) <= 1e-12, "distortion normalized");
        json entry;
        entry["action"] = payoffs.actions()[a];
        entry["value"] = wc.value;
        entry["entropy"] = wc.entropy;
        entry["kl_to_model"] = wc.kl_to_model;
        entry["distortion"] = dist_json(wc.distortion);
        per_action.push_back(entry);
        for (std::size_t y = 0; y < wc.distortion.size(); ++y)
          table.append_row({model.name(), payoffs.actions()[a], payoffs.outcomes()[y],
                            format_double(wc.distortion[y])});
      }
      m["per_action"] = per_action;
      per_model.push_back(m);
    }
    results["per_model"] = per_model;
    tables.emplace_back("distortions", table.str());
  }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

Environment parse_environment(const json& cfg, const std::string& where) {
  const PayoffTable payoffs = parse_payoffs(require(cfg, "payoffs", where), where + ".payoffs");
  const auto models = parse_models(require(cfg, "models", where), payoffs, where + ".models");
  std::vector<std::string> names;
  for (const auto& m : models) names.push_back(m.name());
  const FiniteDistribution prior(names, parse_vector(require(cfg, "prior", where), where + ".prior"));
  StructuredModel dgp = StructuredModel::dgp(
      "true", parse_rows(require(cfg, "true_dgp", where), payoffs.outcomes(), where + ".true_dgp"));
  return Environment(payoffs, std::move(dgp), models, prior, require_number(cfg, "c", where),
                     require_number(cfg, "mu_bar", where), require_number(cfg, "lambda_cap", where),
                     number_or(cfg, "lambda0", 0.0));
}

void run_simulate(const json& cfg, json& results,
                  std::vector<std::pair<std::string, std::string>>& tables, Invariants& inv) {
  check_keys(cfg,
             {"schema_version", "kind", "payoffs", "models", "prior", "true_dgp", "c", "mu_bar",
              "lambda_cap", "lambda0", "horizon", "seeds", "snapshot_every", "diagnostic_window"},
             "simulate");
  const Environment env = parse_environment(cfg, "simulate");
  const long long horizon = static_cast<long long>(require_number(cfg, "horizon", "simulate"));
  std::vector<std::uint64_t> seeds;
  for (const auto& s : require(cfg, "seeds", "simulate")) {
    if (!s.is_number_unsigned() && !s.is_number_integer())
      throw ConfigError("simulate.seeds: entries must be integers");
    seeds.push_back(s.get<std::uint64_t>());
  }
  if (seeds.empty()) throw ConfigError("simulate.seeds: at least one seed required");
  const long long cadence = static_cast<long long>(number_or(cfg, "snapshot_every", 100.0));
  const long long window =
      static_cast<long long>(number_or(cfg, "diagnostic_window", std::max(1.0, horizon / 8.0)));

  const auto runs = run_batch(env, horizon, seeds, cadence);

  CsvTable table = [&] {
    std::vector<std::string> header{"seed", "t", "action", "outcome", "lambda", "mu"};
    for (const auto& m : env.models) header.push_back("posterior_" + m.name());
    for (const auto& a : env.payoffs.actions()) header.push_back("freq_" + a);
    return CsvTable(header);
  }();

  json run_reports = json::array();
  for (const auto& run : runs) {
    inv.expect(run.final_lambda >= 0.0 && run.final_lambda <= env.lambda_cap,
               "lambda stays in [0, cap]");
    inv.expect(run.final_mu == env.mu_bar * run.final_lambda, "mu_t = mu_bar * lambda_t");
    double freq_sum = 0.0;
    for (double f : run.final_freq) freq_sum += f;
    inv.expect(std::abs(freq_sum - 1.0) <= 1e-9, "final frequencies normalized");

    const CycleDiagnostic diag = cycle_diagnostic(run, window, env.payoffs.n_actions());
    json r;
    r["seed"] = run.seed;
    r["final_lambda"] = run.final_lambda;
    r["final_mu"] = run.final_mu;
    r["final_freq"] = vector_json(run.final_freq);
    r["final_posterior"] = vector_json(run.final_posterior);
    r["realized_payoff_mean"] = run.realized_payoff_mean;
    r["clipped_steps"] = run.clipped_steps;
    r["switch_count"] = diag.switch_count;
    r["verdict"] = diag.verdict == CycleVerdict::Converged ? "converged"
                   : diag.verdict == CycleVerdict::Mixing  ? "mixing"
                                                           : "undetermined";
    if (diag.verdict == CycleVerdict::Converged)
      r["converged_action"] = env.payoffs.actions()[diag.converged_action];
    r["window_freqs"] = diag.window_freqs;
    run_reports.push_back(r);

    for (const auto& snap : run.snapshots) {
      const StepRecord& step = run.steps[static_cast<std::size_t>(snap.t - 1)];
      std::vector<std::string> row{std::to_string(run.seed), std::to_string(snap.t),
                                   env.payoffs.actions()[step.action],
                                   env.payoffs.outcomes()[step.outcome],
                                   format_double(step.lambda), format_double(step.mu)};
      for (double p : snap.posterior) row.push_back(format_double(p));
      for (double f : snap.freq) row.push_back(format_double(f));
      table.append_row(row);
    }
  }
  results["runs"] = run_reports;
  results["horizon"] = horizon;
  results["diagnostic_window"] = window;
  tables.emplace_back("trajectory", table.str());
}

// ---------------------------------------------------------------------------
// equilibrium
// ---------------------------------------------------------------------------

void run_equilibrium(const json& cfg, json& results,
                     std::vector<std::pair<std::string, std::string>>&, Invariants& inv) {
  check_keys(cfg,
             {"schema_version", "kind", "payoffs", "models", "true_dgp", "c", "mu_bar",
              "grid_resolution"},
             "equilibrium");
  const PayoffTable payoffs =
      parse_payoffs(require(cfg, "payoffs", "equilibrium"), "equilibrium.payoffs");
  const auto models =
      parse_models(require(cfg, "models", "equilibrium"), payoffs, "equilibrium.models");
  StructuredModel dgp = StructuredModel::dgp(
      "true",
      parse_rows(require(cfg, "true_dgp", "equilibrium"), payoffs.outcomes(), "equilibrium.true_dgp"));
  const double c = require_number(cfg, "c", "equilibrium");
  const double mu_bar = require_number(cfg, "mu_bar", "equilibrium");
  const double resolution = number_or(cfg, "grid_resolution", 0.005);

  const auto triples = find_mixed_equilibria(payoffs, models, dgp, c, mu_bar, resolution);
  json list = json::array();
  for (const auto& t : triples) {
    const TripleResiduals check =
        verify_equilibrium(payoffs, models, dgp, c, mu_bar, t.alpha, t.eta, t.tau);
    inv.expect(check.best_reply < 1e-8 && check.fit < 1e-8 && check.tau < 1e-8,
               "equilibrium re-verification");
    json e;
    e["alpha"] = dist_json(t.alpha);
    e["eta"] = dist_json(t.eta);
    e["tau"] = t.tau;
    e["residuals"] = {{"fit", t.residuals.fit},
                      {"best_reply", t.residuals.best_reply},
                      {"tau", t.residuals.tau}};
    list.push_back(e);
  }
  results["equilibria"] = list;
  results["count"] = triples.size();
}

// ---------------------------------------------------------------------------
// capacity
// ---------------------------------------------------------------------------

void run_capacity(const json& cfg, json& results,
                  std::vector<std::pair<std::string, std::string>>& tables, Invariants& inv) {
  check_keys(cfg,
             {"schema_version", "kind", "payoffs", "models", "prior", "lambda", "action",
              "mu_grid", "budget"},
             "capacity");
  const PayoffTable payoffs = parse_payoffs(require(cfg, "payoffs", "capacity"), "capacity.payoffs");
  const auto models = parse_models(require(cfg, "models", "capacity"), payoffs, "capacity.models");
  std::vector<std::string> names;
  for (const auto& m : models) names.push_back(m.name());
  const FiniteDistribution prior(names,
                                 parse_vector(require(cfg, "prior", "capacity"), "capacity.prior"));
  const double lambda = require_number(cfg, "lambda", "capacity");
  const std::size_t action =
      payoffs.action_index(require(cfg, "action", "capacity").get<std::string>());
  const auto mu_grid = parse_vector(require(cfg, "mu_grid", "capacity"), "capacity.mu_grid");

  const CapacityProfile profile = capacity_profile(payoffs, models, prior, lambda, action, mu_grid);
  const RegularityC1 reg = check_assumption_C1(payoffs, models, prior, lambda, action);

  if (reg.all_hold) {
    bool decreasing = true;
    for (std::size_t k = 0; k + 1 < profile.complexity.size(); ++k)
      if (profile.complexity[k + 1] >= profile.complexity[k]) decreasing = false;
    inv.expect(decreasing, "complexity strictly decreasing along the mu grid");
  }

  CsvTable table({"mu", "complexity"});
  json grid = json::array();
  for (std::size_t k = 0; k < profile.mu_grid.size(); ++k) {
    table.append_row({format_double(profile.mu_grid[k]), format_double(profile.complexity[k])});
    grid.push_back({{"mu", profile.mu_grid[k]}, {"complexity", profile.complexity[k]}});
  }
  results["profile"] = grid;
  results["limits"] = {{"low_mu", profile.limit_low}, {"high_mu", profile.limit_high}};
  results["regularity"] = {{"all_hold", reg.all_hold},
                           {"nonconstant", reg.nonconstant},
                           {"unique_min", reg.unique_min}};
  tables.emplace_back("capacity_profile", table.str());

  if (cfg.contains("budget")) {
    const double budget = require_number(cfg, "budget", "capacity");
    const BudgetSolution sol = solve_budget(payoffs, models, prior, lambda, action, budget);
    inv.expect(sol.kkt_residual <= 1e-8, "budget bisection residual");
    json b;
    b["budget"] = sol.budget;
    b["mu_B"] = sol.mu_B;
    b["binding"] = sol.binding;
    b["kkt_residual"] = sol.kkt_residual;
    json dist = json::array();
    for (std::size_t k = 0; k < sol.distortions.size(); ++k)
      dist.push_back({{"model", names[k]}, {"distortion", dist_json(sol.distortions[k])}});
    b["distortions"] = dist;
    results["budget_solution"] = b;
  }
}

// ---------------------------------------------------------------------------
// ri
// ---------------------------------------------------------------------------

void run_ri(const json& cfg, json& results,
            std::vector<std::pair<std::string, std::string>>& tables, Invariants& inv) {
  check_keys(cfg,
             {"schema_version", "kind", "states", "actions", "v", "g", "xi", "lambda", "mu",
              "damping", "tol", "max_iters"},
             "ri");
  const auto states = parse_labels(require(cfg, "states", "ri"), "ri.states");
  const auto actions = parse_labels(require(cfg, "actions", "ri"), "ri.actions");
  const auto v = parse_matrix(require(cfg, "v", "ri"), "ri.v");
  const FiniteDistribution g(states, parse_vector(require(cfg, "g", "ri"), "ri.g"));
  RIProblem problem(states, actions, v, g, require_number(cfg, "xi", "ri"),
                    require_number(cfg, "lambda", "ri"), require_number(cfg, "mu", "ri"));
  SaddleOptions options;
  options.damping = number_or(cfg, "damping", options.damping);
  options.tol = number_or(cfg, "tol", options.tol);
  options.max_iters = static_cast<int>(number_or(cfg, "max_iters", options.max_iters));

  const RISolution sol = solve_saddle(problem, options);

  for (std::size_t w = 0; w < problem.n_states(); ++w) {
    inv.expect(std::abs(sol.scales[w] * sol.m_star[w] - problem.xi * problem.g[w]) <= 1e-12,
               "scale identity xi_w m*(w) = xi g(w)");
    double row_sum = 0.0;
    for (double p : sol.psi[w]) row_sum += p;
    inv.expect(std::abs(row_sum - 1.0) <= 1e-9, "choice rule rows normalized");
  }
  double bar_check = 0.0;
  for (std::size_t a = 0; a < problem.n_actions(); ++a) {
    double bar = 0.0;
    for (std::size_t w = 0; w < problem.n_states(); ++w) bar += problem.g[w] * sol.psi[w][a];
    bar_check = std::max(bar_check, std::abs(bar - sol.psi_bar[a]));
  }
  inv.expect(bar_check <= 1e-12, "unconditional probabilities consistent");

  results["psi"] = sol.psi;
  results["psi_bar"] = vector_json(sol.psi_bar);
  results["m_star"] = dist_json(sol.m_star);
  results["scales"] = vector_json(sol.scales);
  results["objective"] = sol.objective;
  results["stationarity_residual"] = sol.stationarity_residual;
  results["iterations"] = sol.iterations;
  results["boundary"] = sol.boundary;

  CsvTable table({"state", "action", "psi", "psi_bar", "scale", "m_star"});
  for (std::size_t w = 0; w < problem.n_states(); ++w)
    for (std::size_t a = 0; a < problem.n_actions(); ++a)
      table.append_row({states[w], actions[a], format_double(sol.psi[w][a]),
                        format_double(sol.psi_bar[a]), format_double(sol.scales[w]),
                        format_double(sol.m_star[w])});
  tables.emplace_back("choice_rule", table.str());
}

// ---------------------------------------------------------------------------
// growth
// ---------------------------------------------------------------------------

void run_growth(const json& cfg, json& results,
                std::vector<std::pair<std::string, std::string>>& tables, Invariants& inv) {
  check_keys(cfg,
             {"schema_version", "kind", "actions", "states", "gross_returns", "p_true", "p_mis",
              "mu_grid"},
             "growth");
  const auto actions = parse_labels(require(cfg, "actions", "growth"), "growth.actions");
  const auto states = parse_labels(require(cfg, "states", "growth"), "growth.states");
  auto gross = parse_matrix(require(cfg, "gross_returns", "growth"), "growth.gross_returns");
  for (auto& row : gross)
    for (double& x : row) {
      if (x <= 0.0) throw ConfigError("growth: gross returns must be positive");
      x = std::log(x);
    }
  const PayoffTable returns(actions, states, gross);
  const FiniteDistribution p_true(states,
                                  parse_vector(require(cfg, "p_true", "growth"), "growth.p_true"));
  const FiniteDistribution p_mis(states,
                                 parse_vector(require(cfg, "p_mis", "growth"), "growth.p_mis"));
  const auto mu_grid = parse_vector(require(cfg, "mu_grid", "growth"), "growth.mu_grid");

  const PortfolioSolution base = optimal_portfolio(GrowthProblem(returns, p_true, 0.0));
  const SampledChoiceRule rule = sampled_choice_rule(base.alpha_star, p_true, returns);
  const HullCheck hull = check_regularity_2(p_mis, rule);
  const double l0 = misspecification_loss(returns, p_true, p_mis, 0.0);
  inv.expect(l0 >= -1e-12, "loss nonnegative at mu = 0");

  results["alpha_star_0"] = dist_json(base.alpha_star);
  results["value_0"] = base.value;
  json rule_json;
  rule_json["action_given_state"] = rule.action_given_state;
  rule_json["action_marginal"] = vector_json(rule.action_marginal);
  rule_json["state_given_action"] = rule.state_given_action;
  results["sampled_rule"] = rule_json;
  results["regularity_2"] = {{"holds", hull.holds},
                             {"weights", vector_json(hull.weights)},
                             {"certificate", hull.certificate}};
  results["loss_0"] = l0;

  CsvTable table({"mu", "loss"});
  table.append_row({format_double(0.0), format_double(l0)});
  json losses = json::array();
  for (double mu : mu_grid) {
    const double loss = misspecification_loss(returns, p_true, p_mis, mu);
    inv.expect(loss >= -1e-12, "loss nonnegative along the mu grid");
    const PortfolioSolution mis = optimal_portfolio(GrowthProblem(returns, p_mis, mu));
    losses.push_back({{"mu", mu},
                      {"loss", loss},
                      {"alpha_star_mis", dist_json(mis.alpha_star)}});
    table.append_row({format_double(mu), format_double(loss)});
  }
  results["losses"] = losses;
  tables.emplace_back("losses", table.str());
}

// ---------------------------------------------------------------------------
// home-bias
// ---------------------------------------------------------------------------

void run_home_bias(const json& cfg, json& results,
                   std::vector<std::pair<std::string, std::string>>& tables, Invariants& inv) {
  check_keys(cfg, {"schema_version", "kind", "n_downside", "delta", "lambda", "epsilon", "mu"},
             "home-bias");
  HomeBiasInstance base;
  base.n_downside = static_cast<int>(require_number(cfg, "n_downside", "home-bias"));
  base.delta = require_number(cfg, "delta", "home-bias");
  base.lambda = require_number(cfg, "lambda", "home-bias");
  auto as_list = [&](const char* key) {
    const json& v = require(cfg, key, "home-bias");
    return v.is_array() ? parse_vector(v, std::string("home-bias.") + key)
                        : std::vector<double>{v.get<double>()};
  };
  const auto epsilons = as_list("epsilon");
  const auto mus = as_list("mu");

  CsvTable table({"epsilon", "mu", "premium"});
  json rows = json::array();
  for (double eps : epsilons) {
    for (double mu : mus) {
      HomeBiasInstance instance = base;
      instance.epsilon = eps;
      instance.mu = mu;
      const HomeBiasResult r = home_bias_premium(instance);
      inv.expect(std::abs((r.v_domestic - r.v_foreign) - r.premium) <= 1e-12,
                 "premium equals the value wedge");
      rows.push_back({{"epsilon", eps},
                      {"mu", mu},
                      {"premium", r.premium},
                      {"v_domestic", r.v_domestic},
                      {"v_foreign", r.v_foreign}});
      table.append_row({format_double(eps), format_double(mu), format_double(r.premium)});
    }
  }
  results["rows"] = rows;
  tables.emplace_back("premium", table.str());
}

// ---------------------------------------------------------------------------
// representation-check
// ---------------------------------------------------------------------------

void run_representation(const json& cfg, json& results,
                        std::vector<std::pair<std::string, std::string>>&, Invariants& inv) {
  check_keys(cfg, {"schema_version", "kind", "instances", "sweep", "seed"}, "representation-check");
  json checks = json::array();
  double max_arc = 0.0, max_corner_gap = 0.0;

  auto check_instance = [&](const std::vector<double>& u, const FiniteDistribution& q,
                            double lambda, double mu) {
    const RobustParams params = RobustParams::make(lambda, mu);
    const double arc_resid = arc_equivalence_check(u, q, params);
    max_arc = std::max(max_arc, arc_resid);

    // Interior value just below the corner threshold against the corner formula.
    const RobustParams near = RobustParams::make(lambda, 1.0 / lambda - 1e-6);
    const double interior_near = worst_case(u, q, near).value;
    const double corner = worst_case_corner(u, q, lambda).value;
    const double gap = std::abs(interior_near - corner);
    max_corner_gap = std::max(max_corner_gap, gap);

    // Above the threshold the criterion must ignore mu entirely.
    const double v1 =
        posterior_value(PayoffTable({"a"}, q.labels(), {u}), 0, {StructuredModel("q", {q})},
                        FiniteDistribution::from_probs({1.0}), RobustParams::make(lambda, 1.0 / lambda + 0.1));
    const double v2 =
        posterior_value(PayoffTable({"a"}, q.labels(), {u}), 0, {StructuredModel("q", {q})},
                        FiniteDistribution::from_probs({1.0}), RobustParams::make(lambda, 1.0 / lambda + 0.7));
    const bool mu_invariant = v1 == v2;
    inv.expect(mu_invariant, "corner values mu-invariant");

    checks.push_back({{"lambda", lambda},
                      {"mu", mu},
                      {"arc_residual", arc_resid},
                      {"corner_gap", gap},
                      {"corner_mu_invariant", mu_invariant}});
  };

  if (cfg.contains("instances")) {
    for (const auto& inst : cfg.at("instances")) {
      check_keys(inst, {"u", "q", "lambda", "mu"}, "representation-check.instances");
      const auto u = parse_vector(require(inst, "u", "rc"), "rc.u");
      const FiniteDistribution q = FiniteDistribution::from_probs(parse_vector(require(inst, "q", "rc"), "rc.q"));
      check_instance(u, q, require_number(inst, "lambda", "rc"), require_number(inst, "mu", "rc"));
    }
  }
  if (cfg.contains("sweep")) {
    const json& sweep = cfg.at("sweep");
    check_keys(sweep, {"count", "n_outcomes"}, "representation-check.sweep");
    const int count = static_cast<int>(require_number(sweep, "count", "rc.sweep"));
    const int n_outcomes = static_cast<int>(number_or(sweep, "n_outcomes", 3.0));
    Rng rng(cfg.contains("seed") ? cfg.at("seed").get<std::uint64_t>() : 0);
    for (int k = 0; k < count; ++k) {
      std::vector<double> u(n_outcomes), probs(n_outcomes);
      double total = 0.0;
      for (int y = 0; y < n_outcomes; ++y) {
        u[y] = rng.uniform(-1.0, 1.0);
        probs[y] = 0.05 + rng.next_double();
        total += probs[y];
      }
      for (double& p : probs) p /= total;
      const double lambda = rng.uniform(0.2, 2.0);
      const double mu = rng.uniform(-1.0, 1.0 / lambda - 1e-3);
      check_instance(u, FiniteDistribution::from_probs(probs), lambda, mu);
    }
  }
  results["checks"] = checks;
  results["max_arc_residual"] = max_arc;
  results["max_corner_gap"] = max_corner_gap;
}

// ---------------------------------------------------------------------------
// chamberlain
// ---------------------------------------------------------------------------

void run_chamberlain(const json& cfg, json& results,
                     std::vector<std::pair<std::string, std::string>>& tables, Invariants& inv) {
  check_keys(cfg,
             {"schema_version", "kind", "gamma", "r_high", "r_low", "r_free", "w0", "q_h", "pbar",
              "lambda_lo", "lambda_hi", "lambda_steps", "mubar_steps"},
             "chamberlain");
  ChamberlainParams params;
  params.gamma = require_number(cfg, "gamma", "chamberlain");
  params.r_high = require_number(cfg, "r_high", "chamberlain");
  params.r_low = require_number(cfg, "r_low", "chamberlain");
  params.r_free = require_number(cfg, "r_free", "chamberlain");
  params.w0 = require_number(cfg, "w0", "chamberlain");
  params.q_h = require_number(cfg, "q_h", "chamberlain");
  params.pbar = require_number(cfg, "pbar", "chamberlain");
  params.lambda_lo = require_number(cfg, "lambda_lo", "chamberlain");
  params.lambda_hi = require_number(cfg, "lambda_hi", "chamberlain");
  params.lambda_steps = static_cast<int>(number_or(cfg, "lambda_steps", params.lambda_steps));
  params.mubar_steps = static_cast<int>(number_or(cfg, "mubar_steps", params.mubar_steps));

  const ChamberlainReport report = chamberlain_gap_certificate(params);
  results["feasible"] = report.feasible;
  results["delta_gap"] = report.delta_gap;
  results["kappa_bar"] = report.kappa_bar;
  results["mubar0"] = report.mubar0;
  results["h_star"] = report.h_star;
  results["diagnostics"] = report.diagnostics;
  if (report.feasible) {
    results["min_gap"] = report.min_gap;
    results["min_mass_on_crash"] = report.min_mass;
    results["min_h_safe"] = report.min_h_safe;
    inv.expect(report.min_h_safe >= std::log(2.0) - 1e-9, "safe entropy at least log 2");
    CsvTable table({"lambda", "mu_bar", "h_safe", "h_risky", "gap", "mass_on_crash"});
    for (const auto& row : report.rows)
      table.append_row({format_double(row.lambda), format_double(row.mu_bar),
                        format_double(row.h_safe), format_double(row.h_risky),
                        format_double(row.gap), format_double(row.mass_on_crash)});
    tables.emplace_back("gap_grid", table.str());
  }
}

// ---------------------------------------------------------------------------
// presets
// ---------------------------------------------------------------------------

json preset_running_example() {
  return json{
      {"schema_version", 1},
      {"kind", "static"},
      {"payoffs",
       {{"actions", {"risky", "safe"}},
        {"outcomes", {"g", "b"}},
        {"u", {{1.0, 0.0}, {0.4, 0.4}}}}},
      {"models",
       {{{"name", "optimistic"}, {"rows", {{0.7, 0.3}, {0.5, 0.5}}}},
        {{"name", "pessimistic"}, {"rows", {{0.3, 0.7}, {0.5, 0.5}}}}}},
      {"prior", {0.5, 0.5}},
      {"lambda", 1.0},
      {"mu", 0.0}};
}

json preset_cycle_env() {
  return json{
      {"schema_version", 1},
      {"kind", "simulate"},
      {"payoffs",
       {{"actions", {"risky", "safe"}},
        {"outcomes", {"g1", "g2", "g3", "b"}},
        {"u", {{1.0, 1.0, 1.0, 0.0}, {0.5, 0.5, 0.5, 0.5}}}}},
      {"models",
       {{{"name", "q"},
         {"rows", {{0.2, 0.2, 0.2, 0.4}, {0.3069, 0.1931, 0.3069, 0.1931}}}}}},
      {"prior", {1.0}},
      {"true_dgp", {{0.15, 0.15, 0.15, 0.55}, {0.25, 0.25, 0.25, 0.25}}},
      {"c", 0.04},
      {"mu_bar", 0.0},
      {"lambda_cap", 1.4},
      {"lambda0", 0.0},
      {"horizon", 100000},
      {"seeds", {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}},
      {"snapshot_every", 1000}};
}

json preset_correct_spec() {
  return json{
      {"schema_version", 1},
      {"kind", "simulate"},
      {"payoffs",
       {{"actions", {"risky", "safe"}},
        {"outcomes", {"g", "b"}},
        {"u", {{1.0, 0.0}, {0.4, 0.4}}}}},
      {"models",
       {{{"name", "qstar"}, {"rows", {{0.6, 0.4}, {0.5, 0.5}}}},
        {{"name", "qalt"}, {"rows", {{0.4, 0.6}, {0.5, 0.5}}}}}},
      {"prior", {0.5, 0.5}},
      {"true_dgp", {{0.6, 0.4}, {0.5, 0.5}}},
      {"c", 1.0},
      {"mu_bar", 0.5},
      {"lambda_cap", 1.0},
      {"lambda0", 0.0},
      {"horizon", 100000},
      {"seeds", {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}},
      {"snapshot_every", 1000}};
}

json preset_growth_counterexample() {
  return json{{"schema_version", 1},
              {"kind", "growth"},
              {"actions", {"a1", "a2"}},
              {"states", {"y1", "y2"}},
              {"gross_returns", {{3.0, 1.0}, {1.0, 4.0}}},
              {"p_true", {0.5, 0.5}},
              {"p_mis", {9.0 / 11.0, 2.0 / 11.0}},
              {"mu_grid", {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}}};
}

json preset_home_bias_sweep() {
  return json{{"schema_version", 1},
              {"kind", "home-bias"},
              {"n_downside", 10},
              {"delta", 0.99},
              {"lambda", 1.0},
              {"epsilon", {1e-2, 1e-4, 1e-6, 1e-8}},
              {"mu", {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}}};
}

json preset_chamberlain_gap() {
  return json{{"schema_version", 1}, {"kind", "chamberlain"},
              {"gamma", 2.0},         {"r_high", 1.3},
              {"r_low", 0.7},         {"r_free", 1.02},
              {"w0", 1.0},            {"q_h", 0.6},
              {"pbar", 0.9},          {"lambda_lo", 0.95},
              {"lambda_hi", 1.0},     {"lambda_steps", 6},
              {"mubar_steps", 8}};
}

json preset_ri_2x2() {
  return json{{"schema_version", 1},
              {"kind", "ri"},
              {"states", {"w1", "w2"}},
              {"actions", {"a1", "a2"}},
              {"v", {{1.0, 0.0}, {0.0, 1.0}}},
              {"g", {0.6, 0.4}},
              {"xi", 0.5},
              {"lambda", 1.0},
              {"mu", 0.3}};
}

const std::vector<std::pair<std::string, json (*)()>>& preset_table() {
  static const std::vector<std::pair<std::string, json (*)()>> presets{
      {"running-example", preset_running_example},
      {"cycle-env", preset_cycle_env},
      {"correct-spec", preset_correct_spec},
      {"growth-counterexample", preset_growth_counterexample},
      {"home-bias-sweep", preset_home_bias_sweep},
      {"chamberlain-gap", preset_chamberlain_gap},
      {"ri-2x2", preset_ri_2x2}};
  return presets;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : preset_table()) out.push_back(name);
    return out;
  }();
  return names;
}

std::string preset_config_text(const std::string& name) {
  for (const auto& [preset, fn] : preset_table())
    if (preset == name) return fn().dump(2);
  throw ConfigError("unknown preset '" + name + "'");
}

RunReport run_scenario(const std::string& config_json_text) {
  json cfg;
  try {
    cfg = json::parse(config_json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
  if (!cfg.contains("schema_version") || cfg.at("schema_version") != 1)
    throw ConfigError("config requires schema_version 1");
  const std::string kind = require(cfg, "kind", "config").get<std::string>();

  const auto start = std::chrono::steady_clock::now();
  json results;
  std::vector<std::pair<std::string, std::string>> tables;
  Invariants inv;

  if (kind == "static")
    run_static(cfg, results, tables, inv);
  else if (kind == "simulate")
    run_simulate(cfg, results, tables, inv);
  else if (kind == "equilibrium")
    run_equilibrium(cfg, results, tables, inv);
  else if (kind == "capacity")
    run_capacity(cfg, results, tables, inv);
  else if (kind == "ri")
    run_ri(cfg, results, tables, inv);
  else if (kind == "growth")
    run_growth(cfg, results, tables, inv);
  else if (kind == "home-bias")
    run_home_bias(cfg, results, tables, inv);
  else if (kind == "representation-check")
    run_representation(cfg, results, tables, inv);
  else if (kind == "chamberlain")
    run_chamberlain(cfg, results, tables, inv);
  else
    throw ConfigError("unknown scenario kind '" + kind + "'");

  if (!inv.failures.empty()) {
    std::string what = "invariant check failed:";
    for (const auto& f : inv.failures) what += " [" + f + "]";
    throw InternalError(what);
  }

  const auto elapsed = std::chrono::steady_clock::now() - start;
  RunReport run;
  run.report["schema_version"] = 1;
  run.report["library_version"] = kVersion;
  run.report["config"] = cfg;
  run.report["wall_time_ms"] =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(elapsed).count();
  run.report["results"] = results;
  run.report["invariants"] = inv.to_json();
  run.csv_tables = std::move(tables);
  return run;
}

}  // namespace erc
