// Scenario runner over the shared-library C interface. Loads or builds a
// JSON config, applies command-line overrides, executes it, and writes the
// report (JSON) or the scenario's CSV tables.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "erc.h"

namespace {

using nlohmann::json;

struct CommonArgs {
  std::string config_path;
  std::string preset;
  std::string out_path;
  std::string format = "json";
  std::optional<long long> seed;
  std::optional<long long> horizon;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_horizon) {
  cmd->add_option("--config", args.config_path, "Path to a scenario config (JSON)");
  cmd->add_option("--preset", args.preset, "Name of a packaged scenario");
  cmd->add_option("--seed", args.seed, "Override the config's seed list with one seed");
  cmd->add_option("--out", args.out_path, "Output path (defaults to stdout)");
  cmd->add_option("--format", args.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  if (with_horizon) cmd->add_option("--horizon", args.horizon, "Override the simulation horizon");
}

std::string load_config(const CommonArgs& args, const std::string& expected_kind) {
  if (args.config_path.empty() == args.preset.empty()) {
    std::cerr << "error: provide exactly one of --config or --preset\n";
    std::exit(ERC_ERROR_CONFIG);
  }
  std::string text;
  if (!args.preset.empty()) {
    char* preset = erc_preset_config(args.preset.c_str());
    if (preset == nullptr) {
      std::cerr << "error: " << erc_last_error() << "\n";
      std::exit(ERC_ERROR_CONFIG);
    }
    text = preset;
    erc_string_free(preset);
  } else {
    std::ifstream in(args.config_path);
    if (!in) {
      std::cerr << "error: cannot read config file '" << args.config_path << "'\n";
      std::exit(ERC_ERROR_CONFIG);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    text = buffer.str();
  }

  json cfg;
  try {
    cfg = json::parse(text);
  } catch (const json::exception& e) {
    std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
    std::exit(ERC_ERROR_CONFIG);
  }
  if (!cfg.is_object() || !cfg.contains("kind") || cfg.at("kind") != expected_kind) {
    std::cerr << "error: config kind does not match subcommand (expected '" << expected_kind
              << "')\n";
    std::exit(ERC_ERROR_CONFIG);
  }
  if (args.seed) {
    if (cfg.contains("seeds"))
      cfg["seeds"] = json::array({*args.seed});
    else
      cfg["seed"] = *args.seed;
  }
  if (args.horizon) cfg["horizon"] = *args.horizon;
  return cfg.dump();
}

int run_and_emit(const CommonArgs& args, const std::string& config) {
  erc_report* report = nullptr;
  const erc_status status = erc_run_scenario(config.c_str(), &report);
  if (status != ERC_OK) {
    std::cerr << "error: " << erc_last_error() << "\n";
    return status;
  }

  std::string payload;
  if (args.format == "json") {
    payload = erc_report_json(report);
    payload += "\n";
  } else {
    const size_t n_tables = erc_report_table_count(report);
    if (n_tables == 0) {
      std::cerr << "error: this scenario emits no CSV table; use --format json\n";
      erc_report_free(report);
      return ERC_ERROR_CONFIG;
    }
    payload = erc_report_table_csv(report, 0);
  }
  erc_report_free(report);

  if (args.out_path.empty()) {
    std::cout << payload;
  } else {
    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write '" << args.out_path << "'\n";
      return ERC_ERROR;
    }
    out << payload;
  }
  return ERC_OK;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"erc: entropic robust choice scenarios"};
  app.set_version_flag("--version", std::string(erc_version()));
  app.require_subcommand(1);

  struct Sub {
    const char* command;
    const char* kind;
    const char* help;
    bool horizon;
  };
  const Sub subs[] = {
      {"static-value", "static", "Worst-case values and distortions for one parameter point", false},
      {"simulate", "simulate", "Finite-horizon misspecification-learning simulation", true},
      {"equilibrium", "equilibrium", "Search for self-consistent mixed equilibria", false},
      {"capacity", "capacity", "Complexity profile and budget inversion", false},
      {"ri-solve", "ri", "Robust rational-inattention saddle point", false},
      {"growth-loss", "growth", "Growth-optimal portfolios and misspecification losses", false},
      {"home-bias", "home-bias", "Concentrated-downside premium sweep", false},
      {"representation-check", "representation-check", "Escort and corner representation residuals",
       false},
      {"chamberlain-gap", "chamberlain", "Portfolio-choice entropy-gap certificate", false},
  };

  std::vector<std::unique_ptr<CommonArgs>> arg_blocks;
  for (const auto& sub : subs) {
    auto args = std::make_unique<CommonArgs>();
    CLI::App* cmd = app.add_subcommand(sub.command, sub.help);
    add_common(cmd, *args, sub.horizon);
    CommonArgs* raw = args.get();
    const std::string kind = sub.kind;
    cmd->callback([raw, kind]() { std::exit(run_and_emit(*raw, load_config(*raw, kind))); });
    arg_blocks.push_back(std::move(args));
  }

  CLI::App* presets = app.add_subcommand("presets", "List packaged scenarios");
  presets->callback([]() {
    for (size_t i = 0; i < erc_preset_count(); ++i)
      std::cout << erc_preset_name(i) << "\n";
    std::exit(0);
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}
