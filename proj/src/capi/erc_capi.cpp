#include "erc.h"

#include <cstring>
#include <string>
#include <vector>

#include "../core/errors.hpp"
#include "../core/robust.hpp"
#include "../core/scenario.hpp"
#include "../core/version.hpp"

namespace {

thread_local std::string g_last_error;

erc_status status_from(const erc::Error& e) {
  g_last_error = e.what();
  switch (e.kind()) {
    case erc::ErrorKind::Config:
      return ERC_ERROR_CONFIG;
    case erc::ErrorKind::Precondition:
      return ERC_ERROR_PRECONDITION;
    case erc::ErrorKind::Convergence:
      return ERC_ERROR_CONVERGENCE;
    case erc::ErrorKind::Internal:
      return ERC_ERROR_INTERNAL;
  }
  return ERC_ERROR;
}

}  // namespace

struct erc_report {
  std::string json_text;
  std::vector<std::pair<std::string, std::string>> tables;
};

extern "C" {

const char* erc_version(void) { return erc::kVersion; }

const char* erc_last_error(void) { return g_last_error.c_str(); }

erc_status erc_run_scenario(const char* config_json, erc_report** out_report) {
  if (out_report == nullptr) return ERC_ERROR;
  *out_report = nullptr;
  if (config_json == nullptr) {
    g_last_error = "config_json is NULL";
    return ERC_ERROR_CONFIG;
  }
  try {
    erc::RunReport run = erc::run_scenario(config_json);
    auto* report = new erc_report;
    report->json_text = run.report.dump(2);
    report->tables = std::move(run.csv_tables);
    *out_report = report;
    return ERC_OK;
  } catch (const erc::Error& e) {
    return status_from(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ERC_ERROR;
  }
}

const char* erc_report_json(const erc_report* report) {
  return report ? report->json_text.c_str() : nullptr;
}

size_t erc_report_table_count(const erc_report* report) {
  return report ? report->tables.size() : 0;
}

const char* erc_report_table_name(const erc_report* report, size_t index) {
  if (!report || index >= report->tables.size()) return nullptr;
  return report->tables[index].first.c_str();
}

const char* erc_report_table_csv(const erc_report* report, size_t index) {
  if (!report || index >= report->tables.size()) return nullptr;
  return report->tables[index].second.c_str();
}

void erc_report_free(erc_report* report) { delete report; }

size_t erc_preset_count(void) { return erc::preset_names().size(); }

const char* erc_preset_name(size_t index) {
  const auto& names = erc::preset_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

char* erc_preset_config(const char* name) {
  if (name == nullptr) return nullptr;
  try {
    const std::string text = erc::preset_config_text(name);
    char* out = new char[text.size() + 1];
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
  } catch (const erc::Error& e) {
    g_last_error = e.what();
    return nullptr;
  }
}

void erc_string_free(char* text) { delete[] text; }

erc_status erc_worst_case(size_t n, const double* u, const double* q, double lambda, double mu,
                          double* distortion_out, double* value_out, double* entropy_out,
                          double* kl_out) {
  if (n == 0 || u == nullptr || q == nullptr) {
    g_last_error = "erc_worst_case: null or empty inputs";
    return ERC_ERROR_CONFIG;
  }
  try {
    const erc::FiniteDistribution model =
        erc::FiniteDistribution::from_probs(std::vector<double>(q, q + n));
    const erc::RobustParams params = erc::RobustParams::make(lambda, mu);
    const erc::WorstCaseResult result =
        erc::worst_case(std::span<const double>(u, n), model, params);
    if (distortion_out != nullptr)
      for (size_t y = 0; y < n; ++y) distortion_out[y] = result.distortion[y];
    if (value_out != nullptr) *value_out = result.value;
    if (entropy_out != nullptr) *entropy_out = result.entropy;
    if (kl_out != nullptr) *kl_out = result.kl_to_model;
    return ERC_OK;
  } catch (const erc::Error& e) {
    return status_from(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ERC_ERROR;
  }
}

}  // extern "C"
