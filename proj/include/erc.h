/* erc - entropic robust choice library.
 *
 * C interface to the scenario engine: penalized worst-case evaluation over
 * finite outcome spaces, misspecification-learning simulation, equilibrium
 * search, information-capacity inversion, and the packaged applications.
 *
 * Conventions:
 *   - every function returning erc_status reports ERC_OK (0) on success;
 *   - on failure, erc_last_error() holds a thread-local message;
 *   - erc_report is an opaque handle owned by the caller via erc_report_free;
 *   - strings returned from a report stay valid until the report is freed;
 *   - erc_preset_config returns a heap string released with erc_string_free.
 */
#ifndef ERC_H
#define ERC_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum erc_status {
  ERC_OK = 0,
  ERC_ERROR = 1,
  ERC_ERROR_CONFIG = 2,
  ERC_ERROR_PRECONDITION = 3,
  ERC_ERROR_CONVERGENCE = 4,
  ERC_ERROR_INTERNAL = 5
} erc_status;

typedef struct erc_report erc_report;

const char* erc_version(void);
const char* erc_last_error(void);

/* Runs a scenario described by a JSON config (see the README schema).
 * On success *out_report owns the JSON report and any CSV tables. */
erc_status erc_run_scenario(const char* config_json, erc_report** out_report);

const char* erc_report_json(const erc_report* report);
size_t erc_report_table_count(const erc_report* report);
const char* erc_report_table_name(const erc_report* report, size_t index);
const char* erc_report_table_csv(const erc_report* report, size_t index);
void erc_report_free(erc_report* report);

size_t erc_preset_count(void);
const char* erc_preset_name(size_t index);
char* erc_preset_config(const char* name);
void erc_string_free(char* text);

/* Direct evaluation of the penalized worst case for one payoff row:
 * distortion_out must hold n doubles. Requires mu < 1/lambda and a
 * full-support model. Outputs may be NULL when not wanted. */
erc_status erc_worst_case(size_t n, const double* u, const double* q, double lambda, double mu,
                          double* distortion_out, double* value_out, double* entropy_out,
                          double* kl_out);

#ifdef __cplusplus
}
#endif

#endif /* ERC_H */
