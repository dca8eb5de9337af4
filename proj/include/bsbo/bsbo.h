/* C API for the BSBO library: batched stochastic Bayesian optimization
 * over combinatorial constraint designs.
 *
 * All entry points return a status code; 0 means success. On failure the
 * thread-local message from bsbo_last_error() describes what went wrong.
 * Objects returned through out-parameters are owned by the caller and
 * released with the matching free function.
 */
#ifndef BSBO_BSBO_H
#define BSBO_BSBO_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; they double as the CLI exit codes. */
#define BSBO_OK 0
#define BSBO_ERR_CONFIG 1
#define BSBO_ERR_DATA 2
#define BSBO_ERR_NUMERIC 3
#define BSBO_ERR_VALIDATION 4

/* Opaque full-factorial fitness table (ground set + values + metadata). */
typedef struct bsbo_table bsbo_table;

const char* bsbo_version(void);

/* Thread-local message for the most recent failing call on this thread. */
const char* bsbo_last_error(void);

const char* bsbo_status_name(int status);

/* Frees a string returned through a char** out-parameter. */
void bsbo_string_free(char* text);

/* Loads a `sequence,fitness` CSV; the optional `<name>.meta.json` sidecar
 * supplies alphabets and the wild type. */
int bsbo_table_load(const char* csv_path, bsbo_table** out_table);

/* Builds the blocky synthetic landscape; spec_json NULL or empty selects
 * the default three-block 26x26 spec. */
int bsbo_table_synthetic(const char* spec_json, bsbo_table** out_table);

/* The fully resolved synthetic spec (defaults materialized) as JSON. */
int bsbo_synthetic_resolve_spec(const char* spec_json, char** out_json);

int bsbo_table_save(const bsbo_table* table, const char* csv_path);

void bsbo_table_free(bsbo_table* table);

int bsbo_table_num_items(const bsbo_table* table, uint64_t* out_count);
int bsbo_table_num_sites(const bsbo_table* table, int* out_sites);
int bsbo_table_fitness(const bsbo_table* table, uint64_t item_index, double* out_value);
int bsbo_table_missing_count(const bsbo_table* table, uint64_t* out_count);

/* Ground-set header ({"sites": L, "alphabets": [...]}) as JSON. */
int bsbo_table_ground_json(const bsbo_table* table, char** out_json);

/* In-place log1p transform of the fitness values. */
int bsbo_table_log1p(bsbo_table* table);

/* Runs a full simulated campaign and writes report.json, the plot-ready
 * CSVs and resolved_config.json into out_dir. When out_report_json is
 * non-NULL it receives the report document. */
int bsbo_simulate(const bsbo_table* table, const char* config_json, const char* out_dir,
                  char** out_report_json);

/* Single between-rounds constraint design from an observations CSV
 * (`sequence,value` or `sequence,fitness`). The chosen constraints are
 * returned as JSON; out_dir (optional) receives resolved_config.json. */
int bsbo_design(const char* observations_csv_path, const char* config_json, const char* out_dir,
                char** out_result_json);

/* Surrogate-versus-Monte-Carlo comparison; writes compare_objectives.csv
 * and resolved_config.json into out_dir. */
int bsbo_compare_objectives(const bsbo_table* table, const char* config_json, const char* out_dir,
                            char** out_csv);

/* Brute-force decomposition property battery (identity, submodularity,
 * bound dominance, beta diagnostics). Returns BSBO_ERR_VALIDATION when a
 * mandatory check fails. out_dir (optional) receives the dump CSV and the
 * pass/fail table; out_table_text (optional) receives the rendered table. */
int bsbo_validate_decomposition(const char* config_json, const char* out_dir,
                                char** out_table_text);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BSBO_BSBO_H */
