/* C interface of the fluxladder triangular-ladder Bose-Hubbard simulator.
 *
 * All functions return fl_status (FL_OK on success); on failure the
 * thread-local message from fl_last_error() describes what went wrong.
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function.  Strings returned through char** are allocated
 * by the library and must be released with fl_string_free.
 */
#ifndef FLUXLADDER_C_H
#define FLUXLADDER_C_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fl_status {
    FL_OK = 0,
    FL_ERR_INVALID_ARGUMENT = 1,
    FL_ERR_DIMENSION_MISMATCH = 2,
    FL_ERR_NON_MEASURABLE_PAIR = 3,
    FL_ERR_CONFIG = 4,
    FL_ERR_IO = 5,
    FL_ERR_NUMERIC = 6,
    FL_ERR_BAD_HANDLE = 7,
    FL_ERR_INTERNAL = 8
} fl_status;

const char* fl_version(void);

/* Message for the most recent failure on this thread; never NULL. */
const char* fl_last_error(void);

void fl_string_free(char* s);

/* ---- configuration ---------------------------------------------------- */

typedef struct fl_config fl_config;

fl_status fl_config_load(const char* path, fl_config** out);
fl_status fl_config_parse(const char* json_text, fl_config** out);
fl_status fl_config_default(fl_config** out);
fl_status fl_config_set_seed(fl_config* cfg, uint64_t seed);
fl_status fl_config_set_shots(fl_config* cfg, uint64_t shots);
fl_status fl_config_set_threads(fl_config* cfg, int threads);
fl_status fl_config_set_output_dir(fl_config* cfg, const char* dir);
fl_status fl_config_hash(const fl_config* cfg, char** hex_out);
void fl_config_free(fl_config* cfg);

/* ---- orchestration (the CLI subcommands) ------------------------------ */

/* Each writes artifacts under the config's output directory and returns a
 * JSON summary. */
fl_status fl_run_ground(const fl_config* cfg, char** summary_json);
fl_status fl_run_ramp(const fl_config* cfg, char** summary_json);
fl_status fl_run_measure(const fl_config* cfg, char** summary_json);
fl_status fl_run_sweep(const fl_config* cfg, char** summary_json);
/* reports_dir may be NULL to read reports from the config output dir. */
fl_status fl_run_figures(const fl_config* cfg, const char* reports_dir, char** summary_json);

/* Runs the invariant battery; cfg may be NULL for the built-in default.
 * n_failed receives the number of failed checks (0 == all pass). */
fl_status fl_run_verify(const fl_config* cfg, char** report_json, int* n_failed);

/* Same battery with the config file load as its first check: a config that
 * violates the schema or a model invariant reports a failed check rather
 * than an error status. */
fl_status fl_run_verify_file(const char* config_path, char** report_json, int* n_failed);

/* ---- direct model access ---------------------------------------------- */

typedef struct fl_lattice fl_lattice; /* lattice spec + fixed-number basis */
typedef struct fl_state fl_state;

/* omega and u have n_sites entries, j_rung n_sites-1, j_leg n_sites-2; all
 * angular frequencies in rad/s.  total is the particle-number sector. */
fl_status fl_lattice_create(int n_sites, int total, int n_max, const double* omega,
                            const double* u, const double* j_rung, const double* j_leg,
                            double flux, fl_lattice** out);
void fl_lattice_free(fl_lattice* lat);
fl_status fl_lattice_dim(const fl_lattice* lat, uint64_t* dim_out);

/* Hamiltonian triplet text, one "row col re im" line per entry. */
fl_status fl_lattice_hamiltonian_triplets(const fl_lattice* lat, char** text_out);

fl_status fl_ground_state(const fl_lattice* lat, fl_state** out, double* energy_out);
fl_status fl_top_state(const fl_lattice* lat, fl_state** out, double* energy_out);
void fl_state_free(fl_state* st);

/* Exact observable report (JSON; see docs/outputs.md). */
fl_status fl_state_observables_json(const fl_lattice* lat, const fl_state* st, char** json_out);

/* Exact rung current in rad/s, 1-based rung. */
fl_status fl_state_current(const fl_lattice* lat, const fl_state* st, int rung, double* out);

/* Exact G(i,j); rungs sharing a site yield FL_ERR_NON_MEASURABLE_PAIR. */
fl_status fl_state_current_correlation(const fl_lattice* lat, const fl_state* st, int rung_i,
                                       int rung_j, double* out);

/* Emulated measurement: plan_json holds one plan object (docs/config.md);
 * returns the shot table as "bitstring,count" CSV. */
fl_status fl_sample_csv(const fl_lattice* lat, const fl_state* st, const char* plan_json,
                        char** csv_out);

#ifdef __cplusplus
}
#endif

#endif /* FLUXLADDER_C_H */
