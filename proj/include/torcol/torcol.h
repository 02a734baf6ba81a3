#ifndef TORCOL_TORCOL_H
#define TORCOL_TORCOL_H

/* C interface to the torcol library. Handles are opaque; every fallible call
 * returns a torcol_status and leaves a message in torcol_last_error() (per
 * thread). Strings handed out by the library are freed with
 * torcol_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(TORCOL_BUILDING_LIBRARY)
#define TORCOL_API __attribute__((visibility("default")))
#else
#define TORCOL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum torcol_status {
  TORCOL_OK = 0,
  TORCOL_E_INVALID_ARGUMENT = 1,
  TORCOL_E_BUDGET_EXCEEDED = 2,
  TORCOL_E_IMPROPER_COLORING = 3,
  TORCOL_E_BAD_VALUE = 4,
  TORCOL_E_LENGTH_MISMATCH = 5,
  TORCOL_E_HYPOTHESIS_VIOLATED = 6,
  TORCOL_E_NOT_MIXED = 7,
  TORCOL_E_IO = 8,
  TORCOL_E_VERIFICATION_FAILED = 9,
  TORCOL_E_NOT_IN_IMAGE = 10,
  TORCOL_E_REDUCIBLE = 11,
  TORCOL_E_INTERNAL = 99
} torcol_status;

typedef enum torcol_phase { TORCOL_PHASE_BALANCED = 0, TORCOL_PHASE_EVEN = 1, TORCOL_PHASE_ODD = 2 } torcol_phase;

typedef struct torcol_torus torcol_torus;
typedef struct torcol_coloring torcol_coloring;

TORCOL_API const char* torcol_version(void);
TORCOL_API const char* torcol_last_error(void);
/* Stable lowercase name of a status, e.g. "budget_exceeded". */
TORCOL_API const char* torcol_status_name(torcol_status status);
TORCOL_API void torcol_string_free(char* s);

/* Torus T_{L,d}. */
TORCOL_API torcol_status torcol_torus_new(int side, int dim, torcol_torus** out);
TORCOL_API void torcol_torus_free(torcol_torus* t);
TORCOL_API size_t torcol_torus_size(const torcol_torus* t);
TORCOL_API int torcol_torus_side(const torcol_torus* t);
TORCOL_API int torcol_torus_dim(const torcol_torus* t);

/* Proper 3-colourings. colors has one entry in {0,1,2} per vertex, row-major. */
TORCOL_API torcol_status torcol_coloring_new(const torcol_torus* t, const uint8_t* colors, size_t len,
                                             torcol_coloring** out);
/* Colour 0 on the even (zero_on_odd = 0) or odd class, 1 elsewhere. */
TORCOL_API torcol_status torcol_coloring_ground_state(const torcol_torus* t, int zero_on_odd, torcol_coloring** out);
TORCOL_API torcol_status torcol_coloring_from_json(const char* text, torcol_coloring** out);
TORCOL_API torcol_status torcol_coloring_read_file(const char* path, torcol_coloring** out);
TORCOL_API torcol_status torcol_coloring_write_file(const torcol_coloring* c, const char* path);
TORCOL_API torcol_status torcol_coloring_to_json(const torcol_coloring* c, char** out);
TORCOL_API void torcol_coloring_free(torcol_coloring* c);
TORCOL_API size_t torcol_coloring_size(const torcol_coloring* c);
TORCOL_API torcol_status torcol_coloring_colors(const torcol_coloring* c, uint8_t* out, size_t len);
/* |I ∩ E| - |I ∩ O|. */
TORCOL_API int64_t torcol_coloring_imbalance(const torcol_coloring* c);
/* rho as text ("11/50" or "0.22"). */
TORCOL_API torcol_status torcol_coloring_classify(const torcol_coloring* c, const char* rho, torcol_phase* out);
/* Runs steps Metropolis steps from c with the given seed; *out is the final state. */
TORCOL_API torcol_status torcol_metropolis_run(const torcol_coloring* c, uint64_t seed, uint64_t steps,
                                               torcol_coloring** out);

/* Number of proper 3-colourings as a decimal string; method 0 enumerates,
 * method 1 uses the transfer matrix. */
TORCOL_API torcol_status torcol_count_colorings(int side, int dim, int method, uint64_t max_states, char** out);

/* Experiment drivers. Each takes a JSON config (with "schema_version": 1)
 * and returns a JSON report. */
TORCOL_API torcol_status torcol_run_enumerate(const char* config_json, char** report_json);
TORCOL_API torcol_status torcol_run_simulate(const char* config_json, char** report_json);
TORCOL_API torcol_status torcol_run_escape(const char* config_json, char** report_json);
/* Report is {"ok": bool, "first_witness": str, "lines": [...]}. When a hard
 * check fails the report is still set and the status is
 * TORCOL_E_VERIFICATION_FAILED. */
TORCOL_API torcol_status torcol_run_verify(const char* config_json, char** report_json);
/* Re-runs a simulate bundle; *hash_out receives the payload hash. */
TORCOL_API torcol_status torcol_replay_bundle(const char* bundle_dir, char** hash_out);
TORCOL_API torcol_status torcol_cutsets_report(const torcol_coloring* c, char** report_json);

#ifdef __cplusplus
}
#endif

#endif
