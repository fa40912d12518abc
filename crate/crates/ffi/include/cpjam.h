#ifndef CPJAM_H
#define CPJAM_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Outcome of an API call.
typedef enum CpjamStatus {
  CPJAM_STATUS_OK = 0,
  CPJAM_STATUS_NULL_POINTER = 1,
  CPJAM_STATUS_INVALID_UTF8 = 2,
  // Invalid scenario or argument.
  CPJAM_STATUS_CONFIG = 3,
  CPJAM_STATUS_DIMENSION = 4,
  CPJAM_STATUS_FRAMING = 5,
  // The requested estimate is not identifiable from the data.
  CPJAM_STATUS_ILL_POSED = 6,
  CPJAM_STATUS_IO = 7,
  CPJAM_STATUS_JSON = 8,
  // A caller-provided buffer is too short.
  CPJAM_STATUS_BUFFER_TOO_SMALL = 9,
  CPJAM_STATUS_INDEX_OUT_OF_RANGE = 10,
  CPJAM_STATUS_PANIC = 11,
} CpjamStatus;

typedef enum CpjamJammerMode {
  CPJAM_JAMMER_MODE_NONE = 0,
  CPJAM_JAMMER_MODE_COMPLIANT = 1,
  CPJAM_JAMMER_MODE_VIOLATING = 2,
} CpjamJammerMode;

typedef enum CpjamSubspaceMode {
  CPJAM_SUBSPACE_MODE_GENIE = 0,
  CPJAM_SUBSPACE_MODE_ESTIMATED = 1,
} CpjamSubspaceMode;

typedef enum CpjamFractionKind {
  // `sigma_b / sum(sigma)`
  CPJAM_FRACTION_KIND_SINGULAR = 0,
  // `sigma_b^2 / sum(sigma^2)`
  CPJAM_FRACTION_KIND_ENERGY = 1,
} CpjamFractionKind;

// Opaque BER sweep result.
typedef struct CpjamResult CpjamResult;

// Opaque simulation scenario.
typedef struct CpjamScenario CpjamScenario;

// One point of a BER curve.
typedef struct CpjamBerPoint {
  double snr_db;
  uint64_t bits;
  uint64_t bit_errors;
  double ber;
} CpjamBerPoint;

// Outcome of a noise-free rank study for one receiver/jammer layout.
typedef struct CpjamRankSummary {
  size_t expected_rank;
  size_t draws;
  size_t conforming_draws;
  size_t min_rank;
  size_t max_rank;
} CpjamRankSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *cpjam_last_error(void);

// Library version as a static NUL-terminated string.
const char *cpjam_version(void);

// Creates a scenario with default settings. Release it with
// [`cpjam_scenario_free`].
//
// # Safety
// `out` must be a valid pointer to writable storage for one pointer.
enum CpjamStatus cpjam_scenario_new(struct CpjamScenario **out);

// Parses a JSON scenario; missing fields take default values.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum CpjamStatus cpjam_scenario_from_json(const char *json, struct CpjamScenario **out);

// Reads a JSON scenario file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum CpjamStatus cpjam_scenario_from_file(const char *path, struct CpjamScenario **out);

// # Safety
// `sc` must be NULL or a scenario returned by this library and not yet freed.
void cpjam_scenario_free(struct CpjamScenario *sc);

// Switches the jammer type; tap counts default to the scenario's jammer tap count.
//
// # Safety
// `sc` must be a valid scenario.
enum CpjamStatus cpjam_scenario_set_jammer(struct CpjamScenario *sc, enum CpjamJammerMode mode);

// # Safety
// `sc` must be a valid scenario.
enum CpjamStatus cpjam_scenario_set_null_dims(struct CpjamScenario *sc, size_t null_dims);

// # Safety
// `sc` must be a valid scenario and `snr_db` must point to `len` values.
enum CpjamStatus cpjam_scenario_set_snr_grid(struct CpjamScenario *sc,
                                             const double *snr_db,
                                             size_t len);

// # Safety
// `sc` must be a valid scenario.
enum CpjamStatus cpjam_scenario_set_blocks(struct CpjamScenario *sc, uint64_t blocks);

// # Safety
// `sc` must be a valid scenario.
enum CpjamStatus cpjam_scenario_set_seed(struct CpjamScenario *sc, uint64_t seed);

// # Safety
// `sc` must be a valid scenario.
enum CpjamStatus cpjam_scenario_set_subspace(struct CpjamScenario *sc, enum CpjamSubspaceMode mode);

// Receive antenna count of the scenario, or 0 for a NULL scenario.
//
// # Safety
// `sc` must be NULL or a valid scenario.
size_t cpjam_scenario_antennas(const struct CpjamScenario *sc);

// Serializes the scenario to JSON. Release the string with
// [`cpjam_string_free`].
//
// # Safety
// `sc` must be a valid scenario and `out` a valid pointer.
enum CpjamStatus cpjam_scenario_to_json(const struct CpjamScenario *sc, char **out);

// # Safety
// `s` must be NULL or a string returned by this library and not yet freed.
void cpjam_string_free(char *s);

// Runs the BER sweep of `sc`. `threads == 0` uses the default worker
// pool. Results do not depend on the thread count.
//
// # Safety
// `sc` must be a valid scenario and `out` a valid pointer.
enum CpjamStatus cpjam_simulate(const struct CpjamScenario *sc,
                                size_t threads,
                                struct CpjamResult **out);

// # Safety
// `res` must be NULL or a result returned by this library and not yet freed.
void cpjam_result_free(struct CpjamResult *res);

// Number of SNR points, or 0 for a NULL result.
//
// # Safety
// `res` must be NULL or a valid result.
size_t cpjam_result_len(const struct CpjamResult *res);

// # Safety
// `res` must be a valid result and `out` a valid pointer.
enum CpjamStatus cpjam_result_point(const struct CpjamResult *res,
                                    size_t index,
                                    struct CpjamBerPoint *out);

// Writes the result as a BER CSV file.
//
// # Safety
// `res` must be a valid result and `path` a NUL-terminated string.
enum CpjamStatus cpjam_result_write_csv(const struct CpjamResult *res, const char *path);

// Noise-free interference rank over `draws` random draws for a violating
// jammer with `jammer_antennas` antennas whose channels have the given tap
// counts, seen by `b_antennas` receive antennas.
//
// # Safety
// `taps` must point to `jammer_antennas` values and `out` must be valid.
enum CpjamStatus cpjam_rank_study(size_t b_antennas,
                                  const size_t *taps,
                                  size_t jammer_antennas,
                                  size_t draws,
                                  uint64_t seed,
                                  struct CpjamRankSummary *out);

// Mean and standard deviation of the ordered interference fractions of
// `sc`, over its blocks and data subcarriers. `noise_free` ignores
// `snr_db`. `mean` and `std` must each hold at least `len` values with
// `len >= cpjam_scenario_antennas(sc)`; `written` receives the count used.
//
// # Safety
// All pointers must be valid for the stated lengths.
enum CpjamStatus cpjam_fractions(const struct CpjamScenario *sc,
                                 bool noise_free,
                                 double snr_db,
                                 enum CpjamFractionKind kind,
                                 double *mean,
                                 double *std,
                                 size_t len,
                                 size_t *written);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CPJAM_H */
