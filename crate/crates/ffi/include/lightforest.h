/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef LIGHTFOREST_H
#define LIGHTFOREST_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LfAlgorithm {
  LF_ALGORITHM_MEMBER_ONLY = 0,
  LF_ALGORITHM_GRDP_LT = 1,
  LF_ALGORITHM_GRDP_LH = 2,
} LfAlgorithm;

// Result code of every fallible call.
typedef enum LfStatus {
  LF_STATUS_OK = 0,
  LF_STATUS_NULL_POINTER = 1,
  LF_STATUS_INVALID_UTF8 = 2,
  LF_STATUS_PARSE = 3,
  LF_STATUS_UNKNOWN_TOPOLOGY = 4,
  LF_STATUS_UNKNOWN_NODE = 5,
  LF_STATUS_INVALID_SESSION = 6,
  LF_STATUS_INFEASIBLE = 7,
  LF_STATUS_BLOCKED = 8,
  LF_STATUS_BUFFER_TOO_SMALL = 9,
  LF_STATUS_INVALID_ARGUMENT = 10,
  LF_STATUS_PANIC = 11,
} LfStatus;

// Opaque routed light-forest, with the network and session it was built for.
typedef struct LfForest LfForest;

// Opaque network handle.
typedef struct LfNetwork LfNetwork;

// Opaque per-fiber wavelength occupancy.
typedef struct LfWavelengthState LfWavelengthState;

typedef struct LfMetrics {
  uint32_t link_stress;
  double total_cost;
  double average_delay;
  uint32_t diameter;
  uint32_t structure_count;
} LfMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses topology-file text into a new network.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum LfStatus lf_network_load(const char *text, struct LfNetwork **out);

// Loads a bundled topology: `nsf`, `longhaul` or `cost239`.
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum LfStatus lf_network_builtin(const char *name, struct LfNetwork **out);

// Number of nodes, or 0 for a null handle.
//
// # Safety
// `net` must be null or a live handle.
size_t lf_network_node_count(const struct LfNetwork *net);

// Makes exactly the `len` listed nodes multicast capable.
//
// # Safety
// `net` must be a live handle; `ids` must point to `len` values.
enum LfStatus lf_network_set_mc(struct LfNetwork *net, const uint32_t *ids, size_t len);

// # Safety
// `net` must be null or a handle not yet freed.
void lf_network_free(struct LfNetwork *net);

// Routes a session. `order` lists destinations in tie-break priority;
// pass `order_len = 0` for smallest-id-first.
//
// # Safety
// `net` must be a live handle, `dests` and `order` must point to the
// given number of values, and `out` must be valid.
enum LfStatus lf_route(const struct LfNetwork *net,
                       uint32_t source,
                       const uint32_t *dests,
                       size_t dests_len,
                       enum LfAlgorithm algorithm,
                       const uint32_t *order,
                       size_t order_len,
                       struct LfForest **out);

// Number of light-structures, or 0 for a null handle.
//
// # Safety
// `forest` must be null or a live handle.
size_t lf_forest_structure_count(const struct LfForest *forest);

// # Safety
// `forest` must be a live handle and `out` valid.
enum LfStatus lf_forest_metrics(const struct LfForest *forest, struct LfMetrics *out);

// Writes the text form of every structure into `buf` (NUL-terminated).
// `needed` receives the byte count including the NUL; when `capacity` is
// too small nothing is written and `LF_STATUS_BUFFER_TOO_SMALL` is returned.
//
// # Safety
// `forest` must be live, `buf` must hold `capacity` bytes (or be null with
// `capacity = 0`), and `needed` must be valid.
enum LfStatus lf_forest_serialize(const struct LfForest *forest,
                                  char *buf,
                                  size_t capacity,
                                  size_t *needed);

// Text form of the forest as a new string, released with [`lf_string_free`].
//
// # Safety
// `forest` must be live and `out` valid.
enum LfStatus lf_forest_to_string(const struct LfForest *forest, char **out);

// # Safety
// `s` must be null or a string returned by this library and not yet freed.
void lf_string_free(char *s);

// # Safety
// `forest` must be null or a handle not yet freed.
void lf_forest_free(struct LfForest *forest);

// Empty occupancy for `net`; `wavelengths = 0` uses the network's own count.
//
// # Safety
// `net` must be live and `out` valid.
enum LfStatus lf_wavelength_state_new(const struct LfNetwork *net,
                                      uint32_t wavelengths,
                                      struct LfWavelengthState **out);

// First-Fit admission of the whole forest. On success one 1-based index per
// structure is written to `indices`; when blocked the state is unchanged.
//
// # Safety
// `state` and `forest` must be live; `indices` must hold `capacity` values.
enum LfStatus lf_wavelength_state_first_fit(struct LfWavelengthState *state,
                                            const struct LfForest *forest,
                                            uint32_t *indices,
                                            size_t capacity);

// # Safety
// `state` must be null or a handle not yet freed.
void lf_wavelength_state_free(struct LfWavelengthState *state);

// Description of the last failure on this thread (empty after a success).
// The pointer stays valid until the next library call on this thread.
const char *lf_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LIGHTFOREST_H */
