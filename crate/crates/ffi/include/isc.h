#ifndef ISC_H
#define ISC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Classification of a pair sequence, strictest first satisfied.
 */
typedef enum IscClass {
  ISC_CLASS_INVALID = 0,
  ISC_CLASS_PRESTRUCTURE = 1,
  ISC_CLASS_STABLE_PRESTRUCTURE = 2,
  ISC_CLASS_WITNESS_STRUCTURE = 3,
} IscClass;

/**
 * Properties decidable by [`isc_complex_check`].
 */
typedef enum IscProperty {
  ISC_PROPERTY_PURE = 0,
  ISC_PROPERTY_STRONGLY_CONNECTED = 1,
  ISC_PROPERTY_PSEUDOMANIFOLD = 2,
  ISC_PROPERTY_EULER_ONE = 3,
  ISC_PROPERTY_RECONSTRUCTION_INJECTIVE = 4,
} IscProperty;

/**
 * Result codes.
 */
typedef enum IscStatus {
  ISC_STATUS_OK = 0,
  ISC_STATUS_NULL_POINTER = 1,
  ISC_STATUS_INVALID_UTF8 = 2,
  ISC_STATUS_PARSE = 3,
  ISC_STATUS_INVALID_ARGUMENT = 4,
  ISC_STATUS_LIMIT_EXCEEDED = 5,
  ISC_STATUS_BUFFER_TOO_SMALL = 6,
  ISC_STATUS_PANIC = 7,
} IscStatus;

/**
 * Opaque handle to a built complex.
 */
typedef struct IscComplex IscComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *isc_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void isc_string_free(char *s);

/**
 * Builds `P(counter)`. `counter` is `"2,1,1"`, a JSON list or a JSON object
 * `{"pid": budget}`. Zero caps mean no cap.
 *
 * # Safety
 * `counter` must be a NUL-terminated string and `out` writable.
 */
enum IscStatus isc_complex_build(const char *counter,
                                 uint64_t max_cardinality,
                                 uint32_t max_processes,
                                 struct IscComplex **out);

/**
 * Releases a complex. Null is ignored.
 *
 * # Safety
 * `c` must come from [`isc_complex_build`] and not be freed twice.
 */
void isc_complex_free(struct IscComplex *c);

/**
 * Dimension of the complex (−1 if only the empty simplex).
 *
 * # Safety
 * `c` must be a live handle and `out` writable.
 */
enum IscStatus isc_complex_dimension(const struct IscComplex *c, int64_t *out);

/**
 * Number of simplices, the empty simplex included.
 *
 * # Safety
 * `c` must be a live handle and `out` writable.
 */
enum IscStatus isc_complex_len(const struct IscComplex *c, uint64_t *out);

/**
 * Writes `f_{-1}, f_0, …, f_d` into `buf`. `len` receives the number of
 * entries needed; [`IscStatus::BufferTooSmall`] is returned if `cap` is short.
 *
 * # Safety
 * `c` must be a live handle, `len` writable and `buf` valid for `cap` writes.
 */
enum IscStatus isc_complex_f_vector(const struct IscComplex *c,
                                    uint64_t *buf,
                                    size_t cap,
                                    size_t *len);

/**
 * Euler characteristic `Σ_{d≥0} (−1)^d f_d`.
 *
 * # Safety
 * `c` must be a live handle and `out` writable.
 */
enum IscStatus isc_complex_euler(const struct IscComplex *c, int64_t *out);

/**
 * JSON export; free the result with [`isc_string_free`].
 *
 * # Safety
 * `c` must be a live handle and `out` writable.
 */
enum IscStatus isc_complex_to_json(const struct IscComplex *c, char **out);

/**
 * Graphviz facet adjacency graph; free the result with [`isc_string_free`].
 *
 * # Safety
 * `c` must be a live handle and `out` writable.
 */
enum IscStatus isc_complex_to_dot(const struct IscComplex *c, char **out);

/**
 * Decides `property` on the complex.
 *
 * # Safety
 * `c` must be a live handle and `holds` writable.
 */
enum IscStatus isc_complex_check(const struct IscComplex *c,
                                 enum IscProperty property,
                                 bool *holds);

/**
 * Facet count of `P(counter)` as a decimal string, computed without
 * building the complex. Free the result with [`isc_string_free`].
 *
 * # Safety
 * `counter` must be a NUL-terminated string and `out` writable.
 */
enum IscStatus isc_count_facets(const char *counter, char **out);

/**
 * Classifies a pair sequence written `w|g;w|g;…`.
 *
 * # Safety
 * `key` must be a NUL-terminated string and `out` writable.
 */
enum IscStatus isc_classify(const char *key, enum IscClass *out);

/**
 * Face of the witness structure `key` with the processes in `set` removed.
 * Free the result with [`isc_string_free`].
 *
 * # Safety
 * `key` must be a NUL-terminated string, `set` valid for `set_len` reads
 * (or null with `set_len == 0`) and `out` writable.
 */
enum IscStatus isc_ghost(const char *key, const uint32_t *set, size_t set_len, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ISC_H */
