#ifndef GRHOM_H
#define GRHOM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GrhomStatus {
  GRHOM_STATUS_OK = 0,
  GRHOM_STATUS_NULL_ARGUMENT = 1,
  GRHOM_STATUS_INVALID_UTF8 = 2,
  GRHOM_STATUS_PARSE = 3,
  GRHOM_STATUS_SCRIPT = 4,
  GRHOM_STATUS_MATH = 5,
  GRHOM_STATUS_BUFFER_TOO_SMALL = 6,
  GRHOM_STATUS_PANIC = 7,
} GrhomStatus;

// A bounded complex of graded modules.
typedef struct GrhomComplex GrhomComplex;

// A graded ring: a polynomial ring over GF(p), possibly modulo an ideal.
typedef struct GrhomRing GrhomRing;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next `grhom_*` call on this thread.
const char *grhom_last_error(void);

// Polynomial ring GF(`prime`)[x0, .., x{nvars-1}].
//
// # Safety
// `out` must be a valid pointer to writable storage.
enum GrhomStatus grhom_ring_new(uint64_t prime, size_t nvars, struct GrhomRing **out);

// Quotient of `ring` by the homogeneous polynomials `gens[0..n]`, written
// in the variables x0, x1, ...
//
// # Safety
// `ring` must be a live handle, `gens` must hold `n` NUL-terminated strings
// and `out` must be writable.
enum GrhomStatus grhom_ring_quotient(const struct GrhomRing *ring,
                                     const char *const *gens,
                                     size_t n,
                                     struct GrhomRing **out);

// # Safety
// `ring` must be null or a handle not yet freed.
void grhom_ring_free(struct GrhomRing *ring);

// The line bundle O(`d`) as a complex in degree 0.
//
// # Safety
// `ring` must be a live handle and `out` writable.
enum GrhomStatus grhom_line_bundle(const struct GrhomRing *ring,
                                   int32_t d,
                                   struct GrhomComplex **out);

// Koszul complex on `polys_in[0..n]`, ending in degree 0.
//
// # Safety
// `ring` must be a live handle, `polys_in` must hold `n` NUL-terminated
// strings and `out` must be writable.
enum GrhomStatus grhom_koszul(const struct GrhomRing *ring,
                              const char *const *polys_in,
                              size_t n,
                              struct GrhomComplex **out);

// `c[i]`.
//
// # Safety
// `c` must be a live handle and `out` writable.
enum GrhomStatus grhom_complex_shift(const struct GrhomComplex *c,
                                     int32_t i,
                                     struct GrhomComplex **out);

// `c(d)`.
//
// # Safety
// `c` must be a live handle and `out` writable.
enum GrhomStatus grhom_complex_twist(const struct GrhomComplex *c,
                                     int32_t d,
                                     struct GrhomComplex **out);

// # Safety
// `c` must be null or a handle not yet freed.
void grhom_complex_free(struct GrhomComplex *c);

// Writes dim Ext^m(c, d) for m in `lo..=hi` into `dims[0..hi-lo+1]`.
//
// # Safety
// `c` and `d` must be live handles; `dims` must have room for `len` entries.
enum GrhomStatus grhom_ext_dims(const struct GrhomComplex *c,
                                const struct GrhomComplex *d,
                                int32_t lo,
                                int32_t hi,
                                size_t *dims,
                                size_t len);

// dim H^m(X, F(v)) for the complex `f`.
//
// # Safety
// `f` must be a live handle and `dim` writable.
enum GrhomStatus grhom_sheaf_cohomology(const struct GrhomComplex *f,
                                        int32_t m,
                                        int32_t v,
                                        size_t *dim);

// Runs a `.gx` script and returns its JSON report in `*json`, to be released
// with [`grhom_string_free`]. A `prime` of 0 keeps the script's own prime.
//
// # Safety
// `script` must be NUL-terminated and `json` writable.
enum GrhomStatus grhom_run_script(const char *script, uint64_t prime, char **json);

// # Safety
// `s` must be null or a string returned by this library and not yet freed.
void grhom_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRHOM_H */
