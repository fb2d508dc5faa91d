#ifndef SURGELENS_H
#define SURGELENS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SlOutcome {
  SL_OUTCOME_LENS = 0,
  SL_OUTCOME_NOT_LENS = 1,
  SL_OUTCOME_NOT_CYCLIC_H1 = 2,
  SL_OUTCOME_OUT_OF_TABLE_RANGE = 3,
} SlOutcome;

typedef enum SlStatus {
  SL_STATUS_OK = 0,
  SL_STATUS_NULL_POINTER = 1,
  SL_STATUS_INVALID_UTF8 = 2,
  SL_STATUS_PARSE = 3,
  SL_STATUS_BAD_ARITY = 4,
  SL_STATUS_NOT_CYCLIC = 5,
  SL_STATUS_PRECONDITION = 6,
  SL_STATUS_ARITHMETIC = 7,
  SL_STATUS_PANIC = 8,
} SlStatus;

// Opaque surgery spec: a link plus one slope per component.
typedef struct SlSpec SlSpec;

// A classification. `lens_p`, `lens_q` and `lens_case` are zero unless
// `outcome` is `SL_OUTCOME_LENS`.
typedef struct SlVerdict {
  enum SlOutcome outcome;
  uint64_t lens_p;
  int64_t lens_q;
  uint8_t lens_case;
} SlVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer is
// valid until the next call into the library on the same thread.
const char *sl_last_error(void);

// Library version as a static NUL-terminated string.
const char *sl_version(void);

// # Safety
// `s` must come from this library and not have been freed.
void sl_string_free(char *s);

// Builds a spec from a family name (`milnor3`, `milnor`, `whitehead`,
// `brunnian_type`) and a slope list such as `"1/1,1/1,7/1"`. `f` may be
// NULL unless the family is `brunnian_type`; `components` is ignored where
// the family fixes it.
//
// # Safety
// String arguments must be NUL-terminated or NULL where allowed; `out` must
// be writable.
enum SlStatus sl_spec_new(const char *family,
                          size_t components,
                          int64_t twists,
                          const char *f,
                          const char *slopes,
                          struct SlSpec **out);

// Builds a spec from `{"link": {...}, "slopes": [...]}`.
//
// # Safety
// `json` must be NUL-terminated; `out` must be writable.
enum SlStatus sl_spec_from_json(const char *json, struct SlSpec **out);

// # Safety
// `spec` must come from this library and not have been freed, or be NULL.
void sl_spec_free(struct SlSpec *spec);

// Number of link components.
//
// # Safety
// `spec` must be a live handle or NULL (which gives 0).
size_t sl_spec_components(const struct SlSpec *spec);

// Order of `H_1` when it is finite cyclic of order at least 2, else 0.
//
// # Safety
// `spec` must be a live handle or NULL (which gives 0).
uint64_t sl_spec_h1_order(const struct SlSpec *spec);

// # Safety
// `spec` must be a live handle and `out` writable.
enum SlStatus sl_classify(const struct SlSpec *spec, struct SlVerdict *out);

// The classification as JSON; free with [`sl_string_free`].
//
// # Safety
// `spec` must be a live handle and `out` writable.
enum SlStatus sl_classify_json(const struct SlSpec *spec, char **out);

// Obstruction pipeline verdict for component `k` (1-based) as JSON.
//
// # Safety
// `spec` must be a live handle and `out` writable.
enum SlStatus sl_obstruct_json(const struct SlSpec *spec, size_t k, char **out);

// Canonical representative of `L(p, q)`.
//
// # Safety
// `p_out` and `q_out` must be writable.
enum SlStatus sl_lens_canonical(int64_t p, int64_t q, uint64_t *p_out, int64_t *q_out);

// Field norm of `Σ coeffs[i] ζ_d^i` as a decimal rational string
// (`"3"`, `"-1"`, `"5/7"`).
//
// # Safety
// `coeffs` must point to `len` readable values (or be NULL with `len` 0);
// `out` must be writable.
enum SlStatus sl_d_norm(uint64_t d, const int64_t *coeffs, size_t len, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SURGELENS_H */
