#ifndef FINSLER_H
#define FINSLER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every call. Zero is success.
typedef enum FinslerStatus {
  FINSLER_STATUS_OK = 0,
  FINSLER_STATUS_NULL_POINTER = 1,
  FINSLER_STATUS_INVALID_UTF8 = 2,
  // Malformed JSON or an unparsable coefficient.
  FINSLER_STATUS_PARSE = 3,
  // Sizes, variable counts or symmetry disagree.
  FINSLER_STATUS_SHAPE = 4,
  // The certificate was read and checked, and its identity does not hold.
  FINSLER_STATUS_MISMATCH = 5,
  // A non-finite input or an eigenvalue iteration that did not converge.
  FINSLER_STATUS_NUMERIC = 6,
  FINSLER_STATUS_INTERNAL = 7,
} FinslerStatus;

// Opaque certificate of any supported kind.
typedef struct FinslerCertificate FinslerCertificate;

// Opaque symmetric matrix polynomial.
typedef struct FinslerMatPoly FinslerMatPoly;

// Open interval `(lo, hi)`; infinite ends are `±INFINITY`. When `empty`
// is nonzero the endpoints carry no meaning.
typedef struct FinslerInterval {
  int32_t empty;
  double lo;
  double hi;
  // Nonzero when roots nearly collide or the cell scan was inconsistent.
  int32_t low_confidence;
} FinslerInterval;

// First entry where a certificate identity fails; indices are one-based.
typedef struct FinslerMismatch {
  size_t row;
  size_t col;
} FinslerMismatch;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failing call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *finsler_last_error(void);

// Parses `{"n": .., "d": .., "entries": [[{"d": .., "terms": [{"exp": [..], "coef": ".."}]}]]}`
// into a new handle.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum FinslerStatus finsler_matpoly_from_json(const char *json, struct FinslerMatPoly **out);

// # Safety
// `m` must be null or a handle from [`finsler_matpoly_from_json`] not yet freed.
void finsler_matpoly_free(struct FinslerMatPoly *m);

// Matrix size and number of variables.
//
// # Safety
// `m` must be a live handle; `n` and `nvars` valid pointers.
enum FinslerStatus finsler_matpoly_shape(const struct FinslerMatPoly *m, size_t *n, size_t *nvars);

// `{r : F - r G ≻ 0}` for constant `n×n` matrices given row-major.
//
// # Safety
// `fa` and `ga` must each hold `n * n` doubles; `out` must be valid.
enum FinslerStatus finsler_interval_constant(size_t n,
                                             const double *fa,
                                             const double *ga,
                                             double tol,
                                             struct FinslerInterval *out);

// Section `{r : F(a) - r G(a) ≻ 0}` of two matrix polynomials at `point`.
//
// # Safety
// `f`, `g` must be live handles, `point` must hold `len` doubles and `out`
// must be valid.
enum FinslerStatus finsler_section_at(const struct FinslerMatPoly *f,
                                      const struct FinslerMatPoly *g,
                                      const double *point,
                                      size_t len,
                                      double tol,
                                      struct FinslerInterval *out);

// Parses a certificate (`{"kind": "wqm" | "og" | "ideal" | "chain", ..}`).
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum FinslerStatus finsler_certificate_from_json(const char *json, struct FinslerCertificate **out);

// # Safety
// `c` must be null or a handle from [`finsler_certificate_from_json`] not yet freed.
void finsler_certificate_free(struct FinslerCertificate *c);

// Checks the certificate identity exactly. `f` may be null for chain
// certificates, which carry their own target. On `Mismatch`, `mismatch`
// (when non-null) receives the first failing entry.
//
// # Safety
// `cert` must be a live handle, `f` null or live, `gs` must hold `ngs`
// live handles, and `mismatch` must be null or valid.
enum FinslerStatus finsler_certificate_verify(const struct FinslerCertificate *cert,
                                              const struct FinslerMatPoly *f,
                                              const struct FinslerMatPoly *const *gs,
                                              size_t ngs,
                                              struct FinslerMismatch *mismatch);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FINSLER_H */
