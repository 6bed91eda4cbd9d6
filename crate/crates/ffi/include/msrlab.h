#ifndef MSRLAB_H
#define MSRLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MsrStatus {
  MSR_STATUS_OK = 0,
  // The code or scheme fails a checked property.
  MSR_STATUS_VIOLATION = 1,
  // Malformed text, bad arguments or out-of-range values.
  MSR_STATUS_INVALID_INPUT = 2,
  // An internal consistency check failed.
  MSR_STATUS_INTERNAL = 3,
  MSR_STATUS_NULL_POINTER = 4,
  // The output buffer is too small.
  MSR_STATUS_BUFFER_TOO_SMALL = 5,
} MsrStatus;

// Opaque code handle, optionally carrying a repair scheme.
typedef struct MsrCode MsrCode;

typedef struct MsrParams {
  size_t n;
  size_t k;
  size_t r;
  size_t l;
  // Field characteristic.
  uint32_t p;
  // Extension degree.
  uint32_t m;
  bool has_scheme;
} MsrParams;

typedef struct MsrVerifyResult {
  bool mds_ok;
  size_t blocks_checked;
  // False when the handle has no scheme.
  bool has_scheme;
  bool repair_ok;
  size_t violations;
} MsrVerifyResult;

typedef struct MsrBounds {
  uint64_t t;
  uint64_t lambda;
  bool lambda_exact;
  uint64_t quadratic_floor;
  double rlog_real;
  uint64_t rlog_floor;
  double prior_log_real;
  uint64_t prior_log_floor;
} MsrBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Last error message on this thread, or null. Valid until the next call
// into the library from the same thread.
const char *msr_last_error(void);

// Parse `msrcode v1` text into a new handle stored in `*out`.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum MsrStatus msr_code_parse(const char *text, struct MsrCode **out);

// Release a handle. Null is ignored.
//
// # Safety
// `code` must come from [`msr_code_parse`] and not be used afterwards.
void msr_code_free(struct MsrCode *code);

// # Safety
// `code` and `out` must be valid pointers.
enum MsrStatus msr_code_params(const struct MsrCode *code, struct MsrParams *out);

// MDS check plus scheme verification. Returns `Violation` when either
// fails; `*out` is filled in both cases.
//
// # Safety
// `code` and `out` must be valid pointers.
enum MsrStatus msr_code_verify(const struct MsrCode *code, struct MsrVerifyResult *out);

// Encode `k*l` data values (node-major) into `r*l` parity values.
//
// # Safety
// `data` must hold `data_len` values and `out` room for `out_len`.
enum MsrStatus msr_code_encode(const struct MsrCode *code,
                               const uint32_t *data,
                               size_t data_len,
                               uint32_t *out,
                               size_t out_len);

// Encode `data`, erase systematic node `node`, rebuild it from helper
// downloads and write its `l` values to `out`. `*downloaded` receives the
// number of symbols transferred.
//
// # Safety
// Pointers must be valid for the stated lengths; `downloaded` may be null.
enum MsrStatus msr_code_repair(const struct MsrCode *code,
                               size_t node,
                               const uint32_t *data,
                               size_t data_len,
                               uint32_t *out,
                               size_t out_len,
                               size_t *downloaded);

// Canonical text of the handle; free with [`msr_string_free`].
//
// # Safety
// `code` and `out` must be valid pointers.
enum MsrStatus msr_code_to_string(const struct MsrCode *code, char **out);

// Release a string returned by the library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void msr_string_free(char *s);

// Systematic-length bounds for sub-packetization `l` and `r` parities.
//
// # Safety
// `out` must be a valid pointer.
enum MsrStatus msr_bounds_evaluate(uint64_t l, uint64_t r, struct MsrBounds *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MSRLAB_H */
