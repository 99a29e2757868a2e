#ifndef PSEUDOGRAM_H
#define PSEUDOGRAM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PsgStatus {
  PSG_STATUS_OK = 0,
  PSG_STATUS_INVALID_ARRANGEMENT = 1,
  PSG_STATUS_DEGENERATE = 2,
  PSG_STATUS_INVALID_ARGUMENT = 3,
  PSG_STATUS_INTERNAL = 4,
} PsgStatus;

/*
 Opaque arrangement handle.
 */
typedef struct PsgArrangement PsgArrangement;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Parses arrangement JSON into a new handle stored in `*out`.

 # Safety
 `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PsgStatus psg_arrangement_from_json(const char *json, struct PsgArrangement **out);

/*
 Releases a handle; null is ignored.

 # Safety
 `h` must come from [`psg_arrangement_from_json`] and not be used afterwards.
 */
void psg_arrangement_free(struct PsgArrangement *h);

/*
 Number of elements, or 0 for a null handle.

 # Safety
 `h` must be null or a live handle.
 */
uintptr_t psg_arrangement_len(const struct PsgArrangement *h);

/*
 Sets `*valid` to 1 when the arrangement is valid and 0 otherwise.

 # Safety
 `h` must be a live handle and `valid` a valid pointer.
 */
enum PsgStatus psg_validate(const struct PsgArrangement *h, int32_t *valid);

/*
 Covectors as a JSON array of sign strings.

 # Safety
 `h` must be a live handle and `out` a valid pointer.
 */
enum PsgStatus psg_covectors_json(const struct PsgArrangement *h, char **out);

/*
 Chirotope as a JSON array of `[i, j, k, sign]`.

 # Safety
 `h` must be a live handle and `out` a valid pointer.
 */
enum PsgStatus psg_chirotope_json(const struct PsgArrangement *h, char **out);

/*
 Straightens with `frames` trace frames. The Parseval frame JSON goes to
 `*frame_out`; when `trace_out` is not null the trace JSON goes there.

 # Safety
 `h` must be a live handle; `frame_out` a valid pointer; `trace_out` null
 or a valid pointer.
 */
enum PsgStatus psg_straighten(const struct PsgArrangement *h,
                              uintptr_t frames,
                              char **frame_out,
                              char **trace_out);

/*
 Weighted Fréchet distance between two arrangements of equal size.

 # Safety
 `a` and `b` must be live handles and `out` a valid pointer.
 */
enum PsgStatus psg_weighted_distance(const struct PsgArrangement *a,
                                     const struct PsgArrangement *b,
                                     double *out);

/*
 Releases a string returned by this library; null is ignored.

 # Safety
 `s` must come from this library and not be used afterwards.
 */
void psg_string_free(char *s);

/*
 Message of the last failed call on this thread, or null. The pointer is
 valid until the next call on this thread.
 */
const char *psg_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PSEUDOGRAM_H */
