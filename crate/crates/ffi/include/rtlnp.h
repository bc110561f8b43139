#ifndef RTLNP_H
#define RTLNP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum RtlnpStatus {
  RTLNP_STATUS_OK = 0,
  RTLNP_STATUS_NULL_POINTER = 1,
  RTLNP_STATUS_INVALID_ARGUMENT = 2,
  RTLNP_STATUS_NOT_FOUND = 3,
  RTLNP_STATUS_IO = 4,
  RTLNP_STATUS_FORMAT = 5,
  RTLNP_STATUS_PARAMS = 6,
  RTLNP_STATUS_BOUNDS = 7,
  RTLNP_STATUS_DATASET = 8,
  RTLNP_STATUS_INDEX = 9,
  RTLNP_STATUS_METRIC = 10,
  RTLNP_STATUS_BUFFER_TOO_SMALL = 11,
  RTLNP_STATUS_PANIC = 12,
} RtlnpStatus;

/*
 Opaque descriptor (RTLNP with fixed parameters, or LBP).
 */
typedef struct RtlnpDescriptor RtlnpDescriptor;

/*
 Opaque grayscale image.
 */
typedef struct RtlnpImage RtlnpImage;

/*
 Opaque gallery index.
 */
typedef struct RtlnpIndex RtlnpIndex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the most recent status-returning call on this thread; empty
 after a successful call.
 The pointer stays valid until the next call into this library on the
 same thread.
 */
const char *rtlnp_last_error_message(void);

/*
 Static, NUL-terminated name of a status code.
 */
const char *rtlnp_status_name(enum RtlnpStatus status);

/*
 Copies `width * height` row-major intensities into a new image.

 # Safety
 `pixels` must point to `width * height` readable bytes; `out` must be writable.
 */
enum RtlnpStatus rtlnp_image_new(uintptr_t width,
                                 uintptr_t height,
                                 const uint8_t *pixels,
                                 struct RtlnpImage **out);

/*
 Loads PGM/PPM (and PNG/JPEG when built with image support) as grayscale.

 # Safety
 `path` must be a NUL-terminated string; `out` must be writable.
 */
enum RtlnpStatus rtlnp_image_load(const char *path, struct RtlnpImage **out);

/*
 # Safety
 `image` must be a live handle.
 */
uintptr_t rtlnp_image_width(const struct RtlnpImage *image);

/*
 # Safety
 `image` must be a live handle.
 */
uintptr_t rtlnp_image_height(const struct RtlnpImage *image);

/*
 # Safety
 `image` must come from this library and not be used afterwards. NULL is a no-op.
 */
void rtlnp_image_free(struct RtlnpImage *image);

/*
 Creates an RTLNP descriptor; sector geometry is precomputed once here.

 # Safety
 `out` must be writable.
 */
enum RtlnpStatus rtlnp_descriptor_rtlnp(uint32_t r_in,
                                        uint32_t r_out,
                                        uint32_t delta_theta,
                                        struct RtlnpDescriptor **out);

/*
 Creates the radius-1 LBP baseline descriptor.

 # Safety
 `out` must be writable.
 */
enum RtlnpStatus rtlnp_descriptor_lbp(struct RtlnpDescriptor **out);

/*
 Number of histogram bins, `2^S` (256 for LBP); 0 for NULL.

 # Safety
 `descriptor` must be a live handle or NULL.
 */
uintptr_t rtlnp_descriptor_histogram_len(const struct RtlnpDescriptor *descriptor);

/*
 Width of the non-encoded border; 0 for NULL.

 # Safety
 `descriptor` must be a live handle or NULL.
 */
uintptr_t rtlnp_descriptor_margin(const struct RtlnpDescriptor *descriptor);

/*
 # Safety
 `descriptor` must come from this library and not be used afterwards. NULL is a no-op.
 */
void rtlnp_descriptor_free(struct RtlnpDescriptor *descriptor);

/*
 Writes raw code counts into `bins[0..histogram_len]`.

 # Safety
 Handles must be live; `bins` must point to `len` writable `uint64_t`.
 */
enum RtlnpStatus rtlnp_histogram(const struct RtlnpDescriptor *descriptor,
                                 const struct RtlnpImage *image,
                                 uint64_t *bins,
                                 uintptr_t len);

/*
 Writes the row-major feature image (`width * height` codes, border 0).

 # Safety
 Handles must be live; `codes` must point to `len` writable `uint32_t`.
 */
enum RtlnpStatus rtlnp_feature_image(const struct RtlnpDescriptor *descriptor,
                                     const struct RtlnpImage *image,
                                     uint32_t *codes,
                                     uintptr_t len);

/*
 Chi-square distance of two `len`-element vectors.

 # Safety
 `x` and `y` must point to `len` readable doubles; `out` must be writable.
 */
enum RtlnpStatus rtlnp_chi_square(const double *x, const double *y, uintptr_t len, double *out);

/*
 Builds an index over `dataset_root/<class>/<image>`.

 # Safety
 `dataset_root` must be NUL-terminated; `descriptor` live; `out` writable.
 */
enum RtlnpStatus rtlnp_index_build(const char *dataset_root,
                                   const struct RtlnpDescriptor *descriptor,
                                   struct RtlnpIndex **out);

/*
 # Safety
 `path` must be NUL-terminated; `out` writable.
 */
enum RtlnpStatus rtlnp_index_load(const char *path, struct RtlnpIndex **out);

/*
 # Safety
 `index` must be live; `path` NUL-terminated.
 */
enum RtlnpStatus rtlnp_index_save(const struct RtlnpIndex *index, const char *path);

/*
 Number of entries; 0 for NULL.

 # Safety
 `index` must be a live handle or NULL.
 */
uintptr_t rtlnp_index_len(const struct RtlnpIndex *index);

/*
 Leave-one-out ranking of entry `query_id`: the other `N - 1` ids nearest
 first (ties by id) and their distances.

 # Safety
 `index` must be live; `ids` and `distances` must each hold `len` writable elements.
 */
enum RtlnpStatus rtlnp_index_rank(const struct RtlnpIndex *index,
                                  uintptr_t query_id,
                                  uintptr_t *ids,
                                  double *distances,
                                  uintptr_t len);

/*
 # Safety
 `index` must come from this library and not be used afterwards. NULL is a no-op.
 */
void rtlnp_index_free(struct RtlnpIndex *index);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RTLNP_H */
