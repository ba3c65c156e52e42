#ifndef NV_CYCLE_H
#define NV_CYCLE_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NvFrame {
  NV_FRAME_CRYSTAL = 0,
  NV_FRAME_LOCAL = 1,
} NvFrame;

typedef enum NvMwTarget {
  NV_MW_TARGET_MINUS = 0,
  NV_MW_TARGET_PLUS = 1,
} NvMwTarget;

typedef enum NvPreset {
  NV_PRESET_CALIBRATED = 0,
  NV_PRESET_EXPERIMENTAL = 1,
} NvPreset;

typedef enum NvStatus {
  NV_STATUS_OK = 0,
  NV_STATUS_NULL_POINTER = 1,
  NV_STATUS_INVALID_STRING = 2,
  /**
   * Argument outside its physical domain.
   */
  NV_STATUS_DOMAIN = 3,
  NV_STATUS_CONFIG = 4,
  NV_STATUS_IO = 5,
  /**
   * Solver or integrator failure.
   */
  NV_STATUS_NUMERICAL = 6,
  NV_STATUS_PANIC = 7,
} NvStatus;

/**
 * Opaque simulator handle.
 */
typedef struct NvModel NvModel;

/**
 * Opaque result of one stress point.
 */
typedef struct NvPointResult NvPointResult;

/**
 * Rates of one stress point, MHz (τ in seconds).
 */
typedef struct NvRates {
  double gamma_a1;
  double gamma_e12;
  double gamma_ave;
  double gamma_plus;
  double gamma_minus;
  double gamma_z;
  double lower_z;
  double lower_plus;
  double lower_minus;
  double rad_x;
  double rad_y;
  double tau;
  /**
   * 1 when the symmetry-breaking formulas were used.
   */
  int32_t broken;
} NvRates;

/**
 * Cycle observables of one stress point.
 */
typedef struct NvContrast {
  double intensity;
  double intensity_mw;
  double contrast;
  /**
   * Ground-spin fractions `[0, +, −]` after initialisation.
   */
  double polarization[3];
  int32_t steady_reached;
  int32_t metastable;
} NvContrast;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *nv_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *nv_version(void);

/**
 * Model with bundled data at 300 K.
 *
 * # Safety
 * `model` must be a valid pointer to writable storage.
 */
enum NvStatus nv_model_new(enum NvPreset preset, struct NvModel **model);

/**
 * Model built from a TOML run configuration.
 *
 * # Safety
 * `path` must be NUL-terminated; `model` must be writable.
 */
enum NvStatus nv_model_from_config(const char *path, struct NvModel **model);

/**
 * # Safety
 * `model` must come from `nv_model_new`/`nv_model_from_config` (or be NULL)
 * and must not be used afterwards.
 */
void nv_model_free(struct NvModel *model);

/**
 * Excitation and microwave rates in MHz.
 *
 * # Safety
 * `model` must be a live handle.
 */
enum NvStatus nv_model_set_drive(struct NvModel *model,
                                 double gamma_exc,
                                 double gamma_mw,
                                 enum NvMwTarget target);

/**
 * Crystal-frame tensor `[xx, yy, zz, xy, xz, yz]` of the mixture
 * `α·hydrostatic + (1−α)·uniaxial(axis)` at `magnitude` GPa.
 *
 * # Safety
 * `axis` must point to 3 doubles and `stress` to 6 writable doubles.
 */
enum NvStatus nv_compose_stress(double alpha, double magnitude, const double *axis, double *stress);

/**
 * Full pipeline at one stress tensor `[xx, yy, zz, xy, xz, yz]` in GPa.
 *
 * # Safety
 * `model` must be a live handle, `stress` must point to 6 doubles and
 * `result` must be writable.
 */
enum NvStatus nv_model_evaluate(const struct NvModel *model,
                                const double *stress,
                                enum NvFrame frame,
                                struct NvPointResult **result);

/**
 * # Safety
 * `result` must come from `nv_model_evaluate` (or be NULL) and must not be
 * used afterwards.
 */
void nv_point_free(struct NvPointResult *result);

/**
 * # Safety
 * `result` must be a live handle and `rates` writable.
 */
enum NvStatus nv_point_rates(const struct NvPointResult *result, struct NvRates *rates);

/**
 * # Safety
 * `result` must be a live handle and `contrast` writable.
 */
enum NvStatus nv_point_contrast(const struct NvPointResult *result, struct NvContrast *contrast);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NV_CYCLE_H */
