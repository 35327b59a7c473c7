#ifndef DISPQUAD_H
#define DISPQUAD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes shared by every entry point.
typedef enum DqStatus {
  DQ_STATUS_OK = 0,
  DQ_STATUS_NULL_POINTER = 1,
  DQ_STATUS_INVALID_UTF8 = 2,
  // Bad names, parameters or meshes.
  DQ_STATUS_INVALID_INPUT = 3,
  // A numerical failure such as a stop band or a non-definite matrix.
  DQ_STATUS_NUMERICAL = 4,
  // The caller's buffer is shorter than the result.
  DQ_STATUS_BUFFER_TOO_SMALL = 5,
  // A Rust panic was caught at the boundary.
  DQ_STATUS_INTERNAL = 6,
} DqStatus;

// Opaque quadrature rule on [0, 1].
typedef struct DqRule DqRule;

// Opaque assembled 1D discretization.
typedef struct DqSystem DqSystem;

// Uniform-mesh stencil coefficients.
typedef struct DqStencil {
  double k0;
  double k1;
  double k2;
  double m0;
  double m1;
  double m2;
} DqStencil;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL terminated,
// truncated to `len`). Returns the full message length without the NUL, or
// 0 if no error was recorded.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t dq_last_error_message(char *buf, size_t len);

// Library version as a static NUL-terminated string.
const char *dq_version(void);

// Looks up a rule by catalog or preset name (`g3`, `l4`, `nq2`, `g25-left`, `blend-g3-g2`, ...).
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum DqStatus dq_rule_new(const char *name, struct DqRule **out);

// # Safety
// `rule` must come from [`dq_rule_new`] and not be used afterwards.
void dq_rule_free(struct DqRule *rule);

// Number of points in the rule, 0 for a null handle.
//
// # Safety
// `rule` must be null or a live handle.
size_t dq_rule_len(const struct DqRule *rule);

// Copies the nodes into `out`; `written` receives the node count.
//
// # Safety
// `rule` must be a live handle and `out` must hold `capacity` values.
enum DqStatus dq_rule_nodes(const struct DqRule *rule,
                            double *out,
                            size_t capacity,
                            size_t *written);

// Copies the weights into `out`; `written` receives the weight count.
//
// # Safety
// Same as [`dq_rule_nodes`].
enum DqStatus dq_rule_weights(const struct DqRule *rule,
                              double *out,
                              size_t capacity,
                              size_t *written);

// Stencil obtained when the rule is used for both stiffness and mass.
//
// # Safety
// `rule` must be a live handle and `out` a valid pointer.
enum DqStatus dq_rule_stencil(const struct DqRule *rule, struct DqStencil *out);

// Stencil of a named preset.
//
// # Safety
// `preset` must be a NUL-terminated string and `out` a valid pointer.
enum DqStatus dq_preset_stencil(const char *preset, struct DqStencil *out);

// Upper edge of the propagating band, in units of the mesh frequency.
//
// # Safety
// `stencil` and `out` must be valid pointers.
enum DqStatus dq_dispersion_cutoff(const struct DqStencil *stencil, double *out);

// Discrete wavenumber `mu_h` for the normalized frequency `lambda`.
//
// # Safety
// `stencil` and `mu_h` must be valid pointers.
enum DqStatus dq_dispersion_solve(const struct DqStencil *stencil, double lambda, double *mu_h);

// Assembles a 1D system on the unit interval with the default boundary
// treatment. `family` is `open-uniform`, `open-stretched` or
// `periodic-uniform`; `bc` is `dirichlet` or `periodic`.
//
// # Safety
// String arguments must be NUL terminated and `out` a valid pointer.
enum DqStatus dq_system_new(const char *preset,
                            const char *family,
                            size_t elements,
                            double stretch,
                            const char *bc,
                            struct DqSystem **out);

// # Safety
// `system` must come from [`dq_system_new`] and not be used afterwards.
void dq_system_free(struct DqSystem *system);

// Number of free degrees of freedom, 0 for a null handle.
//
// # Safety
// `system` must be null or a live handle.
size_t dq_system_dim(const struct DqSystem *system);

// Writes all discrete eigenvalues in ascending order.
//
// # Safety
// `system` must be a live handle and `out` must hold `capacity` values.
enum DqStatus dq_system_eigenvalues(const struct DqSystem *system,
                                    double *out,
                                    size_t capacity,
                                    size_t *written);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DISPQUAD_H */
