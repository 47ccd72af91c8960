#ifndef QODE_H
#define QODE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum QodeStatus {
  /**
   * The call succeeded.
   */
  QodeOk = 0,
  /**
   * A required pointer argument was null.
   */
  QodeNullPointer = 1,
  /**
   * An argument violated a precondition (bad step size, too few copies, ...).
   */
  QodeInvalidArgument = 2,
  /**
   * The request exceeded the configured memory budget.
   */
  QodeResourceLimit = 3,
  /**
   * A numerical failure such as a singular readout.
   */
  QodeNumerical = 4,
} QodeStatus;

/**
 * Opaque handle over one solved trajectory.
 */
typedef struct QodeSolver QodeSolver;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Crate version as a static NUL-terminated string.
 */
const char *qode_version(void);

/**
 * Copy the last error message (NUL-terminated) into `buf` and return the
 * full length including the terminator; `buf` may be null to query the
 * length first. The message is per-thread and overwritten on each failure.
 */
uintptr_t qode_last_error(char *buf, uintptr_t cap);

/**
 * Run the multi-copy solver for ẋ = linear·x − alpha·x³ and hand back an
 * opaque handle holding the readout trajectory (steps + 1 samples).
 */
enum QodeStatus qode_solver_new(double linear,
                                double alpha,
                                double dt,
                                uintptr_t steps,
                                double x0,
                                uintptr_t copies,
                                struct QodeSolver **out);

/**
 * Number of trajectory samples held by the handle (steps + 1).
 */
uintptr_t qode_solver_len(const struct QodeSolver *solver);

/**
 * Copy the trajectory into `out`, which must hold `len` doubles;
 * `len` must equal `qode_solver_len`.
 */
enum QodeStatus qode_solver_trajectory(const struct QodeSolver *solver, double *out, uintptr_t len);

/**
 * Release a handle; a null pointer is a no-op.
 */
void qode_solver_free(struct QodeSolver *solver);

/**
 * Forward-Euler reference trajectory; `out` must hold `steps + 1` doubles
 * and `len` must equal that count.
 */
enum QodeStatus qode_euler(double linear,
                           double alpha,
                           double dt,
                           uintptr_t steps,
                           double x0,
                           double *out,
                           uintptr_t len);

/**
 * Closed-form solution at time `t`, written to `*out`.
 */
enum QodeStatus qode_analytic(double linear, double alpha, double x0, double t, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* QODE_H */
