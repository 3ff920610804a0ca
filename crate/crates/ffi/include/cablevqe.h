#ifndef CABLEVQE_H
#define CABLEVQE_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum CvStatus {
  CV_STATUS_OK = 0,
  CV_STATUS_NULL_POINTER = 1,
  CV_STATUS_INVALID_UTF8 = 2,
  CV_STATUS_PARSE = 3,
  CV_STATUS_VALIDATION = 4,
  CV_STATUS_NOT_FOUND = 5,
  CV_STATUS_INVALID_ARGUMENT = 6,
  CV_STATUS_DIMENSION_OVER_CAP = 7,
  CV_STATUS_BUFFER_SIZE = 8,
  CV_STATUS_IO = 9,
  CV_STATUS_PANIC = 10,
} CvStatus;

/**
 * Outcome of a decomposed solve over all cables.
 */
typedef struct CvAssignment CvAssignment;

/**
 * A parsed and validated routing instance.
 */
typedef struct CvInstance CvInstance;

/**
 * One cable's QUBO block.
 */
typedef struct CvQubo CvQubo;

/**
 * Outcome of one VQE solve.
 */
typedef struct CvSolveResult CvSolveResult;

typedef struct CvVqeConfig {
  /**
   * Shots per evaluation; 0 uses exact probabilities.
   */
  uint64_t shots;
  size_t reps;
  /**
   * Objective-evaluation budget, at least 1.
   */
  size_t maxiter;
  uint64_t seed;
  double ftol;
  /**
   * Start from all-zero angles instead of random ones.
   */
  bool zero_init;
} CvVqeConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *cv_last_error_message(void);

/**
 * Parses an instance from a NUL-terminated JSON document.
 *
 * # Safety
 * `json` must be a valid C string; `out` must be writable.
 */
enum CvStatus cv_instance_from_json(const char *json, struct CvInstance **out);

/**
 * Loads a bundled layout by name (`layout-1`, `layout-2`).
 *
 * # Safety
 * `name` must be a valid C string; `out` must be writable.
 */
enum CvStatus cv_instance_bundled(const char *name, struct CvInstance **out);

/**
 * # Safety
 * `inst` must come from this library and not be used afterwards.
 */
void cv_instance_free(struct CvInstance *inst);

/**
 * Counts of nodes, segments and cables, and the per-cable block size.
 *
 * # Safety
 * `inst` must be a live handle; non-null out pointers must be writable.
 */
enum CvStatus cv_instance_counts(const struct CvInstance *inst,
                                 size_t *nodes,
                                 size_t *segments,
                                 size_t *cables,
                                 size_t *block_dim);

/**
 * Builds the block of `cable_id` with baseline weights scaled by `kappa`.
 *
 * # Safety
 * `inst` must be a live handle, `cable_id` a valid C string, `out` writable.
 */
enum CvStatus cv_qubo_build(const struct CvInstance *inst,
                            const char *cable_id,
                            double kappa,
                            struct CvQubo **out);

/**
 * # Safety
 * `q` must come from this library and not be used afterwards.
 */
void cv_qubo_free(struct CvQubo *q);

/**
 * # Safety
 * `q` must be a live handle; `out` writable.
 */
enum CvStatus cv_qubo_dim(const struct CvQubo *q, size_t *out);

/**
 * # Safety
 * `q` must be a live handle; `out` writable.
 */
enum CvStatus cv_qubo_offset(const struct CvQubo *q, double *out);

/**
 * Writes `eta1..eta4` into `out[0..4]`.
 *
 * # Safety
 * `q` must be a live handle; `out` must hold four doubles.
 */
enum CvStatus cv_qubo_penalties(const struct CvQubo *q, double *out);

/**
 * Copies the row-major matrix; `len` must equal `dim * dim`.
 *
 * # Safety
 * `q` must be a live handle; `out` must hold `len` doubles.
 */
enum CvStatus cv_qubo_matrix(const struct CvQubo *q, double *out, size_t len);

/**
 * Energy `zᵀQz + offset` of a bitstring of `len` bytes.
 *
 * # Safety
 * `q` must be a live handle; `bits` must hold `len` bytes; `out` writable.
 */
enum CvStatus cv_qubo_energy(const struct CvQubo *q, const uint8_t *bits, size_t len, double *out);

/**
 * Export document as JSON; release it with [`cv_string_free`].
 *
 * # Safety
 * `q` must be a live handle; `out` writable.
 */
enum CvStatus cv_qubo_export_json(const struct CvQubo *q, bool ising, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void cv_string_free(char *s);

/**
 * Exhaustive block minimum; writes the argmin into `bits` (`len = dim`).
 *
 * # Safety
 * `q` must be a live handle; `bits` must hold `len` bytes; `energy` writable.
 */
enum CvStatus cv_qubo_brute_force(const struct CvQubo *q,
                                  uint8_t *bits,
                                  size_t len,
                                  double *energy);

/**
 * Default solver settings: 1000 shots, one layer, 100 evaluations.
 */
struct CvVqeConfig cv_vqe_config_default(void);

/**
 * # Safety
 * `q` and `config` must be valid; `out` writable.
 */
enum CvStatus cv_vqe_solve(const struct CvQubo *q,
                           const struct CvVqeConfig *config,
                           struct CvSolveResult **out);

/**
 * # Safety
 * `r` must come from [`cv_vqe_solve`] and not be used afterwards.
 */
void cv_solve_result_free(struct CvSolveResult *r);

/**
 * Energy, feasibility and evaluation count of a result. `objective` is
 * written only when the result is a feasible path.
 *
 * # Safety
 * `r` must be a live result; non-null out pointers must be writable.
 */
enum CvStatus cv_solve_result_summary(const struct CvSolveResult *r,
                                      double *energy,
                                      bool *feasible,
                                      double *objective,
                                      size_t *evaluations);

/**
 * Copies the returned bitstring; `len` must equal the block dimension.
 *
 * # Safety
 * `r` must be a live result; `bits` must hold `len` bytes.
 */
enum CvStatus cv_solve_result_bits(const struct CvSolveResult *r, uint8_t *bits, size_t len);

/**
 * Solves every cable of `inst` with per-cable derived seeds.
 *
 * # Safety
 * `inst` and `config` must be valid; `out` writable.
 */
enum CvStatus cv_solve_decomposed(const struct CvInstance *inst,
                                  double kappa,
                                  const struct CvVqeConfig *config,
                                  struct CvAssignment **out);

/**
 * # Safety
 * `a` must come from [`cv_solve_decomposed`] and not be used afterwards.
 */
void cv_assignment_free(struct CvAssignment *a);

/**
 * # Safety
 * `a` must be a live assignment; non-null out pointers must be writable.
 */
enum CvStatus cv_assignment_summary(const struct CvAssignment *a,
                                    size_t *cables,
                                    double *total_energy,
                                    bool *all_feasible);

/**
 * Borrowed view of the result for cable number `index`, valid while the
 * assignment lives; do not free it.
 *
 * # Safety
 * `a` must be a live assignment; `out` writable.
 */
enum CvStatus cv_assignment_result(const struct CvAssignment *a,
                                   size_t index,
                                   const struct CvSolveResult **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CABLEVQE_H */
