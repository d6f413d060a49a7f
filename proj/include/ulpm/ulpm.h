/* C interface to the ULPM optimization laboratory.
 *
 * Matrix layout: W is classes x dim, row-major, row k holding classifier
 * w_k. H is dim x (per_class * classes), row-major, column k*per_class + i
 * holding feature h_{k,i} (class-major order).
 *
 * Every function returns ulpm_status; on failure ulpm_last_error() holds a
 * human-readable detail for the calling thread.
 */
#ifndef ULPM_H
#define ULPM_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ulpm_status {
    ULPM_OK = 0,
    ULPM_ERR_INVALID_ARGUMENT = 1,
    ULPM_ERR_DIVERGED = 2,
    ULPM_ERR_INTERNAL = 3,
    ULPM_ERR_NOT_SEPARATED = 4,
    ULPM_ERR_DIMENSION = 5,
    ULPM_ERR_IO = 6
} ulpm_status;

const char* ulpm_status_message(ulpm_status status);
const char* ulpm_last_error(void);
const char* ulpm_version(void);

/* ---- experiment runner ------------------------------------------------ */

/* Opaque experiment configuration. Keys accepted by ulpm_config_set match
 * the CLI flags: classes, per-class, dim, lr, steps, seed, init-scale,
 * integrator, radius, samples, format, out. */
typedef struct ulpm_config ulpm_config;

/* kind: "flow", "example31", "nc-verify", "sphere-compare",
 * "certify-sweep". NULL on unknown kind. */
ulpm_config* ulpm_config_create(const char* kind);
void ulpm_config_destroy(ulpm_config* config);

ulpm_status ulpm_config_set(ulpm_config* config, const char* key,
                            const char* value);

/* Loads `key = value` lines; later ulpm_config_set calls override. */
ulpm_status ulpm_config_load_file(ulpm_config* config, const char* path);

/* Validates, runs, and writes artifacts under out_dir (overrides the
 * config's own out key when non-NULL). A diverged run returns
 * ULPM_ERR_DIVERGED after writing the partial trajectory. */
ulpm_status ulpm_run(const ulpm_config* config, const char* out_dir);

/* ---- dense kernels ----------------------------------------------------- */

ulpm_status ulpm_loss(int classes, int per_class, int dim, const double* W,
                      const double* H, double* loss_out);

ulpm_status ulpm_gradient(int classes, int per_class, int dim,
                          const double* W, const double* H, double* grad_w,
                          double* grad_h);

ulpm_status ulpm_margins(int classes, int per_class, int dim,
                         const double* W, const double* H, double* q_min,
                         int32_t argmin_kij[3]);

ulpm_status ulpm_margin_upper_bound(int classes, int per_class, int dim,
                                    const double* W, const double* H,
                                    double* bound_out);

/* Writes the exact collapsed optimum with the requested joint radius.
 * Requires dim >= classes (ULPM_ERR_DIMENSION otherwise). */
ulpm_status ulpm_nc_solution(int classes, int per_class, int dim,
                             double radius, uint64_t seed, double* W,
                             double* H);

/* metrics_out[6]: norm_variation_h, norm_variation_w,
 * within_class_variation, cos_h, cos_w, self_duality. Saturated fields
 * come back as NaN. */
ulpm_status ulpm_nc_metrics(int classes, int per_class, int dim,
                            const double* W, const double* H,
                            double metrics_out[6]);

/* residuals_out[4]: eps_direct, delta_direct, eps_bound, delta_bound.
 * Bounds are NaN unless the loss is below log 2. Fails with
 * ULPM_ERR_NOT_SEPARATED when q_min <= 0. */
ulpm_status ulpm_certificate(int classes, int per_class, int dim,
                             const double* W, const double* H,
                             double residuals_out[4]);

/* kind_out: 0 second-order, 1 first-order, 2 no-escape, 3 not applicable. */
ulpm_status ulpm_escape_probe(int classes, int per_class, int dim,
                              const double* W, const double* H,
                              int32_t* kind_out, double* curvature_out,
                              double* loss_drop_out);

#ifdef __cplusplus
}
#endif

#endif /* ULPM_H */
