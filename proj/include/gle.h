/* C API for the GLE simulation library.  Opaque handles, integer error
 * codes; every entry point is safe to call from C or via dlopen.  Handles
 * are not thread-safe individually, but distinct handles may be used from
 * distinct threads. */
#ifndef GLE_H
#define GLE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct gle_kernel gle_kernel;
typedef struct gle_config gle_config;

enum {
  GLE_OK = 0,
  GLE_ERR_VALIDATION = 2, /* bad arguments or config */
  GLE_ERR_NONFINITE = 3,  /* integration produced NaN/overflow */
  GLE_ERR_INTERNAL = 4
};

/* Message describing the most recent failure on this thread. */
const char* gle_last_error(void);

/* --- kernels ----------------------------------------------------------- */

/* Power-law family; returns NULL on invalid parameters. */
gle_kernel* gle_kernel_powerlaw(double alpha, double beta, double tail_tol);
/* Explicit mode list (c[i], lambda[i]), i < n; returns NULL on invalid input. */
gle_kernel* gle_kernel_modes(const double* c, const double* lambda, size_t n);
void gle_kernel_free(gle_kernel* k);

/* Evaluations return NaN (and set the error message) on invalid t. */
double gle_kernel_eval(const gle_kernel* k, double t);
double gle_kernel_deriv(const gle_kernel* k, double t);
double gle_kernel_tail_ratio_bound(const gle_kernel* k, double t);
size_t gle_kernel_mode_count(const gle_kernel* k);
double gle_kernel_tail_mass(const gle_kernel* k);
double gle_kernel_gamma2_bound(const gle_kernel* k, double horizon);

/* --- configs and experiments ------------------------------------------ */

/* Parses `key = value` text; returns NULL and records all violations in
 * gle_last_error() when invalid. */
gle_config* gle_config_parse(const char* text);
void gle_config_free(gle_config* config);

/* Writes the 16-hex-char config hash (plus NUL) into buf; returns GLE_OK or
 * GLE_ERR_VALIDATION when buf is too small. */
int gle_config_hash(const gle_config* config, char* buf, size_t len);

/* Canonical serialization; returns the number of bytes required (excluding
 * the NUL), writing up to len bytes. */
size_t gle_config_serialize(const gle_config* config, char* buf, size_t len);

/* Runs one subcommand (kernel-info, sample-noise, simulate, msd,
 * stationarity, coupling, novikov, lyapunov), writing the declared output
 * files; returns a GLE_* code. */
int gle_run(const gle_config* config, const char* subcommand);

#ifdef __cplusplus
}
#endif

#endif /* GLE_H */
