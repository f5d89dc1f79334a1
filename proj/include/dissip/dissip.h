#ifndef DISSIP_DISSIP_H
#define DISSIP_DISSIP_H

#include <stddef.h>

#if defined(_WIN32)
#define DISSIP_API __declspec(dllexport)
#else
#define DISSIP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dissip_status {
    DISSIP_OK = 0,
    DISSIP_FAIL = 1,             /* a run completed and a check failed */
    DISSIP_CONFIG_ERROR = 2,     /* invalid configuration, see dissip_last_error_pointer */
    DISSIP_DOMAIN_ERROR = 3,     /* argument outside the function's domain */
    DISSIP_PRECONDITION = 4,     /* violated precondition */
    DISSIP_ASSUMPTION = 5,       /* a structural hypothesis does not hold */
    DISSIP_NUMERICAL = 6,        /* iteration failed or accuracy check tripped */
    DISSIP_INVALID_ARGUMENT = 7, /* null pointer or bad enum */
    DISSIP_INTERNAL = 8
} dissip_status;

typedef enum dissip_bessel_kind { DISSIP_BESSEL_J = 0, DISSIP_BESSEL_I = 1, DISSIP_BESSEL_K = 2 } dissip_bessel_kind;

typedef struct dissip_context dissip_context;
typedef struct dissip_spectrum dissip_spectrum;

DISSIP_API dissip_context* dissip_context_create(void);
DISSIP_API void dissip_context_destroy(dissip_context* ctx);

/* Message of the last failed call on ctx; "" after success. Owned by ctx. */
DISSIP_API const char* dissip_last_error(const dissip_context* ctx);
/* JSON pointer of the offending config entry after DISSIP_CONFIG_ERROR. */
DISSIP_API const char* dissip_last_error_pointer(const dissip_context* ctx);

/* Default tolerances (JSON object) applied under every later run's own "tolerances". */
DISSIP_API dissip_status dissip_set_tolerances(dissip_context* ctx, const char* json);

/* Runs spectrum, critical, resonance, trajectory, census or verify-kernels.
   out_dir may be NULL (config output_dir); refine = -1 keeps the config value.
   Returns DISSIP_OK, DISSIP_FAIL or DISSIP_CONFIG_ERROR; other failures map to DISSIP_FAIL
   with the message in dissip_last_error. */
DISSIP_API dissip_status dissip_run(dissip_context* ctx, const char* subcommand, const char* config_json,
                                    const char* out_dir, int refine);
/* Human-readable log of the last dissip_run. Owned by ctx. */
DISSIP_API const char* dissip_run_log(const dissip_context* ctx);

DISSIP_API dissip_status dissip_gamma(dissip_context* ctx, double x, double* out);
DISSIP_API dissip_status dissip_bessel(dissip_context* ctx, dissip_bessel_kind kind, double nu, double x,
                                       double* out);
DISSIP_API dissip_status dissip_p_poly(dissip_context* ctx, double nu, int k, double rho, double* out);
DISSIP_API dissip_status dissip_gamma_nu(dissip_context* ctx, double nu, double* re, double* im);

/* tau e^{-tau cos sigma} = r, tau sin sigma - sigma = phi + pi, and the root z0 of z ln z = r e^{i phi}. */
DISSIP_API dissip_status dissip_solve_p2(dissip_context* ctx, double r, double phi, double* tau, double* sigma,
                                         double* z_re, double* z_im);

/* Leading-order eigenvalue emerging from a threshold resonance with the given coefficients. */
DISSIP_API dissip_status dissip_predict_eigenvalue(dissip_context* ctx, double nu1, double c1_re, double c1_im,
                                                   double c1p_re, double c1p_im, double v11, double lambda,
                                                   double lambda0, double* z_re, double* z_im);

/* Critical coupling of beta * v1 in sector (n, ell); v1 given as a profile JSON object. */
DISSIP_API dissip_status dissip_critical_coupling(dissip_context* ctx, int n, int ell, const char* profile_json,
                                                  double r_max, size_t n_points, int extrapolate, double* beta0);

/* Confirmed point spectrum in sector ell at coupling lambda for a run config. */
DISSIP_API dissip_status dissip_spectrum_compute(dissip_context* ctx, const char* config_json, double lambda,
                                                 dissip_spectrum** out);
DISSIP_API size_t dissip_spectrum_size(const dissip_spectrum* sp);
DISSIP_API dissip_status dissip_spectrum_get(const dissip_spectrum* sp, size_t i, double* re, double* im,
                                             int* multiplicity, int* confirmed);
DISSIP_API void dissip_spectrum_destroy(dissip_spectrum* sp);

#ifdef __cplusplus
}
#endif

#endif
