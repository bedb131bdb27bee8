/* rabitrack - Rabi-frequency estimation from continuous weak-measurement
 * records: trajectory simulation, maximum-likelihood and FFT estimators,
 * and moving-window drift tracking.
 *
 * C API over the C++ core. All functions return a rabitrack_status; outputs
 * go through pointers. Handles are opaque and freed with their matching
 * *_free function (free functions accept NULL). Unless a function is
 * documented otherwise, handles are immutable after creation and may be
 * shared across threads.
 *
 * Units: times in microseconds, frequencies in MHz. Pass INFINITY for
 * t1_us/t2_us when the corresponding decay channel is absent.
 */

#ifndef RABITRACK_H
#define RABITRACK_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rabitrack_status {
    RABITRACK_OK = 0,
    RABITRACK_ERR_INVALID_ARGUMENT = 1,
    RABITRACK_ERR_IO = 2,
    RABITRACK_ERR_FORMAT = 3,
    RABITRACK_ERR_NOT_CONVERGED = 4,
    RABITRACK_ERR_INTERNAL = 5
} rabitrack_status;

const char* rabitrack_version(void);

/* Human-readable detail for the most recent failure on this thread. */
const char* rabitrack_last_error(void);

typedef struct rabitrack_model rabitrack_model;
typedef struct rabitrack_profile rabitrack_profile;
typedef struct rabitrack_record rabitrack_record;
typedef struct rabitrack_spectrum rabitrack_spectrum;
typedef struct rabitrack_curve rabitrack_curve;
typedef struct rabitrack_trace rabitrack_trace;
typedef struct rabitrack_sweep rabitrack_sweep;

/* ---- measurement model --------------------------------------------------- */

rabitrack_status rabitrack_model_create(double tau_m_us, double dt_us, double eta,
                                        double t1_us, double t2_us,
                                        rabitrack_model** out);
void rabitrack_model_free(rabitrack_model* model);

double rabitrack_model_tau_m_us(const rabitrack_model* model);
double rabitrack_model_dt_us(const rabitrack_model* model);
double rabitrack_model_eta(const rabitrack_model* model);
double rabitrack_model_t1_us(const rabitrack_model* model);
double rabitrack_model_t2_us(const rabitrack_model* model);
/* Derived rates (1/us): measurement dephasing 1/(2 eta tau_m) and the total
 * dephasing gamma_m + 1/T2 + 1/(2 T1). */
double rabitrack_model_gamma_m(const rabitrack_model* model);
double rabitrack_model_gamma(const rabitrack_model* model);

/* ---- drive profiles ------------------------------------------------------ */

rabitrack_status rabitrack_profile_constant(double f_mhz, rabitrack_profile** out);

/* Piecewise-linear random drift: waypoint spacing uniform in
 * [min_timescale, 2*min_timescale], values uniform in
 * f0 * [1 - fraction/2, 1 + fraction/2]; deterministic in the seed. */
rabitrack_status rabitrack_profile_drift(double f0_mhz, double fraction,
                                         double min_timescale_us, double horizon_us,
                                         uint64_t seed, rabitrack_profile** out);

rabitrack_status rabitrack_profile_from_waypoints(const double* t_us,
                                                  const double* f_mhz, size_t n,
                                                  rabitrack_profile** out);
rabitrack_status rabitrack_profile_eval(const rabitrack_profile* profile,
                                        double t_us, double* f_mhz);

/* JSON array of [t_us, f_mhz] waypoints. */
rabitrack_status rabitrack_profile_save_json(const rabitrack_profile* profile,
                                             const char* path);
rabitrack_status rabitrack_profile_load_json(const char* path,
                                             rabitrack_profile** out);
void rabitrack_profile_free(rabitrack_profile* profile);

/* ---- readout records ----------------------------------------------------- */

typedef enum rabitrack_initial_state {
    RABITRACK_STATE_GROUND = 0,        /* |0>, z = -1 */
    RABITRACK_STATE_EXCITED = 1,       /* |1>, z = +1 */
    RABITRACK_STATE_SUPERPOSITION = 2, /* (|0>+|1>)/sqrt(2), x = +1 */
    RABITRACK_STATE_MIXED = 3,         /* maximally mixed */
    RABITRACK_STATE_DEFAULT = -1       /* context-dependent default */
} rabitrack_initial_state;

typedef enum rabitrack_record_format {
    RABITRACK_FORMAT_CSV = 0,   /* '# key=value' header + one sample per line */
    RABITRACK_FORMAT_BINARY = 1 /* 64-byte header + little-endian float64 */
} rabitrack_record_format;

rabitrack_status rabitrack_simulate(const rabitrack_profile* profile,
                                    const rabitrack_model* model, size_t n_steps,
                                    rabitrack_initial_state initial, uint64_t seed,
                                    rabitrack_record** out);

rabitrack_status rabitrack_record_save(const rabitrack_record* record,
                                       const char* path,
                                       rabitrack_record_format format);
/* Loads either format (auto-detected). */
rabitrack_status rabitrack_record_load(const char* path, rabitrack_record** out);

size_t rabitrack_record_length(const rabitrack_record* record);
double rabitrack_record_dt_us(const rabitrack_record* record);
uint64_t rabitrack_record_seed(const rabitrack_record* record);
/* Borrowed pointer to rabitrack_record_length() samples; valid until free. */
const double* rabitrack_record_samples(const rabitrack_record* record);
/* Copy of the acquisition model stored in the record metadata. */
rabitrack_status rabitrack_record_model(const rabitrack_record* record,
                                        rabitrack_model** out);
void rabitrack_record_free(rabitrack_record* record);

/* ---- maximum-likelihood estimation --------------------------------------- */

typedef struct rabitrack_mle_options {
    double seed_f_mhz;  /* center of the initial search grid; <= 0: seed from FFT */
    double span_mhz;    /* initial grid span; <= 0: default 0.6 */
    int grid_points;    /* <= 0: default 21 */
    double target_resolution_mhz; /* <= 0: 1/(10 T) */
    double prior_mean_mhz;        /* Gaussian prior; ignored unless std > 0 */
    double prior_std_mhz;
    rabitrack_initial_state initial; /* DEFAULT: ground */
    int ideal_model; /* nonzero: estimate with eta=1, T1=T2=inf regardless of metadata */
    int n_threads;   /* parallel grid evaluation; <= 0: single thread */
} rabitrack_mle_options;

void rabitrack_mle_options_init(rabitrack_mle_options* opts);

typedef struct rabitrack_estimate {
    double f_ml_mhz;
    double sigma_mhz;
    double loglik_max;
    double fft_seed_mhz; /* NaN when the search was not FFT-seeded */
    int converged;
    int at_boundary;
} rabitrack_estimate;

/* model may be NULL to estimate with the record's own metadata. */
rabitrack_status rabitrack_estimate_mle(const rabitrack_record* record,
                                        const rabitrack_model* model,
                                        const rabitrack_mle_options* opts,
                                        rabitrack_estimate* out);

/* Log-likelihood (and optionally its analytic frequency derivative) of one
 * trial frequency, up to a frequency-independent constant. */
rabitrack_status rabitrack_log_likelihood(const rabitrack_record* record,
                                          const rabitrack_model* model,
                                          rabitrack_initial_state initial,
                                          double f_mhz, double* loglik,
                                          double* dloglik_df);

/* Likelihood curve over a uniform grid [f_lo, f_hi] with n points. */
rabitrack_status rabitrack_likelihood_curve(const rabitrack_record* record,
                                            const rabitrack_model* model,
                                            const rabitrack_mle_options* opts,
                                            double f_lo_mhz, double f_hi_mhz,
                                            size_t n_points, rabitrack_curve** out);
size_t rabitrack_curve_length(const rabitrack_curve* curve);
rabitrack_status rabitrack_curve_point(const rabitrack_curve* curve, size_t index,
                                       double* f_mhz, double* loglik);
rabitrack_status rabitrack_curve_save_csv(const rabitrack_curve* curve,
                                          const char* path);
void rabitrack_curve_free(rabitrack_curve* curve);

/* ---- spectral estimation ------------------------------------------------- */

typedef struct rabitrack_fft_options {
    double band_lo_mhz;
    double band_hi_mhz;    /* <= 0: up to Nyquist */
    int exclude_dc_bins;   /* < 0: default 2 */
    int filter_half_width; /* < 0: default from (T, tau_m); 0: no filter */
    int parabolic;         /* 3-point log-power peak interpolation (default on) */
} rabitrack_fft_options;

void rabitrack_fft_options_init(rabitrack_fft_options* opts);

rabitrack_status rabitrack_estimate_fft(const rabitrack_record* record,
                                        const rabitrack_fft_options* opts,
                                        double* f_mhz);

/* One-sided PSD, |DFT|^2 dt / N; filter_half_width as in the options. */
rabitrack_status rabitrack_spectrum_compute(const rabitrack_record* record,
                                            int filter_half_width,
                                            rabitrack_spectrum** out);
size_t rabitrack_spectrum_length(const rabitrack_spectrum* spec);
rabitrack_status rabitrack_spectrum_point(const rabitrack_spectrum* spec,
                                          size_t index, double* f_mhz,
                                          double* power);
rabitrack_status rabitrack_spectrum_save_csv(const rabitrack_spectrum* spec,
                                             const char* path);
void rabitrack_spectrum_free(rabitrack_spectrum* spec);

/* ---- drift tracking ------------------------------------------------------ */

typedef enum rabitrack_seed_mode {
    RABITRACK_SEED_FFT = 0,      /* independent windows, FFT seed only */
    RABITRACK_SEED_PREVIOUS = 1, /* previous-window prior only */
    RABITRACK_SEED_BOTH = 2      /* FFT seed + previous-window prior (default) */
} rabitrack_seed_mode;

typedef struct rabitrack_track_options {
    double window_us;
    double step_us;
    int seed_mode;               /* rabitrack_seed_mode */
    double drift_allowance_mhz;  /* prior widening per window step */
    double nominal_f_mhz;        /* > 0: FFT band [0, 2*nominal] */
    double target_resolution_mhz;
    rabitrack_initial_state initial; /* DEFAULT: mixed (superposition on the pure path) */
    int ideal_model;
    int n_threads;
} rabitrack_track_options;

void rabitrack_track_options_init(rabitrack_track_options* opts);

rabitrack_status rabitrack_track(const rabitrack_record* record,
                                 const rabitrack_model* model,
                                 const rabitrack_track_options* opts,
                                 rabitrack_trace** out);
size_t rabitrack_trace_length(const rabitrack_trace* trace);
rabitrack_status rabitrack_trace_point(const rabitrack_trace* trace, size_t index,
                                       double* t_mid_us, double* f_ml_mhz,
                                       double* sigma_mhz, double* f_fft_mhz);
/* Nonzero when the windowed fit converged. */
int rabitrack_trace_converged(const rabitrack_trace* trace, size_t index);
rabitrack_status rabitrack_trace_save_csv(const rabitrack_trace* trace,
                                          const char* path);
void rabitrack_trace_free(rabitrack_trace* trace);

/* ---- parameter sweeps ----------------------------------------------------- */

typedef enum rabitrack_estimator {
    RABITRACK_EST_MLE = 0,
    RABITRACK_EST_FFT = 1,
    RABITRACK_EST_BOTH = 2
} rabitrack_estimator;

typedef struct rabitrack_sweep_options {
    const double* t_us;
    size_t n_t;
    const double* tau_m_us;
    size_t n_tau;
    int n_ensemble;
    double f_true_mhz;
    double dt_us;
    double eta;
    double t1_us;
    double t2_us;
    int estimator; /* rabitrack_estimator */
    uint64_t master_seed;
    int n_threads;
} rabitrack_sweep_options;

void rabitrack_sweep_options_init(rabitrack_sweep_options* opts);

rabitrack_status rabitrack_sweep_run(const rabitrack_sweep_options* opts,
                                     rabitrack_sweep** out);
size_t rabitrack_sweep_cells(const rabitrack_sweep* sweep);
rabitrack_status rabitrack_sweep_cell(const rabitrack_sweep* sweep, size_t index,
                                      double* t_us, double* tau_m_us,
                                      double* rms_mle_mhz, double* rms_fft_mhz,
                                      int* mle_failures, int* fft_failures);
rabitrack_status rabitrack_sweep_save_csv(const rabitrack_sweep* sweep,
                                          const char* path);
void rabitrack_sweep_free(rabitrack_sweep* sweep);

/* ---- projective-measurement baseline -------------------------------------- */

/* Simulates n_meas periodic projective outcomes into bits_out (0/1 bytes,
 * caller-allocated, length n_meas). */
rabitrack_status rabitrack_projective_simulate(double f_mhz, double tau_us,
                                               size_t n_meas, int initial_bit,
                                               uint64_t seed, uint8_t* bits_out);

rabitrack_status rabitrack_projective_count_switches(const uint8_t* bits,
                                                     size_t n_meas,
                                                     int initial_bit,
                                                     size_t* n_switches);

/* Closed-form estimator f = asin(sqrt(n/N))/(pi tau) with uncertainty
 * 1/(2 pi tau sqrt(N)); boundary is set when n = 0 or n = N. */
rabitrack_status rabitrack_projective_estimate(size_t n_switches, size_t n_meas,
                                               double tau_us, double* f_ml_mhz,
                                               double* sigma_mhz, int* boundary);

rabitrack_status rabitrack_projective_loglike(size_t n_switches, size_t n_meas,
                                              double f_mhz, double tau_us,
                                              double* loglik);

#ifdef __cplusplus
}
#endif

#endif /* RABITRACK_H */
