#include "rabitrack.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <limits>
#include <new>
#include <optional>
#include <stdexcept>
#include <string>

#include "io.hpp"
#include "mle.hpp"
#include "model.hpp"
#include "profile.hpp"
#include "projective.hpp"
#include "record.hpp"
#include "spectral.hpp"
#include "sweep.hpp"
#include "tracker.hpp"

struct rabitrack_model {
    rabitrack::MeasurementModel v;
};
struct rabitrack_profile {
    rabitrack::OmegaProfile v;
};
struct rabitrack_record {
    rabitrack::ReadoutRecord v;
};
struct rabitrack_spectrum {
    rabitrack::Spectrum v;
};
struct rabitrack_curve {
    rabitrack::LikelihoodCurve v;
};
struct rabitrack_trace {
    rabitrack::DriftTrace v;
};
struct rabitrack_sweep {
    rabitrack::SweepResult v;
};

namespace {

thread_local std::string g_last_error;

rabitrack_status fail(rabitrack_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

rabitrack_status classify(const std::exception& e) {
    const std::string msg = e.what();
    if (dynamic_cast<const std::invalid_argument*>(&e) ||
        dynamic_cast<const std::out_of_range*>(&e))
        return fail(RABITRACK_ERR_INVALID_ARGUMENT, msg);
    if (msg.find("cannot open") != std::string::npos ||
        msg.find("write failed") != std::string::npos)
        return fail(RABITRACK_ERR_IO, msg);
    if (msg.rfind("record:", 0) == 0 || msg.rfind("profile:", 0) == 0)
        return fail(RABITRACK_ERR_FORMAT, msg);
    return fail(RABITRACK_ERR_INTERNAL, msg);
}

template <typename Fn>
rabitrack_status wrap(Fn&& fn) {
    try {
        return fn();
    } catch (const std::bad_alloc&) {
        return fail(RABITRACK_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return classify(e);
    } catch (...) {
        return fail(RABITRACK_ERR_INTERNAL, "unknown error");
    }
}

rabitrack_status require(bool cond, const char* what) {
    return cond ? RABITRACK_OK : fail(RABITRACK_ERR_INVALID_ARGUMENT, what);
}

rabitrack::InitialState to_initial(rabitrack_initial_state s,
                                   rabitrack::InitialState fallback) {
    switch (s) {
        case RABITRACK_STATE_GROUND: return rabitrack::InitialState::ground();
        case RABITRACK_STATE_EXCITED: return rabitrack::InitialState::excited();
        case RABITRACK_STATE_SUPERPOSITION: return rabitrack::InitialState::plus_x();
        case RABITRACK_STATE_MIXED: return rabitrack::InitialState::mixed();
        default: return fallback;
    }
}

rabitrack::MeasurementModel estimation_model(const rabitrack_record* record,
                                             const rabitrack_model* model,
                                             int ideal_override) {
    rabitrack::MeasurementModel m = model ? model->v : record->v.model;
    m.dt_us = record->v.dt_us;
    if (ideal_override) {
        m.eta = 1.0;
        m.t1_us = std::numeric_limits<double>::infinity();
        m.t2_us = std::numeric_limits<double>::infinity();
    }
    return m;
}

}  // namespace

extern "C" {

const char* rabitrack_version(void) { return "0.1.0"; }

const char* rabitrack_last_error(void) { return g_last_error.c_str(); }

/* ---- model ---- */

rabitrack_status rabitrack_model_create(double tau_m_us, double dt_us, double eta,
                                        double t1_us, double t2_us,
                                        rabitrack_model** out) {
    if (auto st = require(out != nullptr, "model_create: out is NULL")) return st;
    return wrap([&] {
        auto m = rabitrack::make_measurement_model(tau_m_us, dt_us, eta, t1_us, t2_us);
        *out = new rabitrack_model{m};
        return RABITRACK_OK;
    });
}

void rabitrack_model_free(rabitrack_model* model) { delete model; }

double rabitrack_model_tau_m_us(const rabitrack_model* m) { return m ? m->v.tau_m_us : 0.0; }
double rabitrack_model_dt_us(const rabitrack_model* m) { return m ? m->v.dt_us : 0.0; }
double rabitrack_model_eta(const rabitrack_model* m) { return m ? m->v.eta : 0.0; }
double rabitrack_model_t1_us(const rabitrack_model* m) { return m ? m->v.t1_us : 0.0; }
double rabitrack_model_t2_us(const rabitrack_model* m) { return m ? m->v.t2_us : 0.0; }
double rabitrack_model_gamma_m(const rabitrack_model* m) { return m ? m->v.gamma_m() : 0.0; }
double rabitrack_model_gamma(const rabitrack_model* m) { return m ? m->v.gamma() : 0.0; }

/* ---- profiles ---- */

rabitrack_status rabitrack_profile_constant(double f_mhz, rabitrack_profile** out) {
    if (auto st = require(out != nullptr, "profile_constant: out is NULL")) return st;
    return wrap([&] {
        *out = new rabitrack_profile{rabitrack::OmegaProfile::constant(f_mhz)};
        return RABITRACK_OK;
    });
}

rabitrack_status rabitrack_profile_drift(double f0_mhz, double fraction,
                                         double min_timescale_us, double horizon_us,
                                         uint64_t seed, rabitrack_profile** out) {
    if (auto st = require(out != nullptr, "profile_drift: out is NULL")) return st;
    return wrap([&] {
        *out = new rabitrack_profile{rabitrack::make_drift_profile(
            f0_mhz, fraction, min_timescale_us, horizon_us, seed)};
        return RABITRACK_OK;
    });
}

rabitrack_status rabitrack_profile_from_waypoints(const double* t_us,
                                                  const double* f_mhz, size_t n,
                                                  rabitrack_profile** out) {
    if (auto st = require(out && t_us && f_mhz && n > 0,
                          "profile_from_waypoints: bad arguments"))
        return st;
    return wrap([&] {
        std::vector<rabitrack::OmegaProfile::Waypoint> wps(n);
        for (size_t i = 0; i < n; ++i) wps[i] = {t_us[i], f_mhz[i]};
        *out = new rabitrack_profile{
            rabitrack::OmegaProfile::piecewise_linear(std::move(wps))};
        return RABITRACK_OK;
    });
}

rabitrack_status rabitrack_profile_eval(const rabitrack_profile* profile,
                                        double t_us, double* f_mhz) {
    if (auto st = require(profile && f_mhz, "profile_eval: bad arguments")) return st;
    return wrap([&] {
        *f_mhz = profile->v.f_mhz_at(t_us);
        return RABITRACK_OK;
    });
}

rabitrack_status rabitrack_profile_save_json(const rabitrack_profile* profile,
                                             const char* path) {
    if (auto st = require(profile && path, "profile_save_json: bad arguments")) return st;
    return wrap([&] {
        profile->v.save_json(path);
        return RABITRACK_OK;
    });
}

rabitrack_status rabitrack_profile_load_json(const char* path, rabitrack_profile** out) {
    if (auto st = require(path && out, "profile_load_json: bad arguments")) return st;
    return wrap([&] {
        *out = new rabitrack_profile{rabitrack::OmegaProfile::load_json(path)};
        return RABITRACK_OK;
    });
}

void rabitrack_profile_free(rabitrack_profile* profile) { delete profile; }

/* ---- records ---- */

rabitrack_status rabitrack_simulate(const rabitrack_profile* profile,
                                    const rabitrack_model* model, size_t n_steps,
                                    rabitrack_initial_state initial, uint64_t seed,
                                    rabitrack_record** out) {
    if (auto st = require(profile && model && out, "simulate: bad arguments")) return st;
    return wrap([&] {
        const auto init = to_initial(initial, rabitrack::InitialState::ground());
        *out = new rabitrack_record{rabitrack::simulate_record(
            profile->v, model->v, n_steps, init.rho, seed)};
        return RABITRACK_OK;
    });
}

rabitrack_status rabitrack_record_save(const rabitrack_record* record,
                                       const char* path,
                                       rabitrack_record_format format) {
    if (auto st = require(record && path, "record_save: bad arguments")) return st;
    return wrap([&] {
        rabitrack::save_record(record->v, path,
                               format == RABITRACK_FORMAT_BINARY
                                   ? rabitrack::RecordFormat::Binary
                                   : rabitrack::RecordFormat::Csv);
        return RABITRACK_OK;
    });
}

rabitrack_status rabitrack_record_load(const char* path, rabitrack_record** out) {
    if (auto st = require(path && out, "record_load: bad arguments")) return st;
    return wrap([&] {
        *out = new rabitrack_record{rabitrack::load_record(path)};
        return RABITRACK_OK;
    });
}

size_t rabitrack_record_length(const rabitrack_record* r) { return r ? r->v.size() : 0; }
double rabitrack_record_dt_us(const rabitrack_record* r) { return r ? r->v.dt_us : 0.0; }
uint64_t rabitrack_record_seed(const rabitrack_record* r) { return r ? r->v.seed : 0; }

const double* rabitrack_record_samples(const rabitrack_record* r) {
    return r ? r->v.samples.data() : nullptr;
}

rabitrack_status rabitrack_record_model(const rabitrack_record* record,
                                        rabitrack_model** out) {
    if (auto st = require(record && out, "record_model: bad arguments")) return st;
    *out = new (std::nothrow) rabitrack_model{record->v.model};
    return *out ? RABITRACK_OK : fail(RABITRACK_ERR_INTERNAL, "out of memory");
}

void rabitrack_record_free(rabitrack_record* record) { delete record; }

/* ---- MLE ---- */

void rabitrack_mle_options_init(rabitrack_mle_options* opts) {
    if (!opts) return;
    std::memset(opts, 0, sizeof(*opts));
    opts->seed_f_mhz = 0.0;
    opts->span_mhz = 0.0;
    opts->grid_points = 0;
    opts->target_resolution_mhz = 0.0;
    opts->prior_std_mhz = 0.0;
    opts->initial = RABITRACK_STATE_DEFAULT;
    opts->n_threads = 1;
}

rabitrack_status rabitrack_estimate_mle(const rabitrack_record* record,
                                        const rabitrack_model* model,
                                        const rabitrack_mle_options* opts,
                                        rabitrack_estimate* out) {
    if (auto st = require(record && out, "estimate_mle: bad arguments")) return st;
    return wrap([&] {
        rabitrack_mle_options o;
        rabitrack_mle_options_init(&o);
        if (opts) o = *opts;

        const auto m = estimation_model(record, model, o.ideal_model);
        const auto init = to_initial(o.initial, rabitrack::InitialState::ground());

        double fft_seed = std::numeric_limits<double>::quiet_NaN();
        double seed_f = o.seed_f_mhz;
        if (seed_f <= 0.0) {
            rabitrack::FftEstimateOptions fopts;
            fft_seed = rabitrack::fft_estimate(rabitrack::RecordView::of(record->v),
                                               m.tau_m_us, fopts);
            seed_f = fft_seed;
        }
        double span = o.span_mhz > 0.0 ? o.span_mhz : 0.6;
        const std::size_t n_pts = o.grid_points > 2 ? static_cast<std::size_t>(o.grid_points) : 21;

        const double lo = std::max(seed_f - 0.5 * span, 1e-4);
        auto grid = rabitrack::FrequencyGrid::uniform(lo, lo + span, n_pts);
        grid.origin = rabitrack::FrequencyGrid::Origin::Seeded;

        std::optional<rabitrack::GaussianPrior> prior;
        if (o.prior_std_mhz > 0.0)
            prior = rabitrack::GaussianPrior{o.prior_mean_mhz, o.prior_std_mhz};

        rabitrack::LikelihoodEvaluator eval(rabitrack::RecordView::of(record->v), m, init);
        rabitrack::RefineOptions ropts;
        ropts.target_resolution_mhz = o.target_resolution_mhz;
        ropts.n_threads = o.n_threads;
        const auto est = rabitrack::refine_and_fit(eval, grid, prior, ropts);

        out->f_ml_mhz = est.f_ml_mhz;
        out->sigma_mhz = est.sigma_mhz;
        out->loglik_max = est.loglik_max;
        out->fft_seed_mhz = fft_seed;
        out->converged = est.converged ? 1 : 0;
        out->at_boundary = est.at_boundary ? 1 : 0;
        return RABITRACK_OK;
    });
}

rabitrack_status rabitrack_log_likelihood(const rabitrack_record* record,
                                          const rabitrack_model* model,
                                          rabitrack_initial_state initial,
                                          double f_mhz, double* loglik,
                                          double* dloglik_df) {
    if (auto st = require(record && loglik, "log_likelihood: bad arguments")) return st;
    return wrap([&] {
        const auto m = estimation_model(record, model, 0);
        const auto init = to_initial(initial, rabitrack::InitialState::ground());
        rabitrack::LikelihoodEvaluator eval(rabitrack::RecordView::of(record->v), m, init);
        if (dloglik_df) {
            const auto [l, g] = eval.log_likelihood_gradient(f_mhz);
            *loglik = l;
            *dloglik_df = g;
        } else {
            *loglik = eval.log_likelihood(f_mhz);
        }
        return RABITRACK_OK;
    });
}

rabitrack_status rabitrack_likelihood_curve(const rabitrack_record* record,
                                            const rabitrack_model* model,
                                            const rabitrack_mle_options* opts,
                                            double f_lo_mhz, double f_hi_mhz,
                                            size_t n_points, rabitrack_curve** out) {
    if (auto st = require(record && out, "likelihood_curve: bad arguments")) return st;
    return wrap([&] {
        rabitrack_mle_options o;
        rabitrack_mle_options_init(&o);
        if (opts) o = *opts;
        const auto m = estimation_model(record, model, o.ideal_model);
        const auto init = to_initial(o.initial, rabitrack::InitialState::ground());
        auto grid = rabitrack::FrequencyGrid::uniform(f_lo_mhz, f_hi_mhz, n_points);
        std::optional<rabitrack::GaussianPrior> prior;
        if (o.prior_std_mhz > 0.0)
            prior = rabitrack::GaussianPrior{o.prior_mean_mhz, o.prior_std_mhz};
        rabitrack::LikelihoodEvaluator eval(rabitrack::RecordView::of(record->v), m, init);
        *out = new rabitrack_curve{
            rabitrack::grid_evaluate(eval, std::move(grid), prior, o.n_threads)};
        return RABITRACK_OK;
    });
}

size_t rabitrack_curve_length(const rabitrack_curve* c) {
    return c ? c->v.grid.f_mhz.size() : 0;
}

rabitrack_status rabitrack_curve_point(const rabitrack_curve* curve, size_t index,
                                       double* f_mhz, double* loglik) {
    if (auto st = require(curve && f_mhz && loglik && index < curve->v.grid.f_mhz.size(),
                          "curve_point: bad arguments"))
        return st;
    *f_mhz = curve->v.grid.f_mhz[index];
    *loglik = curve->v.loglik[index];
    return RABITRACK_OK;
}

rabitrack_status rabitrack_curve_save_csv(const rabitrack_curve* curve, const char* path) {
    if (auto st = require(curve && path, "curve_save_csv: bad arguments")) return st;
    return wrap([&] {
        rabitrack::save_curve_csv(curve->v, path);
        return RABITRACK_OK;
    });
}

void rabitrack_curve_free(rabitrack_curve* curve) { delete curve; }

/* ---- spectral ---- */

void rabitrack_fft_options_init(rabitrack_fft_options* opts) {
    if (!opts) return;
    std::memset(opts, 0, sizeof(*opts));
    opts->band_lo_mhz = 0.0;
    opts->band_hi_mhz = 0.0;
    opts->exclude_dc_bins = -1;
    opts->filter_half_width = -1;
    opts->parabolic = 1;
}

rabitrack_status rabitrack_estimate_fft(const rabitrack_record* record,
                                        const rabitrack_fft_options* opts,
                                        double* f_mhz) {
    if (auto st = require(record && f_mhz, "estimate_fft: bad arguments")) return st;
    return wrap([&] {
        rabitrack_fft_options o;
        rabitrack_fft_options_init(&o);
        if (opts) o = *opts;
        rabitrack::FftEstimateOptions fopts;
        fopts.band_lo_mhz = o.band_lo_mhz;
        fopts.band_hi_mhz = o.band_hi_mhz;
        fopts.exclude_dc_bins = o.exclude_dc_bins >= 0 ? o.exclude_dc_bins : 2;
        fopts.filter_half_width = o.filter_half_width;
        fopts.parabolic = o.parabolic != 0;
        *f_mhz = rabitrack::fft_estimate(record->v, fopts);
        return RABITRACK_OK;
    });
}

rabitrack_status rabitrack_spectrum_compute(const rabitrack_record* record,
                                            int filter_half_width,
                                            rabitrack_spectrum** out) {
    if (auto st = require(record && out, "spectrum_compute: bad arguments")) return st;
    return wrap([&] {
        auto spec = rabitrack::periodogram(record->v);
        int hw = filter_half_width;
        if (hw < 0)
            hw = rabitrack::default_half_width_bins(record->v.duration_us(),
                                                    record->v.model.tau_m_us);
        if (hw > 0) {
            const int max_half = static_cast<int>((spec.power.size() - 1) / 2);
            hw = std::min(hw, max_half);
            if (hw >= 1) spec = rabitrack::triangular_filter(spec, hw);
        }
        *out = new rabitrack_spectrum{std::move(spec)};
        return RABITRACK_OK;
    });
}

size_t rabitrack_spectrum_length(const rabitrack_spectrum* s) {
    return s ? s->v.f_mhz.size() : 0;
}

rabitrack_status rabitrack_spectrum_point(const rabitrack_spectrum* spec,
                                          size_t index, double* f_mhz,
                                          double* power) {
    if (auto st = require(spec && f_mhz && power && index < spec->v.f_mhz.size(),
                          "spectrum_point: bad arguments"))
        return st;
    *f_mhz = spec->v.f_mhz[index];
    *power = spec->v.power[index];
    return RABITRACK_OK;
}

rabitrack_status rabitrack_spectrum_save_csv(const rabitrack_spectrum* spec,
                                             const char* path) {
    if (auto st = require(spec && path, "spectrum_save_csv: bad arguments")) return st;
    return wrap([&] {
        rabitrack::save_spectrum_csv(spec->v, path);
        return RABITRACK_OK;
    });
}

void rabitrack_spectrum_free(rabitrack_spectrum* spec) { delete spec; }

/* ---- tracking ---- */

void rabitrack_track_options_init(rabitrack_track_options* opts) {
    if (!opts) return;
    std::memset(opts, 0, sizeof(*opts));
    opts->window_us = 40.0;
    opts->step_us = 10.0;
    opts->seed_mode = RABITRACK_SEED_BOTH;
    opts->drift_allowance_mhz = 0.05;
    opts->nominal_f_mhz = 0.0;
    opts->target_resolution_mhz = 0.0;
    opts->initial = RABITRACK_STATE_DEFAULT;
    opts->n_threads = 1;
}

rabitrack_status rabitrack_track(const rabitrack_record* record,
                                 const rabitrack_model* model,
                                 const rabitrack_track_options* opts,
                                 rabitrack_trace** out) {
    if (auto st = require(record && out, "track: bad arguments")) return st;
    return wrap([&] {
        rabitrack_track_options o;
        rabitrack_track_options_init(&o);
        if (opts) o = *opts;

        rabitrack::TrackerConfig cfg;
        cfg.window_us = o.window_us;
        cfg.step_us = o.step_us;
        cfg.seed_mode = o.seed_mode == RABITRACK_SEED_FFT ? rabitrack::SeedMode::Fft
                        : o.seed_mode == RABITRACK_SEED_PREVIOUS
                            ? rabitrack::SeedMode::Previous
                            : rabitrack::SeedMode::Both;
        cfg.drift_allowance_mhz = o.drift_allowance_mhz;
        cfg.nominal_f_mhz = o.nominal_f_mhz;
        cfg.target_resolution_mhz = o.target_resolution_mhz;
        cfg.n_threads = o.n_threads;
        if (o.initial != RABITRACK_STATE_DEFAULT)
            cfg.initial = to_initial(o.initial, rabitrack::InitialState::mixed());

        const auto m = estimation_model(record, model, o.ideal_model);
        *out = new rabitrack_trace{rabitrack::track(record->v, m, cfg)};
        return RABITRACK_OK;
    });
}

size_t rabitrack_trace_length(const rabitrack_trace* t) {
    return t ? t->v.points.size() : 0;
}

rabitrack_status rabitrack_trace_point(const rabitrack_trace* trace, size_t index,
                                       double* t_mid_us, double* f_ml_mhz,
                                       double* sigma_mhz, double* f_fft_mhz) {
    if (auto st = require(trace && index < trace->v.points.size(),
                          "trace_point: bad arguments"))
        return st;
    const auto& p = trace->v.points[index];
    if (t_mid_us) *t_mid_us = p.t_mid_us;
    if (f_ml_mhz) *f_ml_mhz = p.f_ml_mhz;
    if (sigma_mhz) *sigma_mhz = p.sigma_mhz;
    if (f_fft_mhz) *f_fft_mhz = p.f_fft_mhz;
    return RABITRACK_OK;
}

int rabitrack_trace_converged(const rabitrack_trace* trace, size_t index) {
    if (!trace || index >= trace->v.points.size()) return 0;
    return trace->v.points[index].converged ? 1 : 0;
}

rabitrack_status rabitrack_trace_save_csv(const rabitrack_trace* trace,
                                          const char* path) {
    if (auto st = require(trace && path, "trace_save_csv: bad arguments")) return st;
    return wrap([&] {
        rabitrack::save_trace_csv(trace->v, path);
        return RABITRACK_OK;
    });
}

void rabitrack_trace_free(rabitrack_trace* trace) { delete trace; }

/* ---- sweeps ---- */

void rabitrack_sweep_options_init(rabitrack_sweep_options* opts) {
    if (!opts) return;
    std::memset(opts, 0, sizeof(*opts));
    opts->n_ensemble = 100;
    opts->f_true_mhz = 1.0;
    opts->dt_us = 0.01;
    opts->eta = 1.0;
    opts->t1_us = std::numeric_limits<double>::infinity();
    opts->t2_us = std::numeric_limits<double>::infinity();
    opts->estimator = RABITRACK_EST_BOTH;
    opts->master_seed = 1;
    opts->n_threads = 1;
}

rabitrack_status rabitrack_sweep_run(const rabitrack_sweep_options* opts,
                                     rabitrack_sweep** out) {
    if (auto st = require(opts && out && opts->t_us && opts->tau_m_us,
                          "sweep_run: bad arguments"))
        return st;
    return wrap([&] {
        rabitrack::SweepConfig cfg;
        cfg.t_us.assign(opts->t_us, opts->t_us + opts->n_t);
        cfg.tau_m_us.assign(opts->tau_m_us, opts->tau_m_us + opts->n_tau);
        cfg.n_ensemble = opts->n_ensemble;
        cfg.f_true_mhz = opts->f_true_mhz;
        cfg.dt_us = opts->dt_us;
        cfg.eta = opts->eta;
        cfg.t1_us = opts->t1_us;
        cfg.t2_us = opts->t2_us;
        cfg.estimator = opts->estimator == RABITRACK_EST_MLE ? rabitrack::SweepEstimator::Mle
                        : opts->estimator == RABITRACK_EST_FFT
                            ? rabitrack::SweepEstimator::Fft
                            : rabitrack::SweepEstimator::Both;
        cfg.master_seed = opts->master_seed;
        cfg.n_threads = opts->n_threads;
        *out = new rabitrack_sweep{rabitrack::run_sweep(cfg)};
        return RABITRACK_OK;
    });
}

size_t rabitrack_sweep_cells(const rabitrack_sweep* s) {
    return s ? s->v.cells.size() : 0;
}

rabitrack_status rabitrack_sweep_cell(const rabitrack_sweep* sweep, size_t index,
                                      double* t_us, double* tau_m_us,
                                      double* rms_mle_mhz, double* rms_fft_mhz,
                                      int* mle_failures, int* fft_failures) {
    if (auto st = require(sweep && index < sweep->v.cells.size(),
                          "sweep_cell: bad arguments"))
        return st;
    const auto& c = sweep->v.cells[index];
    if (t_us) *t_us = c.t_us;
    if (tau_m_us) *tau_m_us = c.tau_m_us;
    if (rms_mle_mhz) *rms_mle_mhz = c.rms_mle_mhz;
    if (rms_fft_mhz) *rms_fft_mhz = c.rms_fft_mhz;
    if (mle_failures) *mle_failures = c.mle_failures;
    if (fft_failures) *fft_failures = c.fft_failures;
    return RABITRACK_OK;
}

rabitrack_status rabitrack_sweep_save_csv(const rabitrack_sweep* sweep,
                                          const char* path) {
    if (auto st = require(sweep && path, "sweep_save_csv: bad arguments")) return st;
    return wrap([&] {
        rabitrack::save_sweep_csv(sweep->v, path);
        return RABITRACK_OK;
    });
}

void rabitrack_sweep_free(rabitrack_sweep* sweep) { delete sweep; }

/* ---- projective baseline ---- */

rabitrack_status rabitrack_projective_simulate(double f_mhz, double tau_us,
                                               size_t n_meas, int initial_bit,
                                               uint64_t seed, uint8_t* bits_out) {
    if (auto st = require(bits_out != nullptr, "projective_simulate: bits_out is NULL"))
        return st;
    return wrap([&] {
        const auto rec = rabitrack::simulate_projective(
            rabitrack::kTwoPi * f_mhz, tau_us, n_meas, initial_bit, seed);
        std::memcpy(bits_out, rec.bits.data(), rec.bits.size());
        return RABITRACK_OK;
    });
}

rabitrack_status rabitrack_projective_count_switches(const uint8_t* bits,
                                                     size_t n_meas, int initial_bit,
                                                     size_t* n_switches) {
    if (auto st = require(bits && n_switches && n_meas > 0,
                          "projective_count_switches: bad arguments"))
        return st;
    return wrap([&] {
        rabitrack::ProjectiveRecord rec;
        rec.bits.assign(bits, bits + n_meas);
        rec.initial_bit = initial_bit;
        *n_switches = rabitrack::count_switches(rec);
        return RABITRACK_OK;
    });
}

rabitrack_status rabitrack_projective_estimate(size_t n_switches, size_t n_meas,
                                               double tau_us, double* f_ml_mhz,
                                               double* sigma_mhz, int* boundary) {
    if (auto st = require(f_ml_mhz && sigma_mhz, "projective_estimate: bad arguments"))
        return st;
    return wrap([&] {
        const auto est = rabitrack::projective_mle(n_switches, n_meas, tau_us);
        *f_ml_mhz = est.omega_ml_rad_us / rabitrack::kTwoPi;
        *sigma_mhz = est.sigma_rad_us / rabitrack::kTwoPi;
        if (boundary) *boundary = est.boundary ? 1 : 0;
        return RABITRACK_OK;
    });
}

rabitrack_status rabitrack_projective_loglike(size_t n_switches, size_t n_meas,
                                              double f_mhz, double tau_us,
                                              double* loglik) {
    if (auto st = require(loglik != nullptr, "projective_loglike: loglik is NULL"))
        return st;
    return wrap([&] {
        *loglik = rabitrack::projective_loglike(n_switches, n_meas,
                                                rabitrack::kTwoPi * f_mhz, tau_us);
        return RABITRACK_OK;
    });
}

}  // extern "C"
