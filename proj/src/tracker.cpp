#include "tracker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rabitrack {

namespace {

InitialState window_initial(const MeasurementModel& est_model, const TrackerConfig& cfg) {
    if (cfg.initial) return *cfg.initial;
    return est_model.ideal() ? InitialState::plus_x() : InitialState::mixed();
}

}  // namespace

WindowEstimate window_estimate(const RecordView& window,
                               const MeasurementModel& est_model,
                               const std::optional<GaussianPrior>& prior,
                               const TrackerConfig& cfg) {
    WindowEstimate out;
    const double t_w = window.duration_us();

    // FFT estimate. Banded around the previous estimate when a prior is
    // available, otherwise [0, 2*nominal] or the full range.
    FftEstimateOptions fft_opts;
    if (prior) {
        const double halo = std::max(cfg.search_halo_mhz, 3.0 * prior->std_mhz);
        fft_opts.band_lo_mhz = std::max(0.0, prior->mean_mhz - halo);
        fft_opts.band_hi_mhz = prior->mean_mhz + halo;
    } else if (cfg.nominal_f_mhz > 0.0) {
        fft_opts.band_hi_mhz = 2.0 * cfg.nominal_f_mhz;
    }
    out.f_fft_mhz = fft_estimate(window, est_model.tau_m_us, fft_opts);

    std::optional<GaussianPrior> fused_prior;
    if (prior && cfg.seed_mode != SeedMode::Fft) fused_prior = prior;

    // Coarse search band. A chained prior centers the band on itself (the
    // prior still tilts the curve); otherwise the window scans the whole
    // nominal band when one is known (initial acquisition and recovery), or
    // a span around the FFT seed as a last resort.
    double band_lo, band_hi;
    if (fused_prior) {
        double span = std::max(6.0 * fused_prior->std_mhz, 0.3);
        band_lo = std::max(fused_prior->mean_mhz - 0.5 * span, 1e-4);
        band_hi = band_lo + span;
    } else if (cfg.nominal_f_mhz > 0.0) {
        band_lo = std::max(1.5 / t_w, 0.1 * cfg.nominal_f_mhz);
        band_hi = 2.0 * cfg.nominal_f_mhz;
    } else {
        double span = cfg.no_prior_span_mhz;
        if (span <= 0.0) span = std::max(10.0 / t_w, 0.25);
        band_lo = std::max(out.f_fft_mhz - 0.5 * span, 1e-4);
        band_hi = band_lo + span;
    }

    LikelihoodEvaluator eval(window, est_model, window_initial(est_model, cfg));

    // Stage 1: coarse scan at the window's Fourier resolution and a wide
    // parabola fit. When the estimation model is misspecified the likelihood
    // breaks into lobes spaced ~1/T_w; fitting the broad top of the coarse
    // curve locates the envelope instead of a random lobe.
    const double coarse_step = 0.5 / t_w;
    std::size_t n1 =
        static_cast<std::size_t>(std::llround((band_hi - band_lo) / coarse_step)) + 1;
    n1 = std::clamp<std::size_t>(n1, static_cast<std::size_t>(cfg.grid_points), 96);
    FrequencyGrid coarse = FrequencyGrid::uniform(band_lo, band_hi, n1);
    coarse.origin = FrequencyGrid::Origin::Seeded;
    const LikelihoodCurve scan = grid_evaluate(eval, coarse, fused_prior, cfg.n_threads);

    std::size_t peak = 0;
    for (std::size_t i = 1; i < scan.loglik.size(); ++i)
        if (scan.loglik[i] > scan.loglik[peak]) peak = i;
    std::size_t w_lo = peak, w_hi = peak;
    const double cut = scan.loglik[peak] - 8.0;
    while (w_lo > 0 && scan.loglik[w_lo - 1] >= cut) --w_lo;
    while (w_hi + 1 < scan.loglik.size() && scan.loglik[w_hi + 1] >= cut) ++w_hi;
    double vertex = scan.grid.f_mhz[peak];
    if (w_hi - w_lo + 1 >= 3) {
        double v = 0.0, s = 0.0;
        if (fit_parabola(scan.grid.f_mhz, scan.loglik, w_lo, w_hi, &v, &s, nullptr))
            vertex = std::clamp(v, scan.grid.f_mhz.front(), scan.grid.f_mhz.back());
    }

    // Stage 2: standard refinement in a small neighborhood of the envelope
    // vertex down to the target resolution.
    const double span2 = 6.0 * coarse_step;
    const double lo2 = std::max(vertex - 0.5 * span2, 1e-4);
    FrequencyGrid grid = FrequencyGrid::uniform(lo2, lo2 + span2,
                                                static_cast<std::size_t>(cfg.grid_points));
    grid.origin = FrequencyGrid::Origin::Refined;
    RefineOptions ropts;
    ropts.target_resolution_mhz =
        cfg.target_resolution_mhz > 0.0 ? cfg.target_resolution_mhz : 0.1 / t_w;
    ropts.n_threads = cfg.n_threads;
    out.mle = refine_and_fit(eval, grid, fused_prior, ropts);

    // prior-dominance guard: the prior curvature overwhelming the data
    // curvature by 10x means the window is just echoing its prior
    if (fused_prior && out.mle.converged) {
        const double total_curv = 1.0 / (out.mle.sigma_mhz * out.mle.sigma_mhz);
        const double prior_curv = 1.0 / (fused_prior->std_mhz * fused_prior->std_mhz);
        const double data_curv = total_curv - prior_curv;
        if (prior_curv > 10.0 * std::max(data_curv, 0.0)) out.prior_dominated = true;
    }
    return out;
}

DriftTrace track(const ReadoutRecord& record, const MeasurementModel& est_model,
                 const TrackerConfig& cfg) {
    if (!(cfg.step_us > 0.0) || cfg.step_us > cfg.window_us)
        throw std::invalid_argument("tracker: need 0 < step <= window");
    if (record.duration_us() < cfg.window_us)
        throw std::invalid_argument("tracker: record shorter than one window");

    const auto n_window = static_cast<std::size_t>(std::llround(cfg.window_us / record.dt_us));
    const auto n_step = static_cast<std::size_t>(std::llround(cfg.step_us / record.dt_us));
    if (n_window < 2 || n_step < 1)
        throw std::invalid_argument("tracker: window/step too small for the record binning");

    const RecordView full = RecordView::of(record);
    DriftTrace trace;
    trace.window_us = cfg.window_us;
    trace.step_us = cfg.step_us;

    std::optional<GaussianPrior> prior;
    double widen = 1.0;
    for (std::size_t k = 0;; ++k) {
        const std::size_t i0 = k * n_step;
        if (i0 + n_window > record.size()) break;
        const RecordView window = full.slice(i0, n_window);

        TrackerConfig wcfg = cfg;
        if (widen > 1.0) {
            double span = cfg.no_prior_span_mhz;
            if (span <= 0.0) span = std::max(10.0 / cfg.window_us, 0.25);
            wcfg.no_prior_span_mhz = span * widen;
        }
        const auto west = window_estimate(window, est_model,
                                          cfg.seed_mode == SeedMode::Fft ? std::nullopt : prior,
                                          wcfg);

        TracePoint pt;
        pt.window_start_us = static_cast<double>(i0) * record.dt_us;
        pt.window_end_us = pt.window_start_us + cfg.window_us;
        pt.t_mid_us = static_cast<double>(k) * cfg.step_us + 0.5 * cfg.window_us;
        pt.f_ml_mhz = west.mle.f_ml_mhz;
        pt.sigma_mhz = west.mle.sigma_mhz;
        pt.f_fft_mhz = west.f_fft_mhz;
        pt.converged = west.mle.converged;
        pt.prior_dominated = west.prior_dominated;
        trace.points.push_back(pt);

        if (west.mle.converged) {
            // the chained certainty is floored at the window's own frequency
            // resolution: curvature widths below 1/T_w are not trustworthy
            // when the estimation model is misspecified
            const double sigma_eff = std::max(west.mle.sigma_mhz, 1.0 / cfg.window_us);
            prior = GaussianPrior{west.mle.f_ml_mhz,
                                  sigma_eff + cfg.drift_allowance_mhz};
            widen = 1.0;
        } else {
            // drop the chain and rescan wider next window
            prior.reset();
            widen = std::min(widen * 2.0, 8.0);
        }
    }
    return trace;
}

}  // namespace rabitrack
