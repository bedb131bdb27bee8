#include "sweep.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parallel.hpp"
#include "profile.hpp"
#include "record.hpp"
#include "rng.hpp"
#include "spectral.hpp"

namespace rabitrack {

double rms_error(std::span<const double> estimates_mhz, double f_true_mhz) {
    if (estimates_mhz.empty()) throw std::invalid_argument("rms_error: empty estimate list");
    double acc = 0.0;
    for (double f : estimates_mhz) {
        const double d = f - f_true_mhz;
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(estimates_mhz.size()));
}

namespace {

struct MemberOutcome {
    double f_mle = std::numeric_limits<double>::quiet_NaN();
    double f_fft = std::numeric_limits<double>::quiet_NaN();
    bool mle_ok = false;
    bool fft_ok = false;
};

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
    if (cfg.t_us.empty() || cfg.tau_m_us.empty())
        throw std::invalid_argument("sweep: T and tau_m value lists must be nonempty");
    if (cfg.n_ensemble < 1) throw std::invalid_argument("sweep: n_ensemble must be >= 1");

    const std::size_t n_cells = cfg.t_us.size() * cfg.tau_m_us.size();
    const auto n_members = static_cast<std::size_t>(cfg.n_ensemble);
    const bool want_mle = cfg.estimator != SweepEstimator::Fft;
    const bool want_fft = cfg.estimator != SweepEstimator::Mle;

    std::vector<MemberOutcome> outcomes(n_cells * n_members);
    const OmegaProfile profile = OmegaProfile::constant(cfg.f_true_mhz);

    parallel_for_index(n_cells * n_members, cfg.n_threads, [&](std::size_t task) {
        const std::size_t cell = task / n_members;
        const std::size_t member = task % n_members;
        const double t = cfg.t_us[cell / cfg.tau_m_us.size()];
        const double tau_m = cfg.tau_m_us[cell % cfg.tau_m_us.size()];

        const MeasurementModel model =
            make_measurement_model(tau_m, cfg.dt_us, cfg.eta, cfg.t1_us, cfg.t2_us);
        const auto n_steps = static_cast<std::size_t>(std::llround(t / cfg.dt_us));
        const std::uint64_t stream = derive_stream(cfg.master_seed, {cell, member});
        const ReadoutRecord rec =
            simulate_record(profile, model, n_steps, cfg.initial.rho, stream);

        MemberOutcome& out = outcomes[task];
        try {
            FftEstimateOptions fopts;
            fopts.band_hi_mhz = 2.0 * cfg.f_true_mhz;
            out.f_fft = fft_estimate(rec, fopts);
            out.fft_ok = std::isfinite(out.f_fft);
        } catch (const std::exception&) {
            out.fft_ok = false;
        }
        if (want_mle) {
            try {
                const double seed_f = out.fft_ok ? out.f_fft : cfg.f_true_mhz;
                const double lo = std::max(seed_f - 0.5 * cfg.search_span_mhz, 1e-4);
                FrequencyGrid grid = FrequencyGrid::uniform(
                    lo, lo + cfg.search_span_mhz, static_cast<std::size_t>(cfg.grid_points));
                grid.origin = FrequencyGrid::Origin::Seeded;
                LikelihoodEvaluator eval(RecordView::of(rec), model, cfg.initial);
                const EstimateResult est = refine_and_fit(eval, grid);
                out.f_mle = est.f_ml_mhz;
                out.mle_ok = est.converged;
            } catch (const std::exception&) {
                out.mle_ok = false;
            }
        }
    });

    SweepResult result;
    result.cfg = cfg;
    result.cells.resize(n_cells);
    for (std::size_t cell = 0; cell < n_cells; ++cell) {
        SweepCell& c = result.cells[cell];
        c.t_us = cfg.t_us[cell / cfg.tau_m_us.size()];
        c.tau_m_us = cfg.tau_m_us[cell % cfg.tau_m_us.size()];
        c.n_ensemble = cfg.n_ensemble;
        std::vector<double> mle, fft;
        for (std::size_t member = 0; member < n_members; ++member) {
            const MemberOutcome& o = outcomes[cell * n_members + member];
            if (o.mle_ok) mle.push_back(o.f_mle);
            else if (want_mle) ++c.mle_failures;
            if (o.fft_ok) fft.push_back(o.f_fft);
            else if (want_fft) ++c.fft_failures;
        }
        if (want_mle && !mle.empty()) c.rms_mle_mhz = rms_error(mle, cfg.f_true_mhz);
        if (want_fft && !fft.empty()) c.rms_fft_mhz = rms_error(fft, cfg.f_true_mhz);
    }
    return result;
}

}  // namespace rabitrack
