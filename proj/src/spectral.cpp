#include "spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace rabitrack {

namespace {

// FFTW planning is not thread-safe; executions on distinct buffers are.
std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

Spectrum periodogram(const RecordView& view) {
    const std::size_t n = view.samples.size();
    if (n < 2) throw std::invalid_argument("periodogram: need at least 2 samples");

    const std::size_t n_bins = n / 2 + 1;
    std::vector<double> in(view.samples.begin(), view.samples.end());
    std::vector<std::complex<double>> out(n_bins);

    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_plan plan = fftw_plan_dft_r2c_1d(
            static_cast<int>(n), in.data(),
            reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
        if (!plan) throw std::runtime_error("periodogram: FFTW planning failed");
        // FFTW_ESTIMATE plans do not touch the arrays during planning, so the
        // samples are still intact here.
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }

    Spectrum spec;
    spec.n_samples = n;
    spec.dt_us = view.dt_us;
    spec.df_mhz = 1.0 / view.duration_us();
    spec.f_mhz.resize(n_bins);
    spec.power.resize(n_bins);
    const double scale = view.dt_us / static_cast<double>(n);
    for (std::size_t k = 0; k < n_bins; ++k) {
        spec.f_mhz[k] = spec.df_mhz * static_cast<double>(k);
        spec.power[k] = scale * std::norm(out[k]);
    }
    spec.meta = "periodogram";
    return spec;
}

double total_power(const Spectrum& spec) {
    if (spec.power.empty()) return 0.0;
    const bool even = spec.n_samples % 2 == 0;
    double acc = spec.power.front();
    const std::size_t last = spec.power.size() - 1;
    for (std::size_t k = 1; k < last; ++k) acc += 2.0 * spec.power[k];
    if (last >= 1) acc += even ? spec.power[last] : 2.0 * spec.power[last];
    return acc * spec.df_mhz;
}

Spectrum triangular_filter(const Spectrum& spec, int half_width_bins) {
    if (half_width_bins < 1)
        throw std::invalid_argument("triangular filter: half width must be >= 1");
    const std::size_t n = spec.power.size();
    if (static_cast<std::size_t>(2 * half_width_bins + 1) > n)
        throw std::invalid_argument("triangular filter: kernel wider than spectrum");

    Spectrum out = spec;
    out.meta = spec.meta + " | triangular_filter(" + std::to_string(half_width_bins) + ")";
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0, wsum = 0.0;
        for (int d = -half_width_bins; d <= half_width_bins; ++d) {
            const auto idx = static_cast<long long>(k) + d;
            if (idx < 0 || idx >= static_cast<long long>(n)) continue;
            const double w = static_cast<double>(half_width_bins + 1 - std::abs(d));
            acc += w * spec.power[static_cast<std::size_t>(idx)];
            wsum += w;
        }
        out.power[k] = acc / wsum;
    }
    return out;
}

int default_half_width_bins(double duration_us, double tau_m_us) {
    const double points_in_peak = duration_us / (kTwoPi * tau_m_us);
    return std::max(2, static_cast<int>(std::llround(0.5 * points_in_peak)));
}

double peak_estimate(const Spectrum& spec, const PeakOptions& opts) {
    const std::size_t n = spec.power.size();
    const double hi = opts.band_hi_mhz > 0.0 ? opts.band_hi_mhz : spec.f_mhz.back();
    if (hi < opts.band_lo_mhz)
        throw std::invalid_argument("peak estimate: empty band");

    std::size_t k_lo = 0;
    while (k_lo < n && spec.f_mhz[k_lo] < opts.band_lo_mhz) ++k_lo;
    k_lo = std::max<std::size_t>(k_lo, static_cast<std::size_t>(std::max(0, opts.exclude_dc_bins)));
    std::size_t k_hi = n;
    while (k_hi > 0 && spec.f_mhz[k_hi - 1] > hi) --k_hi;
    if (k_lo >= k_hi) throw std::invalid_argument("peak estimate: band selects no bins");

    std::size_t best = k_lo;
    for (std::size_t k = k_lo + 1; k < k_hi; ++k)
        if (spec.power[k] > spec.power[best]) best = k;

    double f = spec.f_mhz[best];
    if (opts.parabolic && best > 0 && best + 1 < n) {
        const double pm = spec.power[best - 1], p0 = spec.power[best], pp = spec.power[best + 1];
        if (pm > 0.0 && p0 > 0.0 && pp > 0.0) {
            const double lm = std::log(pm), l0 = std::log(p0), lp = std::log(pp);
            const double denom = lm - 2.0 * l0 + lp;
            if (denom < 0.0) {
                double delta = 0.5 * (lm - lp) / denom;
                delta = std::clamp(delta, -0.5, 0.5);
                f += delta * spec.df_mhz;
            }
        }
    }
    return f;
}

double lorentzian_model(double f_mhz, double f0_mhz, double tau_m_us) {
    if (!(tau_m_us > 0.0)) throw std::invalid_argument("lorentzian: tau_m must be positive");
    const double hwhm = 0.5 / (kTwoPi * tau_m_us);
    const double d = f_mhz - f0_mhz;
    return tau_m_us + 4.0 * tau_m_us * hwhm * hwhm / (d * d + hwhm * hwhm);
}

double fft_estimate(const RecordView& view, double tau_m_us, const FftEstimateOptions& opts) {
    Spectrum spec = periodogram(view);
    int half_width = opts.filter_half_width;
    if (half_width < 0) half_width = default_half_width_bins(view.duration_us(), tau_m_us);
    if (half_width > 0) {
        const int max_half = static_cast<int>((spec.power.size() - 1) / 2);
        half_width = std::min(half_width, max_half);
        if (half_width >= 1) spec = triangular_filter(spec, half_width);
    }
    PeakOptions peak;
    peak.band_lo_mhz = opts.band_lo_mhz;
    peak.band_hi_mhz = opts.band_hi_mhz;
    peak.exclude_dc_bins = opts.exclude_dc_bins;
    peak.parabolic = opts.parabolic;
    return peak_estimate(spec, peak);
}

}  // namespace rabitrack
