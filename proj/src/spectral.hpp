#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mle.hpp"
#include "record.hpp"

namespace rabitrack {

/// One-sided power spectral density on the grid f_k = k/T, k = 0..floor(N/2).
///
/// Normalization: S(f_k) = |DFT_k|^2 * dt / N with an unnormalized forward
/// DFT. Interior bins are NOT doubled, so a white record of variance
/// tau_m/dt has expected level tau_m across the band and the driven-qubit
/// peak sits 4*tau_m above it. This convention is the single source of truth
/// for all spectral levels in the library.
struct Spectrum {
    std::vector<double> f_mhz;
    std::vector<double> power;
    double df_mhz = 0.0;
    double dt_us = 0.0;
    std::size_t n_samples = 0;  // length of the originating record
    std::string meta;

    double nyquist_mhz() const { return 0.5 / dt_us; }
};

Spectrum periodogram(const RecordView& view);
inline Spectrum periodogram(const ReadoutRecord& rec) {
    return periodogram(RecordView::of(rec));
}

/// Total power reconstructed over the full (two-sided) DFT grid using
/// conjugate symmetry; equals mean(r^2) for any record (Parseval).
double total_power(const Spectrum& spec);

/// Convolution with a normalized triangular kernel over 2*half_width+1 bins;
/// near the edges the kernel is renormalized over the available bins.
Spectrum triangular_filter(const Spectrum& spec, int half_width_bins);

/// Filter half-width matched to the expected spectral peak: roughly half of
/// the T/(2 pi tau_m) bins that fit inside the peak, never below 2.
int default_half_width_bins(double duration_us, double tau_m_us);

struct PeakOptions {
    double band_lo_mhz = 0.0;
    double band_hi_mhz = 0.0;  // <= 0: up to Nyquist
    int exclude_dc_bins = 2;
    bool parabolic = true;  // 3-point log-power interpolation around the argmax
};

/// Frequency of the maximum filtered power within the band, after dropping
/// the lowest exclude_dc_bins bins (suppresses the Zeno/DC peak). Throws
/// std::invalid_argument when the band selects no bins.
double peak_estimate(const Spectrum& spec, const PeakOptions& opts = {});

/// Reference Lorentzian line shape: background tau_m plus a peak of height
/// 4*tau_m above it, FWHM 1/(2 pi tau_m) (MHz for tau_m in us).
double lorentzian_model(double f_mhz, double f0_mhz, double tau_m_us);

struct FftEstimateOptions {
    double band_lo_mhz = 0.0;
    double band_hi_mhz = 0.0;   // <= 0: up to Nyquist
    int exclude_dc_bins = 2;
    int filter_half_width = -1;  // < 0: default from (T, tau_m); 0: no filter
    bool parabolic = true;
};

/// The standard FFT pipeline: periodogram, triangular filter, banded peak
/// pick. tau_m_us is only used to size the default filter.
double fft_estimate(const RecordView& view, double tau_m_us,
                    const FftEstimateOptions& opts = {});
inline double fft_estimate(const ReadoutRecord& rec, const FftEstimateOptions& opts = {}) {
    return fft_estimate(RecordView::of(rec), rec.model.tau_m_us, opts);
}

}  // namespace rabitrack
