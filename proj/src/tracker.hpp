#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mle.hpp"
#include "record.hpp"
#include "spectral.hpp"

namespace rabitrack {

enum class SeedMode { Fft, Previous, Both };

struct TrackerConfig {
    double window_us = 40.0;
    double step_us = 10.0;
    SeedMode seed_mode = SeedMode::Both;
    double drift_allowance_mhz = 0.05;  // added to the previous sigma per step
    double nominal_f_mhz = 0.0;         // > 0: FFT band defaults to [0, 2*nominal]
    double search_halo_mhz = 0.2;       // FFT band half-width around the previous estimate
    double no_prior_span_mhz = 0.0;     // <= 0: max(10/T_w, 0.25)
    double target_resolution_mhz = 0.0; // <= 0: 1/(10 T_w)
    int grid_points = 17;
    int n_threads = 1;
    // Initial state per window. The state at a window boundary is unknown, so
    // paravector windows start maximally mixed (flattens, never biases, the
    // likelihood) and pure-path windows start in the equal superposition.
    // Set explicitly (e.g. ground) to reproduce prepared-state runs.
    std::optional<InitialState> initial;
};

struct TracePoint {
    double t_mid_us = 0.0;
    double f_ml_mhz = 0.0;
    double sigma_mhz = 0.0;
    double f_fft_mhz = 0.0;
    double window_start_us = 0.0;
    double window_end_us = 0.0;
    bool converged = false;
    bool prior_dominated = false;
};

struct DriftTrace {
    std::vector<TracePoint> points;
    double window_us = 0.0;
    double step_us = 0.0;
};

struct WindowEstimate {
    EstimateResult mle;
    double f_fft_mhz = 0.0;
    bool prior_dominated = false;
};

/// Single-window pipeline: FFT seed (within the configured band), MLE
/// refinement on a grid centered on the seed, optional Gaussian-prior fusion.
/// Exposed separately for testing and streaming use.
WindowEstimate window_estimate(const RecordView& window,
                               const MeasurementModel& est_model,
                               const std::optional<GaussianPrior>& prior,
                               const TrackerConfig& cfg);

/// Moving-window tracking of a drifting drive frequency. Windows advance by
/// cfg.step_us; each trace point is reported at the window midpoint. With
/// prior chaining (seed modes Previous/Both) windows run sequentially; in
/// Fft mode windows are independent.
DriftTrace track(const ReadoutRecord& record, const MeasurementModel& est_model,
                 const TrackerConfig& cfg);

}  // namespace rabitrack
