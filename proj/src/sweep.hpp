#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mle.hpp"
#include "model.hpp"

namespace rabitrack {

enum class SweepEstimator { Mle, Fft, Both };

struct SweepConfig {
    std::vector<double> t_us;      // record durations
    std::vector<double> tau_m_us;  // measurement times
    int n_ensemble = 100;
    double f_true_mhz = 1.0;
    double dt_us = 0.01;
    double eta = 1.0;
    double t1_us = std::numeric_limits<double>::infinity();
    double t2_us = std::numeric_limits<double>::infinity();
    SweepEstimator estimator = SweepEstimator::Both;
    std::uint64_t master_seed = 1;
    int n_threads = 1;
    InitialState initial = InitialState::ground();
    // MLE search settings shared by all cells
    double search_span_mhz = 0.6;  // grid span around the FFT seed
    int grid_points = 21;
};

struct SweepCell {
    double t_us = 0.0;
    double tau_m_us = 0.0;
    double rms_mle_mhz = std::numeric_limits<double>::quiet_NaN();
    double rms_fft_mhz = std::numeric_limits<double>::quiet_NaN();
    int n_ensemble = 0;
    int mle_failures = 0;
    int fft_failures = 0;
};

struct SweepResult {
    SweepConfig cfg;
    std::vector<SweepCell> cells;  // row-major: t index outer, tau_m inner
};

/// Root-mean-square deviation of the estimates from the true frequency.
/// Throws std::invalid_argument on an empty list.
double rms_error(std::span<const double> estimates_mhz, double f_true_mhz);

/// Per cell (T, tau_m): simulates n_ensemble independent records at f_true
/// and runs the selected estimators. Member streams derive from (master
/// seed, cell index, member index), so results are independent of execution
/// order and thread count. Individual estimator failures are counted per
/// cell, excluded from the RMS, and never abort the sweep.
SweepResult run_sweep(const SweepConfig& cfg);

}  // namespace rabitrack
