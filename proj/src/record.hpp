#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "model.hpp"
#include "profile.hpp"

namespace rabitrack {

/// Time-binned readout record r_j plus the acquisition metadata needed to
/// interpret it. Total duration is samples.size() * dt_us.
struct ReadoutRecord {
    std::vector<double> samples;
    double dt_us = 0.01;
    MeasurementModel model;  // model the record was produced/acquired with
    std::uint64_t seed = 0;
    std::string profile_id;  // optional description of the generating profile

    std::size_t size() const { return samples.size(); }
    double duration_us() const { return static_cast<double>(samples.size()) * dt_us; }
};

/// Per-step diagnostics captured during simulation when requested.
struct SimDiagnostics {
    std::vector<double> z;  // normalized z before each measurement draw
    ParaState final_state;
};

/// Simulates a stochastic readout record of n_steps bins.
///
/// Per bin: the branch (+1/-1) is drawn from the current populations, the
/// readout from the branch Gaussian with variance tau_m/dt (the exact
/// two-Gaussian mixture, not its broad single-Gaussian limit), and the state
/// advances by the measurement step followed by the drive step, with the
/// drive frequency held constant across the bin. Ideal models use the pure
/// hyperbolic measurement step, nonideal models the dissipative one.
ReadoutRecord simulate_record(const OmegaProfile& profile,
                              const MeasurementModel& model,
                              std::size_t n_steps, const ParaState& initial,
                              std::uint64_t seed,
                              SimDiagnostics* diagnostics = nullptr);

enum class RecordFormat { Csv, Binary };

/// Persists a record. The CSV form is `# key=value` header lines (n, dt_us,
/// tau_m_us, eta, t1_us, t2_us, seed) followed by one sample per line; the
/// binary form is a fixed 64-byte header followed by little-endian float64
/// samples. Both round-trip samples bit-exactly.
void save_record(const ReadoutRecord& record, const std::string& path,
                 RecordFormat format = RecordFormat::Csv);

/// Loads either format (sniffed from the leading magic/comment byte).
/// Throws std::runtime_error on malformed headers, sample-count mismatch,
/// or non-finite samples.
ReadoutRecord load_record(const std::string& path);

}  // namespace rabitrack
