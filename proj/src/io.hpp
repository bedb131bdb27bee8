#pragma once

#include <string>

#include "mle.hpp"
#include "spectral.hpp"
#include "sweep.hpp"
#include "tracker.hpp"

// Fixed-schema CSV/JSON exports. Column names are part of the interface
// contract; all frequency columns are MHz and all time columns microseconds.
// Writers are deterministic: no timestamps, fixed formatting.

namespace rabitrack {

void save_curve_csv(const LikelihoodCurve& curve, const std::string& path);
void save_spectrum_csv(const Spectrum& spec, const std::string& path);
void save_trace_csv(const DriftTrace& trace, const std::string& path);
void save_sweep_csv(const SweepResult& result, const std::string& path);
std::string estimate_to_json(const EstimateResult& est, double fft_seed_mhz);

}  // namespace rabitrack
