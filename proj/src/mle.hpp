#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "model.hpp"
#include "record.hpp"

namespace rabitrack {

/// Trial frequencies, strictly increasing, in MHz.
struct FrequencyGrid {
    enum class Origin { Uniform, Refined, Seeded };
    std::vector<double> f_mhz;
    Origin origin = Origin::Uniform;

    static FrequencyGrid uniform(double lo_mhz, double hi_mhz, std::size_t n);
    double span() const { return f_mhz.back() - f_mhz.front(); }
};

struct GaussianPrior {
    double mean_mhz = 0.0;
    double std_mhz = 0.0;  // must be > 0
};

/// Unnormalized log-likelihood sampled over a grid (natural log; constant
/// offsets from dropped Gaussian prefactors are omitted throughout).
struct LikelihoodCurve {
    FrequencyGrid grid;
    std::vector<double> loglik;
};

struct EstimateResult {
    double f_ml_mhz = 0.0;
    double sigma_mhz = 0.0;
    double loglik_max = 0.0;
    bool converged = false;
    bool at_boundary = false;
    int rounds = 0;
    std::size_t fit_lo = 0, fit_hi = 0;  // index range used for the parabola
};

/// A record slice viewed with an estimation model. The view does not own the
/// samples; keep the record alive while evaluating.
struct RecordView {
    std::span<const double> samples;
    double dt_us;
    double duration_us() const { return static_cast<double>(samples.size()) * dt_us; }
    static RecordView of(const ReadoutRecord& rec) {
        return {std::span<const double>(rec.samples), rec.dt_us};
    }
    RecordView slice(std::size_t offset, std::size_t n) const {
        return {samples.subspan(offset, n), dt_us};
    }
};

/// Matrix-free log-likelihood engine.
///
/// Per-step measurement factors depend on the data but not on the trial
/// frequency, so they are cached once per record; each evaluation then
/// propagates a state vector (2 components for the ideal pure path, 4 for
/// the paravector path) with per-step renormalization and log accumulation.
/// Cost is linear in the record length for every trial frequency.
class LikelihoodEvaluator {
  public:
    LikelihoodEvaluator(RecordView view, const MeasurementModel& model,
                        const InitialState& initial);

    /// ln P(record | f) up to a frequency-independent constant.
    double log_likelihood(double f_mhz) const;

    /// Same value plus the analytic derivative d(loglik)/d(f_mhz), from the
    /// product-rule recursion on the propagated pair (state, d state/df).
    std::pair<double, double> log_likelihood_gradient(double f_mhz) const;

    bool pure_path() const { return pure_; }
    std::size_t size() const { return n_; }
    double duration_us() const { return static_cast<double>(n_) * dt_us_; }

  private:
    std::size_t n_;
    double dt_us_;
    bool pure_;
    PureState psi0_{};
    ParaState rho0_{};
    // pure path: diag entries of sqrt(E~)
    std::vector<double> em_, ep_;
    // paravector path: (z,p) block entries, plus the constant x/y factor
    std::vector<double> fzz_, fzp_, fpz_, fpp_;
    double exy_ = 1.0;
};

/// Evaluates the curve over a grid; points are independent and evaluated in
/// parallel, assembled in grid order. An optional Gaussian prior contributes
/// -(f-mean)^2/(2 std^2) to every point.
LikelihoodCurve grid_evaluate(const LikelihoodEvaluator& eval, FrequencyGrid grid,
                              const std::optional<GaussianPrior>& prior = std::nullopt,
                              int n_threads = 1);

struct RefineOptions {
    double target_resolution_mhz = 0.0;  // <= 0: 1/(10 T) with T the view duration
    double shrink = 5.0;
    int max_rounds = 12;
    double fit_drop = 2.0;  // parabola fitted over loglik >= max - fit_drop
    int n_threads = 1;
};

/// Iteratively re-grids around the running argmax until the spacing reaches
/// the target resolution, then fits a parabola around the peak. Returns the
/// vertex and the curvature width sigma. The initial grid must span the
/// basin of the global peak (seed from the spectral estimate or a prior).
EstimateResult refine_and_fit(const LikelihoodEvaluator& eval,
                              const FrequencyGrid& initial_grid,
                              const std::optional<GaussianPrior>& prior = std::nullopt,
                              const RefineOptions& opts = {});

struct NewtonResult {
    double f_mhz = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Safeguarded Newton polish of a stationary point of the log-likelihood,
/// using the analytic gradient. Steps are capped; divergence or a convex
/// local model raises the fallback (not-converged) flag.
NewtonResult newton_polish(const LikelihoodEvaluator& eval, double start_mhz,
                           double max_step_mhz = 0.0, int max_iterations = 20);

/// Least-squares parabola fit y ~ c - (x - x0)^2 / (2 sigma^2) over [lo, hi]
/// (inclusive). Returns false when the fitted curvature is not concave.
bool fit_parabola(std::span<const double> x, std::span<const double> y,
                  std::size_t lo, std::size_t hi, double* x0, double* sigma,
                  double* peak_value);

// Convenience wrappers over the evaluator for one-off calls.
double log_likelihood(const ReadoutRecord& record, double f_mhz,
                      const MeasurementModel& model, const InitialState& initial);
std::pair<double, double> log_likelihood_gradient(const ReadoutRecord& record,
                                                  double f_mhz,
                                                  const MeasurementModel& model,
                                                  const InitialState& initial);

}  // namespace rabitrack
