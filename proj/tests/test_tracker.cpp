#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rng.hpp"
#include "tracker.hpp"

using namespace rabitrack;

namespace {

double trace_rms_vs_profile(const DriftTrace& trace, const OmegaProfile& profile,
                            bool use_fft) {
    double acc = 0.0;
    for (const auto& p : trace.points) {
        const double truth = profile.f_mhz_at(p.t_mid_us);
        const double est = use_fft ? p.f_fft_mhz : p.f_ml_mhz;
        acc += (est - truth) * (est - truth);
    }
    return std::sqrt(acc / static_cast<double>(trace.points.size()));
}

}  // namespace

TEST_CASE("trace timestamps are the exact window midpoints") {
    auto model = make_measurement_model(0.65, 0.01);
    auto rec = simulate_record(OmegaProfile::constant(1.0), model, 10000, ParaState::ground(), 1);
    TrackerConfig cfg;
    cfg.window_us = 40.0;
    cfg.step_us = 10.0;
    cfg.nominal_f_mhz = 1.0;
    auto trace = track(rec, model, cfg);
    REQUIRE(trace.points.size() == 7);  // (100 - 40)/10 + 1
    for (std::size_t k = 0; k < trace.points.size(); ++k) {
        CHECK(trace.points[k].t_mid_us == static_cast<double>(k) * 10.0 + 20.0);
        CHECK(trace.points[k].window_end_us - trace.points[k].window_start_us == 40.0);
    }
}

TEST_CASE("constant-frequency record yields a flat trace") {
    auto model = make_measurement_model(0.65, 0.01);
    auto rec = simulate_record(OmegaProfile::constant(1.0), model, 20000, ParaState::ground(), 5);
    TrackerConfig cfg;
    cfg.nominal_f_mhz = 1.0;
    auto trace = track(rec, model, cfg);
    for (const auto& p : trace.points) {
        REQUIRE(p.converged);
        CHECK(std::abs(p.f_ml_mhz - 1.0) < 3.0 * p.sigma_mhz + 0.01);
    }
}

TEST_CASE("window_estimate without a prior is plain FFT-then-MLE") {
    auto model = make_measurement_model(0.65, 0.01);
    auto rec = simulate_record(OmegaProfile::constant(1.0), model, 4000, ParaState::ground(), 8);
    TrackerConfig cfg;
    cfg.nominal_f_mhz = 1.0;
    auto west = window_estimate(RecordView::of(rec), model, std::nullopt, cfg);
    CHECK(west.mle.converged);
    CHECK(std::abs(west.f_fft_mhz - 1.0) < 0.15);
    CHECK(std::abs(west.mle.f_ml_mhz - 1.0) < 0.05);
    CHECK_FALSE(west.prior_dominated);
}

TEST_CASE("an overwhelming prior dominates the window and trips the guard") {
    auto model = make_measurement_model(0.65, 0.01);
    auto rec = simulate_record(OmegaProfile::constant(1.0), model, 4000, ParaState::ground(), 9);
    TrackerConfig cfg;
    cfg.nominal_f_mhz = 1.0;
    GaussianPrior tight{1.2, 1e-5};  // confidently wrong
    auto west = window_estimate(RecordView::of(rec), model, tight, cfg);
    CHECK(west.mle.f_ml_mhz == doctest::Approx(1.2).epsilon(1e-3));
    CHECK(west.prior_dominated);
}

TEST_CASE("tracking a drifting frequency") {
    const double horizon = 400.0;
    auto profile = make_drift_profile(1.0, 0.4, 40.0, horizon, 61);
    auto model = make_measurement_model(0.65, 0.01);
    const auto n_steps = static_cast<std::size_t>(horizon / 0.01);
    auto rec = simulate_record(profile, model, n_steps, ParaState::ground(), 62);

    TrackerConfig cfg;
    cfg.nominal_f_mhz = 1.0;
    auto trace = track(rec, model, cfg);
    REQUIRE(trace.points.size() == 37);

    const double rms_mle = trace_rms_vs_profile(trace, profile, false);
    const double rms_fft = trace_rms_vs_profile(trace, profile, true);
    CHECK(rms_mle < 0.1);
    CHECK(rms_mle < rms_fft);
}

TEST_CASE("window-length trade-off for drifting versus static drives") {
    auto model = make_measurement_model(0.65, 0.01);

    // sinusoidal drift with an 80 us period resolved by 40 us windows but
    // washed out by 80 us windows
    std::vector<OmegaProfile::Waypoint> wps;
    for (double t = 0.0; t <= 320.0; t += 5.0)
        wps.push_back({t, 1.0 + 0.15 * std::sin(kTwoPi * t / 80.0)});
    auto drifting = OmegaProfile::piecewise_linear(wps);
    const auto n_steps = static_cast<std::size_t>(320.0 / 0.01);
    auto drifting_rec = simulate_record(drifting, model, n_steps, ParaState::ground(), 71);

    TrackerConfig short_cfg;
    short_cfg.window_us = 40.0;
    short_cfg.step_us = 20.0;
    short_cfg.nominal_f_mhz = 1.0;
    TrackerConfig long_cfg = short_cfg;
    long_cfg.window_us = 80.0;

    const double short_err =
        trace_rms_vs_profile(track(drifting_rec, model, short_cfg), drifting, false);
    const double long_err =
        trace_rms_vs_profile(track(drifting_rec, model, long_cfg), drifting, false);
    CHECK(short_err < long_err);

    // for a constant drive the ordering reverses (longer windows average more)
    auto constant = OmegaProfile::constant(1.0);
    auto static_rec = simulate_record(constant, model, n_steps, ParaState::ground(), 72);
    const double short_static =
        trace_rms_vs_profile(track(static_rec, model, short_cfg), constant, false);
    const double long_static =
        trace_rms_vs_profile(track(static_rec, model, long_cfg), constant, false);
    CHECK(long_static < short_static);
}

TEST_CASE("nonideal records are tracked by both the aware and the ideal model") {
    const double horizon = 240.0;
    auto profile = make_drift_profile(1.0, 0.4, 40.0, horizon, 81);
    auto nonideal = make_measurement_model(0.65, 0.01, 0.5, 50.0, 30.0);
    const auto n_steps = static_cast<std::size_t>(horizon / 0.01);
    auto rec = simulate_record(profile, nonideal, n_steps, ParaState::ground(), 82);

    TrackerConfig cfg;
    cfg.nominal_f_mhz = 1.0;
    auto aware = track(rec, nonideal, cfg);
    auto naive = track(rec, make_measurement_model(0.65, 0.01), cfg);

    const double rms_aware = trace_rms_vs_profile(aware, profile, false);
    const double rms_naive = trace_rms_vs_profile(naive, profile, false);
    CHECK(rms_aware < 0.1);
    CHECK(rms_naive < 0.1);
}

TEST_CASE("tracker input validation") {
    auto model = make_measurement_model(0.65, 0.01);
    auto rec = simulate_record(OmegaProfile::constant(1.0), model, 1000, ParaState::ground(), 2);
    TrackerConfig cfg;
    cfg.window_us = 40.0;  // longer than the 10 us record
    CHECK_THROWS_AS(track(rec, model, cfg), std::invalid_argument);
    cfg.window_us = 5.0;
    cfg.step_us = 10.0;  // step > window
    CHECK_THROWS_AS(track(rec, model, cfg), std::invalid_argument);
}
