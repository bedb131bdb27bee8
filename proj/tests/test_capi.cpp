#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "rabitrack.h"

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

const double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("capi: version and error reporting") {
    CHECK(std::strlen(rabitrack_version()) > 0);

    rabitrack_model* m = nullptr;
    CHECK(rabitrack_model_create(-1.0, 0.01, 1.0, kInf, kInf, &m) ==
          RABITRACK_ERR_INVALID_ARGUMENT);
    CHECK(std::string(rabitrack_last_error()).find("tau_m") != std::string::npos);
    CHECK(m == nullptr);
}

TEST_CASE("capi: model lifecycle and derived rates") {
    rabitrack_model* m = nullptr;
    REQUIRE(rabitrack_model_create(0.65, 0.01, 0.5, 50.0, 30.0, &m) == RABITRACK_OK);
    CHECK(rabitrack_model_tau_m_us(m) == 0.65);
    CHECK(rabitrack_model_eta(m) == 0.5);
    CHECK(rabitrack_model_gamma_m(m) == doctest::Approx(1.0 / (2.0 * 0.5 * 0.65)));
    CHECK(rabitrack_model_gamma(m) ==
          doctest::Approx(1.0 / 0.65 + 1.0 / 30.0 + 1.0 / 100.0));
    rabitrack_model_free(m);
    rabitrack_model_free(nullptr);  // free tolerates NULL
}

TEST_CASE("capi: profile constant, drift, waypoints, JSON round-trip") {
    rabitrack_profile* p = nullptr;
    REQUIRE(rabitrack_profile_constant(1.0, &p) == RABITRACK_OK);
    double f = 0.0;
    CHECK(rabitrack_profile_eval(p, 123.0, &f) == RABITRACK_OK);
    CHECK(f == 1.0);
    rabitrack_profile_free(p);

    rabitrack_profile* drift = nullptr;
    REQUIRE(rabitrack_profile_drift(1.0, 0.4, 40.0, 400.0, 7, &drift) == RABITRACK_OK);
    CHECK(rabitrack_profile_eval(drift, 200.0, &f) == RABITRACK_OK);
    CHECK(f >= 0.8);
    CHECK(f <= 1.2);
    // out-of-range evaluation is an error, not an extrapolation
    CHECK(rabitrack_profile_eval(drift, 1e6, &f) == RABITRACK_ERR_INVALID_ARGUMENT);

    const auto path = temp_path("capi_profile.json");
    REQUIRE(rabitrack_profile_save_json(drift, path.c_str()) == RABITRACK_OK);
    rabitrack_profile* back = nullptr;
    REQUIRE(rabitrack_profile_load_json(path.c_str(), &back) == RABITRACK_OK);
    double f2 = 0.0;
    CHECK(rabitrack_profile_eval(back, 200.0, &f2) == RABITRACK_OK);
    CHECK(rabitrack_profile_eval(drift, 200.0, &f) == RABITRACK_OK);
    CHECK(f2 == doctest::Approx(f).epsilon(1e-12));
    rabitrack_profile_free(back);
    rabitrack_profile_free(drift);
    std::remove(path.c_str());

    const double ts[3] = {0.0, 10.0, 20.0};
    const double fs[3] = {1.0, 1.2, 0.9};
    rabitrack_profile* wp = nullptr;
    REQUIRE(rabitrack_profile_from_waypoints(ts, fs, 3, &wp) == RABITRACK_OK);
    CHECK(rabitrack_profile_eval(wp, 5.0, &f) == RABITRACK_OK);
    CHECK(f == doctest::Approx(1.1));
    rabitrack_profile_free(wp);
}

TEST_CASE("capi: simulate, save, load, estimate round trip") {
    rabitrack_model* model = nullptr;
    REQUIRE(rabitrack_model_create(1.0, 0.01, 1.0, kInf, kInf, &model) == RABITRACK_OK);
    rabitrack_profile* profile = nullptr;
    REQUIRE(rabitrack_profile_constant(1.0, &profile) == RABITRACK_OK);

    rabitrack_record* rec = nullptr;
    REQUIRE(rabitrack_simulate(profile, model, 5000, RABITRACK_STATE_GROUND, 7, &rec) ==
            RABITRACK_OK);
    CHECK(rabitrack_record_length(rec) == 5000);
    CHECK(rabitrack_record_dt_us(rec) == 0.01);
    CHECK(rabitrack_record_seed(rec) == 7);
    const double* samples = rabitrack_record_samples(rec);
    REQUIRE(samples != nullptr);

    const auto path = temp_path("capi_record.csv");
    REQUIRE(rabitrack_record_save(rec, path.c_str(), RABITRACK_FORMAT_CSV) == RABITRACK_OK);
    rabitrack_record* loaded = nullptr;
    REQUIRE(rabitrack_record_load(path.c_str(), &loaded) == RABITRACK_OK);
    REQUIRE(rabitrack_record_length(loaded) == 5000);
    const double* loaded_samples = rabitrack_record_samples(loaded);
    for (size_t i = 0; i < 5000; i += 977) CHECK(samples[i] == loaded_samples[i]);

    rabitrack_model* meta = nullptr;
    REQUIRE(rabitrack_record_model(loaded, &meta) == RABITRACK_OK);
    CHECK(rabitrack_model_tau_m_us(meta) == 1.0);
    CHECK(std::isinf(rabitrack_model_t1_us(meta)));
    rabitrack_model_free(meta);

    // FFT then MLE on the loaded record
    double f_fft = 0.0;
    rabitrack_fft_options fopts;
    rabitrack_fft_options_init(&fopts);
    fopts.band_hi_mhz = 2.0;
    REQUIRE(rabitrack_estimate_fft(loaded, &fopts, &f_fft) == RABITRACK_OK);
    CHECK(std::abs(f_fft - 1.0) < 0.15);

    rabitrack_mle_options mopts;
    rabitrack_mle_options_init(&mopts);
    rabitrack_estimate est{};
    REQUIRE(rabitrack_estimate_mle(loaded, nullptr, &mopts, &est) == RABITRACK_OK);
    CHECK(est.converged == 1);
    CHECK(std::abs(est.f_ml_mhz - 1.0) < 0.05);
    CHECK(est.sigma_mhz > 0.0);
    CHECK(std::isfinite(est.fft_seed_mhz));  // seeded from FFT by default

    // pointwise log-likelihood with gradient
    double ll = 0.0, grad = 0.0;
    REQUIRE(rabitrack_log_likelihood(loaded, nullptr, RABITRACK_STATE_GROUND,
                                     est.f_ml_mhz, &ll, &grad) == RABITRACK_OK);
    CHECK(std::isfinite(ll));
    CHECK(std::abs(grad) < 1.0);  // near-stationary at the estimate

    rabitrack_record_free(loaded);
    rabitrack_record_free(rec);
    rabitrack_profile_free(profile);
    rabitrack_model_free(model);
    std::remove(path.c_str());
}

TEST_CASE("capi: malformed files map to FORMAT/IO statuses") {
    rabitrack_record* rec = nullptr;
    CHECK(rabitrack_record_load(temp_path("capi_missing.csv").c_str(), &rec) ==
          RABITRACK_ERR_IO);

    const auto path = temp_path("capi_bad.csv");
    {
        std::FILE* fp = std::fopen(path.c_str(), "w");
        std::fputs("# n=3\n# dt_us=0.01\n# tau_m_us=1\n# eta=1\n# t1_us=inf\n"
                   "# t2_us=inf\n# seed=0\n1.0\n2.0\n",
                   fp);
        std::fclose(fp);
    }
    CHECK(rabitrack_record_load(path.c_str(), &rec) == RABITRACK_ERR_FORMAT);
    std::remove(path.c_str());
}

TEST_CASE("capi: likelihood curve accessors and CSV export") {
    rabitrack_model* model = nullptr;
    REQUIRE(rabitrack_model_create(1.0, 0.01, 1.0, kInf, kInf, &model) == RABITRACK_OK);
    rabitrack_profile* profile = nullptr;
    REQUIRE(rabitrack_profile_constant(1.0, &profile) == RABITRACK_OK);
    rabitrack_record* rec = nullptr;
    REQUIRE(rabitrack_simulate(profile, model, 2000, RABITRACK_STATE_GROUND, 3, &rec) ==
            RABITRACK_OK);

    rabitrack_curve* curve = nullptr;
    REQUIRE(rabitrack_likelihood_curve(rec, nullptr, nullptr, 0.8, 1.2, 41, &curve) ==
            RABITRACK_OK);
    REQUIRE(rabitrack_curve_length(curve) == 41);
    double f = 0.0, ll = 0.0;
    REQUIRE(rabitrack_curve_point(curve, 0, &f, &ll) == RABITRACK_OK);
    CHECK(f == doctest::Approx(0.8));
    CHECK(rabitrack_curve_point(curve, 41, &f, &ll) == RABITRACK_ERR_INVALID_ARGUMENT);

    const auto path = temp_path("capi_curve.csv");
    REQUIRE(rabitrack_curve_save_csv(curve, path.c_str()) == RABITRACK_OK);
    CHECK(std::filesystem::file_size(path) > 0);
    std::remove(path.c_str());

    rabitrack_curve_free(curve);
    rabitrack_record_free(rec);
    rabitrack_profile_free(profile);
    rabitrack_model_free(model);
}

TEST_CASE("capi: spectrum accessors") {
    rabitrack_model* model = nullptr;
    REQUIRE(rabitrack_model_create(1.0, 0.01, 1.0, kInf, kInf, &model) == RABITRACK_OK);
    rabitrack_profile* profile = nullptr;
    REQUIRE(rabitrack_profile_constant(1.0, &profile) == RABITRACK_OK);
    rabitrack_record* rec = nullptr;
    REQUIRE(rabitrack_simulate(profile, model, 5000, RABITRACK_STATE_GROUND, 3, &rec) ==
            RABITRACK_OK);

    rabitrack_spectrum* spec = nullptr;
    REQUIRE(rabitrack_spectrum_compute(rec, 2, &spec) == RABITRACK_OK);
    CHECK(rabitrack_spectrum_length(spec) == 2501);
    double f = 0.0, p = 0.0;
    REQUIRE(rabitrack_spectrum_point(spec, 50, &f, &p) == RABITRACK_OK);
    CHECK(f == doctest::Approx(1.0));
    CHECK(p > 0.0);
    rabitrack_spectrum_free(spec);
    rabitrack_record_free(rec);
    rabitrack_profile_free(profile);
    rabitrack_model_free(model);
}

TEST_CASE("capi: tracking a drifting record end to end") {
    rabitrack_profile* profile = nullptr;
    REQUIRE(rabitrack_profile_drift(1.0, 0.4, 40.0, 200.0, 91, &profile) == RABITRACK_OK);
    rabitrack_model* model = nullptr;
    REQUIRE(rabitrack_model_create(0.65, 0.01, 1.0, kInf, kInf, &model) == RABITRACK_OK);
    rabitrack_record* rec = nullptr;
    REQUIRE(rabitrack_simulate(profile, model, 20000, RABITRACK_STATE_GROUND, 92, &rec) ==
            RABITRACK_OK);

    rabitrack_track_options topts;
    rabitrack_track_options_init(&topts);
    topts.nominal_f_mhz = 1.0;
    rabitrack_trace* trace = nullptr;
    REQUIRE(rabitrack_track(rec, nullptr, &topts, &trace) == RABITRACK_OK);
    REQUIRE(rabitrack_trace_length(trace) == 17);  // (200-40)/10 + 1

    for (size_t i = 0; i < rabitrack_trace_length(trace); ++i) {
        double t_mid = 0.0, f_ml = 0.0, sigma = 0.0, f_fft = 0.0;
        REQUIRE(rabitrack_trace_point(trace, i, &t_mid, &f_ml, &sigma, &f_fft) ==
                RABITRACK_OK);
        double truth = 0.0;
        REQUIRE(rabitrack_profile_eval(profile, t_mid, &truth) == RABITRACK_OK);
        if (rabitrack_trace_converged(trace, i)) CHECK(std::abs(f_ml - truth) < 0.12);
    }

    const auto path = temp_path("capi_trace.csv");
    REQUIRE(rabitrack_trace_save_csv(trace, path.c_str()) == RABITRACK_OK);
    std::remove(path.c_str());

    rabitrack_trace_free(trace);
    rabitrack_record_free(rec);
    rabitrack_model_free(model);
    rabitrack_profile_free(profile);
}

TEST_CASE("capi: sweep surface") {
    const double t_us[2] = {10.0, 20.0};
    const double tau_us[1] = {0.65};
    rabitrack_sweep_options opts;
    rabitrack_sweep_options_init(&opts);
    opts.t_us = t_us;
    opts.n_t = 2;
    opts.tau_m_us = tau_us;
    opts.n_tau = 1;
    opts.n_ensemble = 4;
    opts.master_seed = 31;

    rabitrack_sweep* sweep = nullptr;
    REQUIRE(rabitrack_sweep_run(&opts, &sweep) == RABITRACK_OK);
    REQUIRE(rabitrack_sweep_cells(sweep) == 2);
    double t = 0.0, tau = 0.0, rms_mle = 0.0, rms_fft = 0.0;
    int fail_mle = 0, fail_fft = 0;
    REQUIRE(rabitrack_sweep_cell(sweep, 1, &t, &tau, &rms_mle, &rms_fft, &fail_mle,
                                 &fail_fft) == RABITRACK_OK);
    CHECK(t == 20.0);
    CHECK(tau == 0.65);
    CHECK(rms_mle >= 0.0);
    CHECK(rms_fft >= 0.0);
    rabitrack_sweep_free(sweep);
}

TEST_CASE("capi: projective baseline") {
    std::vector<uint8_t> bits(400);
    REQUIRE(rabitrack_projective_simulate(1.0, 0.25, bits.size(), 0, 5, bits.data()) ==
            RABITRACK_OK);
    size_t n = 0;
    REQUIRE(rabitrack_projective_count_switches(bits.data(), bits.size(), 0, &n) ==
            RABITRACK_OK);
    CHECK(n <= bits.size());

    double f_ml = 0.0, sigma = 0.0;
    int boundary = 0;
    REQUIRE(rabitrack_projective_estimate(n, bits.size(), 0.25, &f_ml, &sigma,
                                          &boundary) == RABITRACK_OK);
    // omega tau = pi/2 at f = 1 MHz, tau = 0.25 us: flips half the time
    CHECK(f_ml == doctest::Approx(1.0).epsilon(0.1));
    // sigma = 1/(2 pi tau sqrt(N)) in MHz
    CHECK(sigma == doctest::Approx(1.0 / (6.283185307179586 * 0.25 * 20.0)).epsilon(1e-12));
    CHECK(boundary == 0);

    double ll = 0.0;
    REQUIRE(rabitrack_projective_loglike(n, bits.size(), 1.0, 0.25, &ll) == RABITRACK_OK);
    CHECK(std::isfinite(ll));
}
