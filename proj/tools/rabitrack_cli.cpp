// rabitrack command-line front end. Talks to the core exclusively through
// the public C API (rabitrack.h); everything here is argument parsing,
// config handling, and output plumbing.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rabitrack.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(rabitrack_status st) {
    if (st != RABITRACK_OK) throw DataError(rabitrack_last_error());
}

template <typename T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, std::integral_constant<void (*)(T*), Free>>;

using ModelHandle = Handle<rabitrack_model, rabitrack_model_free>;
using ProfileHandle = Handle<rabitrack_profile, rabitrack_profile_free>;
using RecordHandle = Handle<rabitrack_record, rabitrack_record_free>;
using SpectrumHandle = Handle<rabitrack_spectrum, rabitrack_spectrum_free>;
using CurveHandle = Handle<rabitrack_curve, rabitrack_curve_free>;
using TraceHandle = Handle<rabitrack_trace, rabitrack_trace_free>;
using SweepHandle = Handle<rabitrack_sweep, rabitrack_sweep_free>;

RecordHandle load_record(const std::string& path) {
    rabitrack_record* rec = nullptr;
    check(rabitrack_record_load(path.c_str(), &rec));
    return RecordHandle(rec);
}

rabitrack_initial_state parse_initial(const std::string& name) {
    if (name == "ground") return RABITRACK_STATE_GROUND;
    if (name == "excited") return RABITRACK_STATE_EXCITED;
    if (name == "plus" || name == "superposition") return RABITRACK_STATE_SUPERPOSITION;
    if (name == "mixed") return RABITRACK_STATE_MIXED;
    if (name == "default") return RABITRACK_STATE_DEFAULT;
    throw CLI::ValidationError("--initial", "unknown initial state '" + name + "'");
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out << text << "\n";
}

// JSON config support for CLI11 (--config file.json); mirrors the TOML-style
// key = value mapping with one flat object per subcommand invocation.
class ConfigJson : public CLI::Config {
  public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override {
        return "{}\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        nlohmann::json j;
        try {
            input >> j;
        } catch (const nlohmann::json::exception& e) {
            throw CLI::FileError(std::string("JSON config parse error: ") + e.what());
        }
        if (!j.is_object()) throw CLI::FileError("JSON config must be an object");
        std::vector<CLI::ConfigItem> items;
        for (auto it = j.begin(); it != j.end(); ++it) {
            CLI::ConfigItem item;
            item.name = it.key();
            const nlohmann::json& v = it.value();
            if (v.is_array()) {
                for (const auto& e : v) item.inputs.push_back(scalar(e));
            } else {
                item.inputs.push_back(scalar(v));
            }
            items.push_back(std::move(item));
        }
        return items;
    }

  private:
    static std::string scalar(const nlohmann::json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        std::ostringstream s;
        s.precision(17);
        if (v.is_number_integer()) s << v.get<long long>();
        else if (v.is_number()) s << v.get<double>();
        else throw CLI::FileError("JSON config values must be scalars or arrays");
        return s.str();
    }
};

// Choose the config parser from the file extension; TOML-style is default.
void setup_config(CLI::App* cmd, int argc, char** argv) {
    cmd->set_config("--config", "", "configuration file (TOML; .json accepted)");
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            const std::string path = argv[i + 1];
            if (path.size() > 5 && path.substr(path.size() - 5) == ".json")
                cmd->config_formatter(std::make_shared<ConfigJson>());
        }
    }
}

// ---- simulate ---------------------------------------------------------------

struct SimulateArgs {
    double f_mhz = 1.0;
    std::string profile_path;
    double drift_fraction = 0.0;
    double drift_min_timescale_us = 40.0;
    double tau_m_us = 1.0;
    double dt_us = 0.01;
    double duration_us = 50.0;
    double eta = 1.0;
    double t1_us = std::numeric_limits<double>::infinity();
    double t2_us = std::numeric_limits<double>::infinity();
    std::string initial = "ground";
    std::uint64_t seed = 1;
    std::string out = "record.csv";
    std::string profile_out;
    bool binary = false;
};

int run_simulate(const SimulateArgs& a) {
    ProfileHandle profile;
    rabitrack_profile* p = nullptr;
    if (!a.profile_path.empty()) {
        check(rabitrack_profile_load_json(a.profile_path.c_str(), &p));
    } else if (a.drift_fraction > 0.0) {
        check(rabitrack_profile_drift(a.f_mhz, a.drift_fraction, a.drift_min_timescale_us,
                                      a.duration_us, a.seed, &p));
    } else {
        check(rabitrack_profile_constant(a.f_mhz, &p));
    }
    profile.reset(p);

    rabitrack_model* m = nullptr;
    check(rabitrack_model_create(a.tau_m_us, a.dt_us, a.eta, a.t1_us, a.t2_us, &m));
    ModelHandle model(m);

    const auto n_steps = static_cast<size_t>(std::llround(a.duration_us / a.dt_us));
    rabitrack_record* rec = nullptr;
    check(rabitrack_simulate(profile.get(), model.get(), n_steps,
                             parse_initial(a.initial), a.seed, &rec));
    RecordHandle record(rec);
    check(rabitrack_record_save(record.get(), a.out.c_str(),
                                a.binary ? RABITRACK_FORMAT_BINARY : RABITRACK_FORMAT_CSV));
    if (!a.profile_out.empty())
        check(rabitrack_profile_save_json(profile.get(), a.profile_out.c_str()));
    std::cerr << "wrote " << n_steps << " samples to " << a.out << "\n";
    return kExitOk;
}

// ---- estimate ----------------------------------------------------------------

struct EstimateMleArgs {
    std::string record_path;
    std::string out;
    std::string curve_path;
    double curve_span_mhz = 0.1;
    int curve_points = 201;
    double f0_mhz = 0.0;
    bool seed_from_fft = false;
    double span_mhz = 0.0;
    int grid_points = 0;
    double resolution_mhz = 0.0;
    double prior_mean_mhz = 0.0;
    double prior_std_mhz = 0.0;
    std::string initial = "ground";
    bool ideal = false;
    int threads = 1;
};

int run_estimate_mle(const EstimateMleArgs& a) {
    auto record = load_record(a.record_path);

    rabitrack_mle_options opts;
    rabitrack_mle_options_init(&opts);
    if (!a.seed_from_fft && a.f0_mhz > 0.0) opts.seed_f_mhz = a.f0_mhz;
    opts.span_mhz = a.span_mhz;
    opts.grid_points = a.grid_points;
    opts.target_resolution_mhz = a.resolution_mhz;
    opts.prior_mean_mhz = a.prior_mean_mhz;
    opts.prior_std_mhz = a.prior_std_mhz;
    opts.initial = parse_initial(a.initial);
    opts.ideal_model = a.ideal ? 1 : 0;
    opts.n_threads = a.threads;

    rabitrack_estimate est{};
    check(rabitrack_estimate_mle(record.get(), nullptr, &opts, &est));

    nlohmann::json j;
    j["f_ml_mhz"] = est.f_ml_mhz;
    j["sigma_mhz"] = est.sigma_mhz;
    j["loglik_max"] = est.loglik_max;
    j["converged"] = est.converged != 0;
    j["at_boundary"] = est.at_boundary != 0;
    if (std::isfinite(est.fft_seed_mhz)) j["fft_seed_mhz"] = est.fft_seed_mhz;
    write_text(a.out, j.dump(2));

    if (!a.curve_path.empty()) {
        const double lo = std::max(est.f_ml_mhz - 0.5 * a.curve_span_mhz, 1e-4);
        rabitrack_curve* curve = nullptr;
        check(rabitrack_likelihood_curve(record.get(), nullptr, &opts, lo,
                                         lo + a.curve_span_mhz,
                                         static_cast<size_t>(a.curve_points), &curve));
        CurveHandle ch(curve);
        check(rabitrack_curve_save_csv(curve, a.curve_path.c_str()));
    }
    return kExitOk;
}

struct EstimateFftArgs {
    std::string record_path;
    std::string out;
    std::string spectrum_path;
    double band_lo_mhz = 0.0;
    double band_hi_mhz = 0.0;
    int exclude_dc = -1;
    int half_width = -1;
    bool no_interp = false;
};

int run_estimate_fft(const EstimateFftArgs& a) {
    auto record = load_record(a.record_path);

    rabitrack_fft_options opts;
    rabitrack_fft_options_init(&opts);
    opts.band_lo_mhz = a.band_lo_mhz;
    opts.band_hi_mhz = a.band_hi_mhz;
    opts.exclude_dc_bins = a.exclude_dc;
    opts.filter_half_width = a.half_width;
    opts.parabolic = a.no_interp ? 0 : 1;

    double f = 0.0;
    check(rabitrack_estimate_fft(record.get(), &opts, &f));

    nlohmann::json j;
    j["f_fft_mhz"] = f;
    write_text(a.out, j.dump(2));

    if (!a.spectrum_path.empty()) {
        rabitrack_spectrum* spec = nullptr;
        check(rabitrack_spectrum_compute(record.get(), a.half_width, &spec));
        SpectrumHandle sh(spec);
        check(rabitrack_spectrum_save_csv(spec, a.spectrum_path.c_str()));
    }
    return kExitOk;
}

// ---- track -------------------------------------------------------------------

struct TrackArgs {
    std::string record_path;
    std::string out = "trace.csv";
    double window_us = 40.0;
    double step_us = 10.0;
    std::string seed_mode = "both";
    double drift_allowance_mhz = 0.05;
    double nominal_f_mhz = 0.0;
    double resolution_mhz = 0.0;
    std::string initial = "default";
    bool ideal = false;
    int threads = 1;
};

int run_track(const TrackArgs& a) {
    auto record = load_record(a.record_path);

    rabitrack_track_options opts;
    rabitrack_track_options_init(&opts);
    opts.window_us = a.window_us;
    opts.step_us = a.step_us;
    if (a.seed_mode == "fft") opts.seed_mode = RABITRACK_SEED_FFT;
    else if (a.seed_mode == "previous") opts.seed_mode = RABITRACK_SEED_PREVIOUS;
    else if (a.seed_mode == "both") opts.seed_mode = RABITRACK_SEED_BOTH;
    else throw CLI::ValidationError("--seed-mode", "expected fft, previous or both");
    opts.drift_allowance_mhz = a.drift_allowance_mhz;
    opts.nominal_f_mhz = a.nominal_f_mhz;
    opts.target_resolution_mhz = a.resolution_mhz;
    opts.initial = parse_initial(a.initial);
    opts.ideal_model = a.ideal ? 1 : 0;
    opts.n_threads = a.threads;

    rabitrack_trace* trace = nullptr;
    check(rabitrack_track(record.get(), nullptr, &opts, &trace));
    TraceHandle th(trace);
    check(rabitrack_trace_save_csv(trace, a.out.c_str()));
    std::cerr << "wrote " << rabitrack_trace_length(trace) << " trace points to "
              << a.out << "\n";
    return kExitOk;
}

// ---- sweep ---------------------------------------------------------------------

struct SweepArgs {
    std::vector<double> t_us;
    std::vector<double> tau_m_us;
    int n_ensemble = 100;
    double f_true_mhz = 1.0;
    double dt_us = 0.01;
    double eta = 1.0;
    double t1_us = std::numeric_limits<double>::infinity();
    double t2_us = std::numeric_limits<double>::infinity();
    std::string estimator = "both";
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out = "sweep.csv";
};

int run_sweep_cmd(const SweepArgs& a) {
    rabitrack_sweep_options opts;
    rabitrack_sweep_options_init(&opts);
    opts.t_us = a.t_us.data();
    opts.n_t = a.t_us.size();
    opts.tau_m_us = a.tau_m_us.data();
    opts.n_tau = a.tau_m_us.size();
    opts.n_ensemble = a.n_ensemble;
    opts.f_true_mhz = a.f_true_mhz;
    opts.dt_us = a.dt_us;
    opts.eta = a.eta;
    opts.t1_us = a.t1_us;
    opts.t2_us = a.t2_us;
    if (a.estimator == "mle") opts.estimator = RABITRACK_EST_MLE;
    else if (a.estimator == "fft") opts.estimator = RABITRACK_EST_FFT;
    else if (a.estimator == "both") opts.estimator = RABITRACK_EST_BOTH;
    else throw CLI::ValidationError("--estimator", "expected mle, fft or both");
    opts.master_seed = a.seed;
    opts.n_threads = a.threads;

    rabitrack_sweep* sweep = nullptr;
    check(rabitrack_sweep_run(&opts, &sweep));
    SweepHandle sh(sweep);
    check(rabitrack_sweep_save_csv(sweep, a.out.c_str()));
    std::cerr << "wrote " << rabitrack_sweep_cells(sweep) << " sweep cells to "
              << a.out << "\n";
    return kExitOk;
}

// ---- projective ----------------------------------------------------------------

struct ProjectiveArgs {
    double f_mhz = 1.0;
    double tau_us = 0.25;
    std::size_t n_meas = 400;
    int initial_bit = 0;
    std::uint64_t seed = 1;
    std::string out;
};

int run_projective(const ProjectiveArgs& a) {
    std::vector<std::uint8_t> bits(a.n_meas);
    check(rabitrack_projective_simulate(a.f_mhz, a.tau_us, a.n_meas, a.initial_bit,
                                        a.seed, bits.data()));
    size_t n = 0;
    check(rabitrack_projective_count_switches(bits.data(), bits.size(), a.initial_bit, &n));
    double f_ml = 0.0, sigma = 0.0;
    int boundary = 0;
    check(rabitrack_projective_estimate(n, a.n_meas, a.tau_us, &f_ml, &sigma, &boundary));

    nlohmann::json j;
    j["n"] = n;
    j["N"] = a.n_meas;
    j["f_ml_mhz"] = f_ml;
    j["sigma_mhz"] = sigma;
    j["boundary"] = boundary != 0;
    write_text(a.out, j.dump(2));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rabitrack: Rabi-frequency estimation from continuous weak-measurement records"};
    app.require_subcommand(1);
    app.set_version_flag("--version", rabitrack_version());

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "simulate a readout record");
    c_sim->add_option("--f", sim.f_mhz, "drive frequency (MHz)");
    c_sim->add_option("--profile", sim.profile_path, "drive profile JSON ([t_us, f_mhz] waypoints)");
    c_sim->add_option("--drift-fraction", sim.drift_fraction,
                      "generate a random drift profile with this relative amplitude");
    c_sim->add_option("--drift-min-timescale", sim.drift_min_timescale_us,
                      "shortest drift timescale (us)");
    c_sim->add_option("--tau-m", sim.tau_m_us, "characteristic measurement time (us)");
    c_sim->add_option("--dt", sim.dt_us, "time-bin width (us)");
    c_sim->add_option("--T", sim.duration_us, "record duration (us)");
    c_sim->add_option("--eta", sim.eta, "collection efficiency (0, 1]");
    c_sim->add_option("--t1", sim.t1_us, "energy relaxation time (us, inf allowed)");
    c_sim->add_option("--t2", sim.t2_us, "environmental dephasing time (us, inf allowed)");
    c_sim->add_option("--initial", sim.initial, "initial state: ground|excited|plus|mixed");
    c_sim->add_option("--seed", sim.seed, "RNG seed");
    c_sim->add_option("--out", sim.out, "output record path");
    c_sim->add_option("--profile-out", sim.profile_out, "write the drive profile JSON here");
    c_sim->add_flag("--binary", sim.binary, "write the binary record format");
    setup_config(c_sim, argc, argv);

    auto* c_est = app.add_subcommand("estimate", "estimate the drive frequency from a record");
    c_est->require_subcommand(1);

    EstimateMleArgs mle;
    auto* c_mle = c_est->add_subcommand("mle", "maximum-likelihood estimate");
    c_mle->add_option("record", mle.record_path, "record file")->required();
    c_mle->add_option("--out", mle.out, "estimate JSON output (default stdout)");
    c_mle->add_option("--curve", mle.curve_path, "write the likelihood curve CSV here");
    c_mle->add_option("--curve-span", mle.curve_span_mhz, "curve span around the peak (MHz)");
    c_mle->add_option("--curve-points", mle.curve_points, "curve sample count");
    c_mle->add_option("--f0", mle.f0_mhz, "search center (MHz); omit to seed from FFT");
    c_mle->add_flag("--seed-from-fft", mle.seed_from_fft, "seed the search from the FFT estimate");
    c_mle->add_option("--span", mle.span_mhz, "initial search span (MHz)");
    c_mle->add_option("--grid-points", mle.grid_points, "points per refinement round");
    c_mle->add_option("--resolution", mle.resolution_mhz, "target grid resolution (MHz)");
    c_mle->add_option("--prior-mean", mle.prior_mean_mhz, "Gaussian prior mean (MHz)");
    c_mle->add_option("--prior-std", mle.prior_std_mhz, "Gaussian prior std (MHz)");
    c_mle->add_option("--initial", mle.initial, "initial state used by the model");
    c_mle->add_flag("--ideal", mle.ideal, "estimate with the ideal model regardless of metadata");
    c_mle->add_option("--threads", mle.threads, "parallel grid evaluation threads");
    setup_config(c_mle, argc, argv);

    EstimateFftArgs fft;
    auto* c_fft = c_est->add_subcommand("fft", "FFT spectral estimate");
    c_fft->add_option("record", fft.record_path, "record file")->required();
    c_fft->add_option("--out", fft.out, "estimate JSON output (default stdout)");
    c_fft->add_option("--spectrum", fft.spectrum_path, "write the filtered spectrum CSV here");
    c_fft->add_option("--band-lo", fft.band_lo_mhz, "band lower edge (MHz)");
    c_fft->add_option("--band-hi", fft.band_hi_mhz, "band upper edge (MHz, 0 = Nyquist)");
    c_fft->add_option("--exclude-dc", fft.exclude_dc, "lowest bins to exclude (default 2)");
    c_fft->add_option("--half-width", fft.half_width,
                      "triangular filter half width in bins (-1 = auto, 0 = off)");
    c_fft->add_flag("--no-interp", fft.no_interp, "disable parabolic peak interpolation");
    setup_config(c_fft, argc, argv);

    TrackArgs track;
    auto* c_track = app.add_subcommand("track", "track a drifting frequency with a moving window");
    c_track->add_option("record", track.record_path, "record file")->required();
    c_track->add_option("--out", track.out, "trace CSV output");
    c_track->add_option("--window", track.window_us, "window duration (us)");
    c_track->add_option("--step", track.step_us, "window step (us)");
    c_track->add_option("--seed-mode", track.seed_mode, "fft|previous|both");
    c_track->add_option("--drift-allowance", track.drift_allowance_mhz,
                        "prior widening per window step (MHz)");
    c_track->add_option("--nominal-f", track.nominal_f_mhz,
                        "nominal frequency for the FFT band [0, 2f] (MHz)");
    c_track->add_option("--resolution", track.resolution_mhz, "target MLE resolution (MHz)");
    c_track->add_option("--initial", track.initial, "window initial state (default: mixed)");
    c_track->add_flag("--ideal", track.ideal, "track with the ideal model regardless of metadata");
    c_track->add_option("--threads", track.threads, "parallel grid evaluation threads");
    setup_config(c_track, argc, argv);

    SweepArgs sweep;
    auto* c_sweep = app.add_subcommand("sweep", "RMS-error parameter sweep over (T, tau_m)");
    c_sweep->add_option("--t_us", sweep.t_us, "record durations (us)");
    c_sweep->add_option("--tau_m_us", sweep.tau_m_us, "measurement times (us)");
    c_sweep->add_option("--n_ensemble", sweep.n_ensemble, "records per cell");
    c_sweep->add_option("--f_true_mhz", sweep.f_true_mhz, "true drive frequency (MHz)");
    c_sweep->add_option("--dt_us", sweep.dt_us, "time-bin width (us)");
    c_sweep->add_option("--eta", sweep.eta, "collection efficiency");
    c_sweep->add_option("--t1_us", sweep.t1_us, "energy relaxation time (us)");
    c_sweep->add_option("--t2_us", sweep.t2_us, "environmental dephasing time (us)");
    c_sweep->add_option("--estimator", sweep.estimator, "mle|fft|both");
    c_sweep->add_option("--seed", sweep.seed, "master seed");
    c_sweep->add_option("--threads", sweep.threads, "worker threads");
    c_sweep->add_option("--out", sweep.out, "sweep CSV output");
    setup_config(c_sweep, argc, argv);

    ProjectiveArgs proj;
    auto* c_proj = app.add_subcommand("projective", "periodic projective-measurement baseline");
    c_proj->add_option("--f", proj.f_mhz, "drive frequency (MHz)");
    c_proj->add_option("--tau", proj.tau_us, "measurement period (us)");
    c_proj->add_option("--n", proj.n_meas, "number of measurements");
    c_proj->add_option("--initial-bit", proj.initial_bit, "known initial state (0 or 1)");
    c_proj->add_option("--seed", proj.seed, "RNG seed");
    c_proj->add_option("--out", proj.out, "estimate JSON output (default stdout)");
    setup_config(c_proj, argc, argv);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (c_sim->parsed()) return run_simulate(sim);
        if (c_mle->parsed()) return run_estimate_mle(mle);
        if (c_fft->parsed()) return run_estimate_fft(fft);
        if (c_track->parsed()) return run_track(track);
        if (c_sweep->parsed()) return run_sweep_cmd(sweep);
        if (c_proj->parsed()) return run_projective(proj);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
