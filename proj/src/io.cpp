#include "io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace rabitrack {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("io: cannot open " + path + " for writing");
    out.precision(12);
    return out;
}

}  // namespace

void save_curve_csv(const LikelihoodCurve& curve, const std::string& path) {
    auto out = open_out(path);
    out << "# rabitrack likelihood curve\n";
    out << "f_mhz,loglik\n";
    out.precision(17);
    for (std::size_t i = 0; i < curve.grid.f_mhz.size(); ++i)
        out << curve.grid.f_mhz[i] << "," << curve.loglik[i] << "\n";
    if (!out) throw std::runtime_error("io: write failed for " + path);
}

void save_spectrum_csv(const Spectrum& spec, const std::string& path) {
    auto out = open_out(path);
    out << "# rabitrack spectrum: " << spec.meta << "\n";
    out << "# df_mhz=" << spec.df_mhz << "\n";
    out << "f_mhz,power\n";
    for (std::size_t i = 0; i < spec.f_mhz.size(); ++i)
        out << spec.f_mhz[i] << "," << spec.power[i] << "\n";
    if (!out) throw std::runtime_error("io: write failed for " + path);
}

void save_trace_csv(const DriftTrace& trace, const std::string& path) {
    auto out = open_out(path);
    out << "# rabitrack drift trace\n";
    out << "# window_us=" << trace.window_us << "\n";
    out << "# step_us=" << trace.step_us << "\n";
    out << "t_mid_us,f_ml_mhz,sigma_mhz,f_fft_mhz\n";
    for (const auto& p : trace.points)
        out << p.t_mid_us << "," << p.f_ml_mhz << "," << p.sigma_mhz << ","
            << p.f_fft_mhz << "\n";
    if (!out) throw std::runtime_error("io: write failed for " + path);
}

void save_sweep_csv(const SweepResult& result, const std::string& path) {
    auto out = open_out(path);
    out << "# rabitrack sweep\n";
    out << "# f_true_mhz=" << result.cfg.f_true_mhz << "\n";
    out << "# n_ensemble=" << result.cfg.n_ensemble << "\n";
    out << "# master_seed=" << result.cfg.master_seed << "\n";
    out << "T_us,tau_m_us,rms_mle_mhz,rms_fft_mhz,n_ensemble,mle_failures,fft_failures\n";
    for (const auto& c : result.cells) {
        out << c.t_us << "," << c.tau_m_us << ",";
        if (std::isnan(c.rms_mle_mhz)) out << "";
        else out << c.rms_mle_mhz;
        out << ",";
        if (std::isnan(c.rms_fft_mhz)) out << "";
        else out << c.rms_fft_mhz;
        out << "," << c.n_ensemble << "," << c.mle_failures << "," << c.fft_failures << "\n";
    }
    if (!out) throw std::runtime_error("io: write failed for " + path);
}

std::string estimate_to_json(const EstimateResult& est, double fft_seed_mhz) {
    nlohmann::json j;
    j["f_ml_mhz"] = est.f_ml_mhz;
    j["sigma_mhz"] = est.sigma_mhz;
    j["loglik_max"] = est.loglik_max;
    j["converged"] = est.converged;
    j["at_boundary"] = est.at_boundary;
    j["refine_rounds"] = est.rounds;
    if (std::isfinite(fft_seed_mhz)) j["fft_seed_mhz"] = fft_seed_mhz;
    return j.dump(2);
}

}  // namespace rabitrack
