#include "profile.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rng.hpp"

namespace rabitrack {

OmegaProfile OmegaProfile::constant(double f_mhz) {
    OmegaProfile p;
    p.constant_f_mhz_ = f_mhz;
    return p;
}

OmegaProfile OmegaProfile::piecewise_linear(std::vector<Waypoint> waypoints) {
    if (waypoints.empty())
        throw std::invalid_argument("profile: need at least one waypoint");
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        if (!(waypoints[i].t_us > waypoints[i - 1].t_us))
            throw std::invalid_argument("profile: waypoint times must be strictly increasing");
    }
    if (waypoints.size() == 1) return constant(waypoints.front().f_mhz);
    OmegaProfile p;
    p.waypoints_ = std::move(waypoints);
    return p;
}

double OmegaProfile::f_mhz_at(double t_us) const {
    if (is_constant()) return constant_f_mhz_;
    if (t_us < waypoints_.front().t_us || t_us > waypoints_.back().t_us) {
        std::ostringstream msg;
        msg << "profile: t = " << t_us << " us outside defined range [" << waypoints_.front().t_us
            << ", " << waypoints_.back().t_us << "]";
        throw std::out_of_range(msg.str());
    }
    // linear scan is fine: callers advance monotonically and profiles are short
    std::size_t i = 1;
    while (waypoints_[i].t_us < t_us) ++i;
    const auto& a = waypoints_[i - 1];
    const auto& b = waypoints_[i];
    const double w = (t_us - a.t_us) / (b.t_us - a.t_us);
    return a.f_mhz + w * (b.f_mhz - a.f_mhz);
}

double OmegaProfile::defined_until_us() const {
    if (is_constant()) return std::numeric_limits<double>::infinity();
    return waypoints_.back().t_us;
}

std::string OmegaProfile::describe() const {
    std::ostringstream s;
    if (is_constant()) {
        s << "constant f_mhz=" << constant_f_mhz_;
    } else {
        s << "piecewise_linear n=" << waypoints_.size();
    }
    return s.str();
}

void OmegaProfile::save_json(const std::string& path) const {
    nlohmann::json arr = nlohmann::json::array();
    if (is_constant()) {
        arr.push_back({0.0, constant_f_mhz_});
    } else {
        for (const auto& w : waypoints_) arr.push_back({w.t_us, w.f_mhz});
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("profile: cannot open " + path + " for writing");
    out << arr.dump() << "\n";
}

OmegaProfile OmegaProfile::load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("profile: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("profile: " + path + ": " + e.what());
    }
    if (!j.is_array() || j.empty())
        throw std::runtime_error("profile: " + path + ": expected a nonempty array of [t_us, f_mhz]");
    std::vector<OmegaProfile::Waypoint> wps;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2)
            throw std::runtime_error("profile: " + path + ": waypoints must be [t_us, f_mhz] pairs");
        wps.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    return piecewise_linear(std::move(wps));
}

OmegaProfile make_drift_profile(double f0_mhz, double fraction,
                                double min_timescale_us, double horizon_us,
                                std::uint64_t seed) {
    if (fraction < 0.0 || fraction >= 1.0)
        throw std::invalid_argument("drift profile: fraction must be in [0, 1)");
    if (!(min_timescale_us > 0.0))
        throw std::invalid_argument("drift profile: min_timescale must be positive");
    if (horizon_us < min_timescale_us)
        throw std::invalid_argument("drift profile: horizon shorter than min_timescale");
    if (fraction == 0.0) return OmegaProfile::constant(f0_mhz);

    Rng rng(derive_stream(seed, {0x70726f66ULL}));
    const double lo = f0_mhz * (1.0 - 0.5 * fraction);
    const double span = f0_mhz * fraction;
    std::vector<OmegaProfile::Waypoint> wps;
    double t = 0.0;
    wps.push_back({t, lo + span * rng.uniform()});
    while (t < horizon_us) {
        t += min_timescale_us * (1.0 + rng.uniform());
        wps.push_back({t, lo + span * rng.uniform()});
    }
    return OmegaProfile::piecewise_linear(std::move(wps));
}

}  // namespace rabitrack
