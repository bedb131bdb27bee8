#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace rabitrack {

/// Drive frequency vs time: either constant or piecewise linear between
/// waypoints (t_us, f_mhz) with strictly increasing times starting at 0.
class OmegaProfile {
  public:
    struct Waypoint {
        double t_us;
        double f_mhz;
    };

    static OmegaProfile constant(double f_mhz);
    static OmegaProfile piecewise_linear(std::vector<Waypoint> waypoints);

    /// Frequency at time t. Throws std::out_of_range past the last waypoint.
    double f_mhz_at(double t_us) const;

    /// Time horizon over which evaluation is defined (infinite for constant).
    double defined_until_us() const;

    bool is_constant() const { return waypoints_.empty(); }
    double constant_f_mhz() const { return constant_f_mhz_; }
    const std::vector<Waypoint>& waypoints() const { return waypoints_; }

    std::string describe() const;

    void save_json(const std::string& path) const;
    static OmegaProfile load_json(const std::string& path);

  private:
    double constant_f_mhz_ = 0.0;
    std::vector<Waypoint> waypoints_;  // empty for constant profiles
};

/// Random drift profile: waypoint spacing uniform in [min_timescale,
/// 2*min_timescale], values uniform in f0*[1 - fraction/2, 1 + fraction/2].
/// Deterministic in the seed. fraction = 0 degenerates to a constant profile.
OmegaProfile make_drift_profile(double f0_mhz, double fraction,
                                double min_timescale_us, double horizon_us,
                                std::uint64_t seed);

}  // namespace rabitrack
