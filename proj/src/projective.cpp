#include "projective.hpp"

#include <cmath>
#include <stdexcept>

#include "rng.hpp"

namespace rabitrack {

ProjectiveRecord simulate_projective(double omega_rad_us, double tau_us,
                                     std::size_t n_meas, int initial_bit,
                                     std::uint64_t seed) {
    if (n_meas < 1) throw std::invalid_argument("projective: n_meas must be >= 1");
    if (!(tau_us > 0.0)) throw std::invalid_argument("projective: tau must be positive");
    const double s = std::sin(0.5 * omega_rad_us * tau_us);
    const double p_diff = s * s;

    ProjectiveRecord rec;
    rec.bits.resize(n_meas);
    rec.tau_us = tau_us;
    rec.initial_bit = initial_bit ? 1 : 0;

    Rng rng(seed);
    std::uint8_t prev = static_cast<std::uint8_t>(rec.initial_bit);
    for (std::size_t j = 0; j < n_meas; ++j) {
        const bool flip = rng.uniform() < p_diff;
        prev = flip ? static_cast<std::uint8_t>(1 - prev) : prev;
        rec.bits[j] = prev;
    }
    return rec;
}

std::size_t count_switches(const ProjectiveRecord& rec) {
    std::size_t n = 0;
    std::uint8_t prev = static_cast<std::uint8_t>(rec.initial_bit ? 1 : 0);
    for (std::uint8_t b : rec.bits) {
        if (b != prev) ++n;
        prev = b;
    }
    return n;
}

double projective_loglike(std::size_t n_switches, std::size_t n_meas,
                          double omega_rad_us, double tau_us) {
    if (n_switches > n_meas)
        throw std::invalid_argument("projective: n_switches exceeds n_meas");
    const auto n = static_cast<double>(n_switches);
    const auto N = static_cast<double>(n_meas);
    const double log_binom = std::lgamma(N + 1.0) - std::lgamma(n + 1.0) - std::lgamma(N - n + 1.0);
    const double s = std::sin(0.5 * omega_rad_us * tau_us);
    const double c = std::cos(0.5 * omega_rad_us * tau_us);
    const double log_pd = std::log(s * s);
    const double log_ps = std::log(c * c);
    double ll = log_binom;
    if (n_switches > 0) ll += n * log_pd;          // 0*ln(0) = 0
    if (n_switches < n_meas) ll += (N - n) * log_ps;
    return ll;
}

ProjectiveEstimate projective_mle(std::size_t n_switches, std::size_t n_meas,
                                  double tau_us) {
    if (n_meas < 1) throw std::invalid_argument("projective: n_meas must be >= 1");
    if (n_switches > n_meas)
        throw std::invalid_argument("projective: n_switches exceeds n_meas");
    ProjectiveEstimate est;
    const double ratio = static_cast<double>(n_switches) / static_cast<double>(n_meas);
    est.omega_ml_rad_us = 2.0 * std::asin(std::sqrt(ratio)) / tau_us;
    est.sigma_rad_us = 1.0 / (tau_us * std::sqrt(static_cast<double>(n_meas)));
    est.boundary = (n_switches == 0 || n_switches == n_meas);
    return est;
}

double projective_fisher(std::size_t n_meas, double tau_us) {
    return static_cast<double>(n_meas) * tau_us * tau_us;
}

}  // namespace rabitrack
