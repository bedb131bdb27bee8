#pragma once

#include <cstdint>
#include <vector>

namespace rabitrack {

/// Outcomes of periodic projective Z measurements with known initial state.
/// Between measurements the qubit rotates for a fixed period tau, so each
/// outcome repeats the previous one with probability cos^2(omega tau/2) and
/// flips with probability sin^2(omega tau/2).
struct ProjectiveRecord {
    std::vector<std::uint8_t> bits;
    double tau_us = 1.0;
    int initial_bit = 0;

    std::size_t size() const { return bits.size(); }
};

struct ProjectiveEstimate {
    double omega_ml_rad_us = 0.0;
    double sigma_rad_us = 0.0;
    bool boundary = false;  // n = 0 or n = N: divergent estimator slope
};

ProjectiveRecord simulate_projective(double omega_rad_us, double tau_us,
                                     std::size_t n_meas, int initial_bit,
                                     std::uint64_t seed);

/// Number of adjacent flips, counting the (initial_bit, bits[0]) pair first;
/// in [0, N].
std::size_t count_switches(const ProjectiveRecord& rec);

/// ln P(n, N | omega) of the switch-count binomial, with 0*ln(0) = 0 at the
/// boundaries.
double projective_loglike(std::size_t n_switches, std::size_t n_meas,
                          double omega_rad_us, double tau_us);

/// Closed-form estimator omega = 2 asin(sqrt(n/N))/tau with Cramer-Rao
/// uncertainty 1/(tau sqrt(N)).
ProjectiveEstimate projective_mle(std::size_t n_switches, std::size_t n_meas,
                                  double tau_us);

/// Fisher information of the switch-count statistic: N tau^2, independent
/// of omega.
double projective_fisher(std::size_t n_meas, double tau_us);

}  // namespace rabitrack
