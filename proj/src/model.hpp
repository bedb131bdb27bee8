#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

// Physical model of a continuously Z-measured, Rabi-driven qubit.
//
// Conventions used throughout the library:
//   * times in microseconds, angular frequencies in rad/us
//   * the readout r is dimensionless, centered at -1 for |0> and +1 for |1>,
//     with per-bin noise variance tau_m/dt
//   * user-facing frequencies are ordinary frequencies f = Omega/2pi in MHz;
//     conversion to rad/us happens at module boundaries, never inside loops

namespace rabitrack {

inline constexpr double kTwoPi = 6.28318530717958647692528676655900577;

struct Mat2 {
    std::array<double, 4> m{};  // row-major
    double operator()(int i, int j) const { return m[2 * i + j]; }
    double& operator()(int i, int j) { return m[2 * i + j]; }
    static Mat2 identity();
};

struct Mat4 {
    std::array<double, 16> m{};  // row-major
    double operator()(int i, int j) const { return m[4 * i + j]; }
    double& operator()(int i, int j) { return m[4 * i + j]; }
    static Mat4 identity();
};

Mat2 operator*(const Mat2& a, const Mat2& b);
Mat4 operator*(const Mat4& a, const Mat4& b);

/// Calibration inputs of the measurement chain. t1_us/t2_us may be
/// std::numeric_limits<double>::infinity() when the corresponding channel
/// is absent. Derived rates are recomputed on demand, never cached.
struct MeasurementModel {
    double tau_m_us = 1.0;  // characteristic measurement time
    double dt_us = 0.01;    // time-bin width
    double eta = 1.0;       // collection efficiency, (0,1]
    double t1_us = std::numeric_limits<double>::infinity();
    double t2_us = std::numeric_limits<double>::infinity();

    double gamma_m() const { return 1.0 / (2.0 * eta * tau_m_us); }
    double gamma() const { return gamma_m() + 1.0 / t2_us + 0.5 / t1_us; }
    double noise_std() const { return std::sqrt(tau_m_us / dt_us); }

    /// Ideal means unit efficiency and no extra decoherence channels; the
    /// pure-state 2x2 propagation path is exact in this case.
    bool ideal() const {
        return eta == 1.0 && std::isinf(t1_us) && std::isinf(t2_us);
    }

    /// True when dt is too coarse for the weak-measurement expansion to be
    /// trustworthy (dt/tau_m > 0.1). Valid models may still be coarse.
    bool coarse_binning() const { return dt_us / tau_m_us > 0.1; }
};

/// Validates invariants and returns the model. Throws std::invalid_argument
/// on violation; logs a one-line warning to std::clog when the binning is
/// coarse (warn, do not fail).
MeasurementModel make_measurement_model(double tau_m_us, double dt_us,
                                        double eta = 1.0,
                                        double t1_us = std::numeric_limits<double>::infinity(),
                                        double t2_us = std::numeric_limits<double>::infinity());

/// Real-amplitude pure state a0|0> + a1|1>. The Y-axis drive and diagonal
/// measurement operators keep real states real, so this is closed under
/// the ideal propagation.
struct PureState {
    double a0 = 1.0;
    double a1 = 0.0;
    double norm2() const { return a0 * a0 + a1 * a1; }
    PureState normalized() const;
};

/// Bloch paravector (x, y, z, p) with the trace p kept explicit so that
/// conditional evolution, including decoherence, stays linear.
struct ParaState {
    double x = 0.0;
    double y = 0.0;
    double z = -1.0;
    double p = 1.0;

    static ParaState from_pure(const PureState& s);
    static ParaState ground() { return {0.0, 0.0, -1.0, 1.0}; }
    static ParaState excited() { return {0.0, 0.0, 1.0, 1.0}; }
    static ParaState plus_x() { return {1.0, 0.0, 0.0, 1.0}; }
    static ParaState mixed() { return {0.0, 0.0, 0.0, 1.0}; }

    ParaState normalized() const;
    /// (x^2+y^2+z^2)/p^2; equals 1 for pure states.
    double purity() const;
};

/// Initial state for simulation and likelihood evaluation. Pure states
/// carry their amplitude form so the fast 2x2 path stays available.
struct InitialState {
    bool pure = true;
    PureState psi{};
    ParaState rho = ParaState::ground();

    static InitialState ground();
    static InitialState excited();
    static InitialState plus_x();
    static InitialState mixed();
};

// --- single-step propagators ------------------------------------------------

/// Drive unitary over one bin: rotation by half-angle omega*dt/2 acting on
/// the real amplitudes (a0, a1). Orthogonal with determinant 1.
Mat2 rotation_matrix(double omega_rad_us, double dt_us);

/// Rescaled measurement back-action sqrt(E~) = diag(exp(-r dt/2tau_m),
/// exp(+r dt/2tau_m)). The state-independent Gaussian prefactor is dropped;
/// it cancels from every likelihood comparison and keeps products of very
/// small numbers out of long records.
Mat2 povm_sqrt_rescaled(double r, const MeasurementModel& model);

/// Normalized POVM element diag(P(r|0), P(r|1)) with the full Gaussians of
/// the readout distribution. Used by the simulator and validation code only;
/// the likelihood inner loop uses the rescaled form.
Mat2 povm_element_normalized(double r, const MeasurementModel& model);

/// Paravector drive step: elliptic rotation by the full angle omega*dt in
/// the plane spanned by the x and z coordinates (the drive is a Y-axis
/// rotation), identity on y and p.
Mat4 paravector_unitary(double omega_rad_us, double dt_us);

/// Ideal measurement step: hyperbolic rotation in the z-p plane with
/// rapidity r*dt/tau_m, identity on x and y. Exactly equivalent to
/// conjugation by sqrt(E~) on pure states.
Mat4 paravector_measurement_ideal(double r, const MeasurementModel& model);

/// Nonideal measurement step: closed-form exponential of the generator with
/// total dephasing gamma on (x, y) and the T1-extended hyperbolic block on
/// (z, p). Reduces to the ideal z-p block when T1 is infinite.
Mat4 paravector_measurement_nonideal(double r, const MeasurementModel& model);

/// Entries of the (z, p) block of the nonideal step, in order
/// (zz, zp, pz, pp). Shared by the propagator and the likelihood cache.
std::array<double, 4> nonideal_zp_block(double r, const MeasurementModel& model);

ParaState apply(const Mat4& m, const ParaState& s);
PureState apply(const Mat2& m, const PureState& s);

}  // namespace rabitrack
