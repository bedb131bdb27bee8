#include "model.hpp"

#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace rabitrack {

Mat2 Mat2::identity() {
    Mat2 r;
    r(0, 0) = r(1, 1) = 1.0;
    return r;
}

Mat4 Mat4::identity() {
    Mat4 r;
    for (int i = 0; i < 4; ++i) r(i, i) = 1.0;
    return r;
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
    return r;
}

Mat4 operator*(const Mat4& a, const Mat4& b) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += a(i, k) * b(k, j);
            r(i, j) = s;
        }
    return r;
}

MeasurementModel make_measurement_model(double tau_m_us, double dt_us,
                                        double eta, double t1_us, double t2_us) {
    auto fail = [](const std::string& msg) {
        throw std::invalid_argument("measurement model: " + msg);
    };
    if (!(dt_us > 0.0)) fail("dt must be positive");
    if (!(tau_m_us > 0.0)) fail("tau_m must be positive");
    if (!(eta > 0.0) || eta > 1.0) fail("eta must be in (0, 1]");
    if (!(t1_us > 0.0)) fail("t1 must be positive (or infinite)");
    if (!(t2_us > 0.0)) fail("t2 must be positive (or infinite)");
    MeasurementModel m{tau_m_us, dt_us, eta, t1_us, t2_us};
    if (m.coarse_binning()) {
        std::clog << "rabitrack: warning: dt/tau_m = " << dt_us / tau_m_us
                  << " > 0.1; time bins are coarse for the weak-measurement model\n";
    }
    return m;
}

PureState PureState::normalized() const {
    const double n = std::sqrt(norm2());
    return {a0 / n, a1 / n};
}

ParaState ParaState::from_pure(const PureState& s) {
    return {2.0 * s.a0 * s.a1, 0.0, s.a1 * s.a1 - s.a0 * s.a0, s.norm2()};
}

ParaState ParaState::normalized() const {
    return {x / p, y / p, z / p, 1.0};
}

double ParaState::purity() const {
    return (x * x + y * y + z * z) / (p * p);
}

InitialState InitialState::ground() {
    return {true, {1.0, 0.0}, ParaState::ground()};
}

InitialState InitialState::excited() {
    return {true, {0.0, 1.0}, ParaState::excited()};
}

InitialState InitialState::plus_x() {
    const double s = std::sqrt(0.5);
    return {true, {s, s}, ParaState::plus_x()};
}

InitialState InitialState::mixed() {
    return {false, {}, ParaState::mixed()};
}

Mat2 rotation_matrix(double omega_rad_us, double dt_us) {
    const double half = 0.5 * omega_rad_us * dt_us;
    Mat2 u;
    u(0, 0) = std::cos(half);
    u(0, 1) = -std::sin(half);
    u(1, 0) = std::sin(half);
    u(1, 1) = std::cos(half);
    return u;
}

Mat2 povm_sqrt_rescaled(double r, const MeasurementModel& model) {
    const double h = 0.5 * r * model.dt_us / model.tau_m_us;
    Mat2 e;
    e(0, 0) = std::exp(-h);
    e(1, 1) = std::exp(h);
    return e;
}

Mat2 povm_element_normalized(double r, const MeasurementModel& model) {
    const double a = model.dt_us / model.tau_m_us;
    const double norm = std::sqrt(a / kTwoPi);
    Mat2 e;
    e(0, 0) = norm * std::exp(-0.5 * a * (r + 1.0) * (r + 1.0));
    e(1, 1) = norm * std::exp(-0.5 * a * (r - 1.0) * (r - 1.0));
    return e;
}

Mat4 paravector_unitary(double omega_rad_us, double dt_us) {
    // The Bloch vector rotates at the full angle omega*dt (twice the
    // amplitude half-angle). The rotation couples x and z: measured z is in
    // the drive plane, which is what makes the record informative about
    // omega in the first place.
    const double th = omega_rad_us * dt_us;
    const double c = std::cos(th);
    const double s = std::sin(th);
    Mat4 v = Mat4::identity();
    v(0, 0) = c;
    v(0, 2) = -s;
    v(2, 0) = s;
    v(2, 2) = c;
    return v;
}

Mat4 paravector_measurement_ideal(double r, const MeasurementModel& model) {
    const double a = r * model.dt_us / model.tau_m_us;
    Mat4 f = Mat4::identity();
    f(2, 2) = f(3, 3) = std::cosh(a);
    f(2, 3) = f(3, 2) = std::sinh(a);
    return f;
}

std::array<double, 4> nonideal_zp_block(double r, const MeasurementModel& model) {
    // exp(dt*G) for G = [[-k, m-k], [m, 0]], k = 1/T1, m = r/tau_m.
    // G has eigenvalues m-k and -m; write the exponential as
    // e^{mu dt} [cosh(nu dt) I + sinhc(nu dt) dt (G - mu I)] with
    // mu = -k/2, nu = m - k/2, which stays well conditioned through the
    // degenerate point nu -> 0.
    const double k = 1.0 / model.t1_us;  // zero when T1 infinite
    const double m = r / model.tau_m_us;
    const double dt = model.dt_us;
    const double mu = -0.5 * k;
    const double nu = m - 0.5 * k;
    const double w = nu * dt;
    const double scale = std::exp(mu * dt);
    const double ch = std::cosh(w);
    double shc;  // sinh(nu dt)/nu
    if (std::abs(w) < 1e-4) {
        const double w2 = w * w;
        shc = dt * (1.0 + w2 / 6.0 * (1.0 + w2 / 20.0));
    } else {
        shc = std::sinh(w) / nu;
    }
    return {scale * (ch - 0.5 * k * shc),  // zz
            scale * shc * (m - k),         // zp
            scale * shc * m,               // pz
            scale * (ch + 0.5 * k * shc)}; // pp
}

Mat4 paravector_measurement_nonideal(double r, const MeasurementModel& model) {
    const auto zp = nonideal_zp_block(r, model);
    const double exy = std::exp(-model.gamma() * model.dt_us);
    Mat4 f;
    f(0, 0) = f(1, 1) = exy;
    f(2, 2) = zp[0];
    f(2, 3) = zp[1];
    f(3, 2) = zp[2];
    f(3, 3) = zp[3];
    return f;
}

ParaState apply(const Mat4& m, const ParaState& s) {
    const std::array<double, 4> v{s.x, s.y, s.z, s.p};
    std::array<double, 4> r{};
    for (int i = 0; i < 4; ++i)
        r[i] = m(i, 0) * v[0] + m(i, 1) * v[1] + m(i, 2) * v[2] + m(i, 3) * v[3];
    return {r[0], r[1], r[2], r[3]};
}

PureState apply(const Mat2& m, const PureState& s) {
    return {m(0, 0) * s.a0 + m(0, 1) * s.a1, m(1, 0) * s.a0 + m(1, 1) * s.a1};
}

}  // namespace rabitrack
