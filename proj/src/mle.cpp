#include "mle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "parallel.hpp"

namespace rabitrack {

FrequencyGrid FrequencyGrid::uniform(double lo_mhz, double hi_mhz, std::size_t n) {
    if (n < 3) throw std::invalid_argument("frequency grid: need at least 3 points");
    if (!(hi_mhz > lo_mhz)) throw std::invalid_argument("frequency grid: hi must exceed lo");
    FrequencyGrid g;
    g.f_mhz.resize(n);
    const double step = (hi_mhz - lo_mhz) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g.f_mhz[i] = lo_mhz + step * static_cast<double>(i);
    return g;
}

namespace {

[[noreturn]] void nonfinite(std::size_t step) {
    std::ostringstream msg;
    msg << "likelihood: non-finite propagation at step " << step;
    throw std::runtime_error(msg.str());
}

}  // namespace

LikelihoodEvaluator::LikelihoodEvaluator(RecordView view, const MeasurementModel& model,
                                         const InitialState& initial)
    : n_(view.samples.size()), dt_us_(view.dt_us) {
    if (n_ == 0) throw std::invalid_argument("likelihood: empty record");
    pure_ = model.ideal() && initial.pure;
    if (pure_) {
        psi0_ = initial.psi.normalized();
        const double half_scale = 0.5 * view.dt_us / model.tau_m_us;
        em_.resize(n_);
        ep_.resize(n_);
        for (std::size_t j = 0; j < n_; ++j) {
            const double e = std::exp(-half_scale * view.samples[j]);
            em_[j] = e;
            ep_[j] = 1.0 / e;
        }
    } else {
        rho0_ = initial.rho.normalized();
        fzz_.resize(n_);
        fzp_.resize(n_);
        fpz_.resize(n_);
        fpp_.resize(n_);
        if (model.ideal()) {
            const double scale = view.dt_us / model.tau_m_us;
            for (std::size_t j = 0; j < n_; ++j) {
                const double a = scale * view.samples[j];
                const double ch = std::cosh(a), sh = std::sinh(a);
                fzz_[j] = ch;
                fzp_[j] = sh;
                fpz_[j] = sh;
                fpp_[j] = ch;
            }
            exy_ = 1.0;
        } else {
            MeasurementModel m = model;
            m.dt_us = view.dt_us;  // views inherit the record's binning
            for (std::size_t j = 0; j < n_; ++j) {
                const auto zp = nonideal_zp_block(view.samples[j], m);
                fzz_[j] = zp[0];
                fzp_[j] = zp[1];
                fpz_[j] = zp[2];
                fpp_[j] = zp[3];
            }
            exy_ = std::exp(-m.gamma() * view.dt_us);
        }
    }
}

double LikelihoodEvaluator::log_likelihood(double f_mhz) const {
    const double theta = kTwoPi * f_mhz * dt_us_;
    double loglik = 0.0;
    if (pure_) {
        const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
        double v0 = psi0_.a0, v1 = psi0_.a1;
        for (std::size_t j = 0; j < n_; ++j) {
            const double w0 = em_[j] * v0;
            const double w1 = ep_[j] * v1;
            v0 = c * w0 - s * w1;
            v1 = s * w0 + c * w1;
            const double n2 = v0 * v0 + v1 * v1;
            if (!(n2 > 0.0) || !std::isfinite(n2)) nonfinite(j);
            loglik += std::log(n2);  // ln of the squared norm: ln Tr[M' M rho]
            const double inv = 1.0 / std::sqrt(n2);
            v0 *= inv;
            v1 *= inv;
        }
        return loglik;
    }
    const double c = std::cos(theta), s = std::sin(theta);
    double x = rho0_.x, y = rho0_.y, z = rho0_.z, p = rho0_.p;
    for (std::size_t j = 0; j < n_; ++j) {
        const double zm = fzz_[j] * z + fzp_[j] * p;
        const double pm = fpz_[j] * z + fpp_[j] * p;
        const double xm = exy_ * x;
        const double x2 = c * xm - s * zm;
        const double z2 = s * xm + c * zm;
        if (!(pm > 0.0) || !std::isfinite(pm)) nonfinite(j);
        loglik += std::log(pm);
        const double inv = 1.0 / pm;
        x = x2 * inv;
        y = exy_ * y * inv;
        z = z2 * inv;
        p = 1.0;
    }
    return loglik;
}

std::pair<double, double> LikelihoodEvaluator::log_likelihood_gradient(double f_mhz) const {
    const double theta = kTwoPi * f_mhz * dt_us_;
    const double dtheta_df = kTwoPi * dt_us_;
    double loglik = 0.0;
    if (pure_) {
        const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
        const double dc = -0.5 * dtheta_df * s;  // d/df of cos(theta/2)
        const double ds = 0.5 * dtheta_df * c;
        double v0 = psi0_.a0, v1 = psi0_.a1;
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            const double w0 = em_[j] * v0;
            const double w1 = ep_[j] * v1;
            const double dw0 = em_[j] * d0;
            const double dw1 = ep_[j] * d1;
            const double nv0 = c * w0 - s * w1;
            const double nv1 = s * w0 + c * w1;
            const double nd0 = c * dw0 - s * dw1 + dc * w0 - ds * w1;
            const double nd1 = s * dw0 + c * dw1 + ds * w0 + dc * w1;
            const double n2 = nv0 * nv0 + nv1 * nv1;
            if (!(n2 > 0.0) || !std::isfinite(n2)) nonfinite(j);
            loglik += std::log(n2);
            const double inv = 1.0 / std::sqrt(n2);
            v0 = nv0 * inv;
            v1 = nv1 * inv;
            d0 = nd0 * inv;
            d1 = nd1 * inv;
        }
        // d ln|V|^2/df with both vectors rescaled by the same running factor
        return {loglik, 2.0 * (v0 * d0 + v1 * d1)};
    }
    const double c = std::cos(theta), s = std::sin(theta);
    const double dc = -dtheta_df * s;
    const double ds = dtheta_df * c;
    double x = rho0_.x, y = rho0_.y, z = rho0_.z, p = rho0_.p;
    double gx = 0.0, gy = 0.0, gz = 0.0, gp = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
        const double zm = fzz_[j] * z + fzp_[j] * p;
        const double pm = fpz_[j] * z + fpp_[j] * p;
        const double xm = exy_ * x;
        const double gzm = fzz_[j] * gz + fzp_[j] * gp;
        const double gpm = fpz_[j] * gz + fpp_[j] * gp;
        const double gxm = exy_ * gx;

        const double x2 = c * xm - s * zm;
        const double z2 = s * xm + c * zm;
        const double gx2 = c * gxm - s * gzm + dc * xm - ds * zm;
        const double gz2 = s * gxm + c * gzm + ds * xm + dc * zm;

        if (!(pm > 0.0) || !std::isfinite(pm)) nonfinite(j);
        loglik += std::log(pm);
        const double inv = 1.0 / pm;
        x = x2 * inv;
        y = exy_ * y * inv;
        z = z2 * inv;
        p = 1.0;
        gx = gx2 * inv;
        gy = exy_ * gy * inv;
        gz = gz2 * inv;
        gp = gpm * inv;
    }
    // d ln(p-component)/df; the final state is normalized to p = 1
    return {loglik, gp};
}

LikelihoodCurve grid_evaluate(const LikelihoodEvaluator& eval, FrequencyGrid grid,
                              const std::optional<GaussianPrior>& prior, int n_threads) {
    if (grid.f_mhz.size() < 3) throw std::invalid_argument("grid_evaluate: grid too small");
    for (std::size_t i = 1; i < grid.f_mhz.size(); ++i)
        if (!(grid.f_mhz[i] > grid.f_mhz[i - 1]))
            throw std::invalid_argument("grid_evaluate: grid must be strictly increasing");
    if (prior && !(prior->std_mhz > 0.0))
        throw std::invalid_argument("grid_evaluate: prior std must be positive");

    LikelihoodCurve curve;
    curve.loglik.resize(grid.f_mhz.size());
    parallel_for_index(grid.f_mhz.size(), n_threads, [&](std::size_t i) {
        double v = eval.log_likelihood(grid.f_mhz[i]);
        if (prior) {
            const double d = grid.f_mhz[i] - prior->mean_mhz;
            v -= 0.5 * d * d / (prior->std_mhz * prior->std_mhz);
        }
        curve.loglik[i] = v;
    });
    curve.grid = std::move(grid);
    return curve;
}

bool fit_parabola(std::span<const double> x, std::span<const double> y,
                  std::size_t lo, std::size_t hi, double* x0, double* sigma,
                  double* peak_value) {
    const std::size_t n = hi - lo + 1;
    if (n < 3) return false;
    // center and scale for conditioning
    const double xc = x[(lo + hi) / 2];
    const double xs = std::max(x[hi] - x[lo], 1e-300);
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, t0 = 0, t1 = 0, t2 = 0;
    for (std::size_t i = lo; i <= hi; ++i) {
        const double u = (x[i] - xc) / xs;
        const double u2 = u * u;
        s0 += 1.0;
        s1 += u;
        s2 += u2;
        s3 += u2 * u;
        s4 += u2 * u2;
        t0 += y[i];
        t1 += y[i] * u;
        t2 += y[i] * u2;
    }
    // solve the 3x3 normal equations for y = a u^2 + b u + c
    double m[3][4] = {{s4, s3, s2, t2}, {s3, s2, s1, t1}, {s2, s1, s0, t0}};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int rw = col + 1; rw < 3; ++rw)
            if (std::abs(m[rw][col]) > std::abs(m[piv][col])) piv = rw;
        std::swap(m[piv], m[col]);
        if (m[col][col] == 0.0) return false;
        for (int rw = col + 1; rw < 3; ++rw) {
            const double f = m[rw][col] / m[col][col];
            for (int cc = col; cc < 4; ++cc) m[rw][cc] -= f * m[col][cc];
        }
    }
    double coef[3];
    for (int rw = 2; rw >= 0; --rw) {
        double v = m[rw][3];
        for (int cc = rw + 1; cc < 3; ++cc) v -= m[rw][cc] * coef[cc];
        coef[rw] = v / m[rw][rw];
    }
    const double a = coef[0] / (xs * xs);
    const double b = coef[1] / xs - 2.0 * a * xc;
    const double c = coef[2] - coef[1] * xc / xs + coef[0] * xc * xc / (xs * xs);
    if (!(a < 0.0)) return false;
    *x0 = -b / (2.0 * a);
    *sigma = std::sqrt(-1.0 / (2.0 * a));
    if (peak_value) *peak_value = c + b * *x0 + a * *x0 * *x0;
    return true;
}

namespace {

std::size_t argmax_lowest(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;  // ties keep the lowest frequency
    return best;
}

}  // namespace

EstimateResult refine_and_fit(const LikelihoodEvaluator& eval,
                              const FrequencyGrid& initial_grid,
                              const std::optional<GaussianPrior>& prior,
                              const RefineOptions& opts) {
    double target = opts.target_resolution_mhz;
    if (target <= 0.0) target = 0.1 / eval.duration_us();

    FrequencyGrid grid = initial_grid;
    const std::size_t n_pts = grid.f_mhz.size();
    EstimateResult result;
    LikelihoodCurve curve;
    std::size_t peak = 0;
    int boundary_shifts = 0;

    for (int round = 0; round < opts.max_rounds; ++round) {
        curve = grid_evaluate(eval, grid, prior, opts.n_threads);
        peak = argmax_lowest(curve.loglik);
        result.rounds = round + 1;

        const double spacing = grid.span() / static_cast<double>(n_pts - 1);
        if (peak == 0 || peak == n_pts - 1) {
            // peak sits on the grid edge: recenter there and rescan at the
            // same resolution (a few times before giving up)
            if (++boundary_shifts > 4) break;
            const double center = grid.f_mhz[peak];
            const double half = 0.5 * grid.span();
            grid = FrequencyGrid::uniform(center - half, center + half, n_pts);
            grid.origin = FrequencyGrid::Origin::Refined;
            continue;
        }
        if (spacing <= target) break;
        const double center = grid.f_mhz[peak];
        const double half = 0.5 * grid.span() / opts.shrink;
        grid = FrequencyGrid::uniform(center - half, center + half, n_pts);
        grid.origin = FrequencyGrid::Origin::Refined;
    }

    result.loglik_max = curve.loglik[peak];
    result.at_boundary = (peak == 0 || peak == n_pts - 1);

    // parabola over the points within fit_drop of the maximum
    std::size_t lo = peak, hi = peak;
    const double cut = curve.loglik[peak] - opts.fit_drop;
    while (lo > 0 && curve.loglik[lo - 1] >= cut) --lo;
    while (hi + 1 < n_pts && curve.loglik[hi + 1] >= cut) ++hi;
    // need at least 3 points for a curvature
    while (hi - lo + 1 < 3) {
        if (lo > 0) --lo;
        if (hi - lo + 1 < 3 && hi + 1 < n_pts) ++hi;
        if (lo == 0 && hi == n_pts - 1) break;
    }
    result.fit_lo = lo;
    result.fit_hi = hi;

    double f0 = 0.0, sig = 0.0, peak_val = 0.0;
    if (!fit_parabola(curve.grid.f_mhz, curve.loglik, lo, hi, &f0, &sig, &peak_val)) {
        result.f_ml_mhz = curve.grid.f_mhz[peak];
        result.converged = false;
        return result;
    }
    result.f_ml_mhz = f0;
    result.sigma_mhz = sig;
    const bool vertex_inside =
        f0 >= curve.grid.f_mhz.front() && f0 <= curve.grid.f_mhz.back();
    result.converged = vertex_inside && !result.at_boundary;
    if (!vertex_inside) result.at_boundary = true;
    return result;
}

NewtonResult newton_polish(const LikelihoodEvaluator& eval, double start_mhz,
                           double max_step_mhz, int max_iterations) {
    NewtonResult res;
    res.f_mhz = start_mhz;
    if (max_step_mhz <= 0.0) max_step_mhz = 5.0 / eval.duration_us();
    const double fd_step = 1e-2 / eval.duration_us();
    const double grad_tol = 1e-7 * static_cast<double>(eval.size());

    double f = start_mhz;
    for (int it = 0; it < max_iterations; ++it) {
        res.iterations = it + 1;
        const auto [l0, g0] = eval.log_likelihood_gradient(f);
        (void)l0;
        if (std::abs(g0) <= grad_tol) {
            res.f_mhz = f;
            res.converged = true;
            return res;
        }
        // curvature from the analytic gradient, central difference
        const double gp = eval.log_likelihood_gradient(f + fd_step).second;
        const double gm = eval.log_likelihood_gradient(f - fd_step).second;
        const double curv = (gp - gm) / (2.0 * fd_step);
        if (!(curv < 0.0)) return res;  // convex local model: outside the basin
        double step = -g0 / curv;
        if (std::abs(step) > max_step_mhz) return res;  // diverging: caller falls back
        f += step;
        if (std::abs(step) < 1e-12) {
            res.f_mhz = f;
            res.converged = true;
            return res;
        }
    }
    res.f_mhz = f;
    return res;
}

double log_likelihood(const ReadoutRecord& record, double f_mhz,
                      const MeasurementModel& model, const InitialState& initial) {
    return LikelihoodEvaluator(RecordView::of(record), model, initial).log_likelihood(f_mhz);
}

std::pair<double, double> log_likelihood_gradient(const ReadoutRecord& record,
                                                  double f_mhz,
                                                  const MeasurementModel& model,
                                                  const InitialState& initial) {
    return LikelihoodEvaluator(RecordView::of(record), model, initial)
        .log_likelihood_gradient(f_mhz);
}

}  // namespace rabitrack
