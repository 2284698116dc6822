#include "hawkespop/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hawkespop {

void OdeConfig::validate() const {
    if (!(rel_tol > 0.0) || !std::isfinite(rel_tol))
        throw std::invalid_argument("OdeConfig: rel_tol must be positive");
    if (!(abs_tol > 0.0) || !std::isfinite(abs_tol))
        throw std::invalid_argument("OdeConfig: abs_tol must be positive");
    if (max_steps < 1)
        throw std::invalid_argument("OdeConfig: max_steps must be >= 1");
    if (!(initial_step >= 0.0) || !std::isfinite(initial_step))
        throw std::invalid_argument("OdeConfig: initial_step must be >= 0");
}

DenseTrajectory::DenseTrajectory(std::vector<Segment> segments, double t0,
                                 Vector x0)
    : segs_(std::move(segments)), t0_(t0), x0_(std::move(x0)) {}

double DenseTrajectory::t_end() const noexcept {
    if (segs_.empty())
        return t0_;
    return segs_.back().t0 + segs_.back().h;
}

Vector DenseTrajectory::at(double t) const {
    if (segs_.empty())
        return x0_;
    const double span = t_end() - t0_;
    const double slack = 1e-12 * std::max(1.0, std::abs(span));
    if (t < t0_ - slack || t > t_end() + slack)
        throw std::out_of_range("DenseTrajectory: time outside solved range");
    auto it = std::upper_bound(
        segs_.begin(), segs_.end(), t,
        [](double v, const Segment &s) { return v < s.t0; });
    if (it != segs_.begin())
        --it;
    const Segment &s = *it;
    const double th = std::clamp((t - s.t0) / s.h, 0.0, 1.0);
    const double th1 = 1.0 - th;
    return s.r1 + th * (s.r2 + th1 * (s.r3 + th * (s.r4 + th1 * s.r5)));
}

namespace {

// Dormand-Prince 5(4)
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                 a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0,
                 d7 = 69997945.0 / 29380423.0;

void eval(const VectorField &f, double t, const Vector &x, Vector &dx) {
    f(t, x, dx);
    if (dx.size() != x.size())
        throw OdeError("integrate_ode: vector field returned wrong size");
    if (!dx.allFinite()) {
        std::ostringstream msg;
        msg << "integrate_ode: non-finite derivative at t=" << t;
        throw OdeError(msg.str());
    }
}

double err_norm(const Vector &err, const Vector &x0, const Vector &x1,
                const OdeConfig &cfg) {
    const auto n = err.size();
    if (n == 0)
        return 0.0;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sc =
            cfg.abs_tol +
            cfg.rel_tol * std::max(std::abs(x0[i]), std::abs(x1[i]));
        const double r = err[i] / sc;
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(n));
}

double scaled_norm(const Vector &v, const Vector &x, const OdeConfig &cfg) {
    const auto n = v.size();
    if (n == 0)
        return 0.0;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sc = cfg.abs_tol + cfg.rel_tol * std::abs(x[i]);
        acc += (v[i] / sc) * (v[i] / sc);
    }
    return std::sqrt(acc / static_cast<double>(n));
}

double initial_step(const VectorField &f, double t0, const Vector &x0,
                    const Vector &f0, double span, const OdeConfig &cfg) {
    const double dn0 = scaled_norm(x0, x0, cfg);
    const double dn1 = scaled_norm(f0, x0, cfg);
    double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
    h0 = std::min(h0, span);
    Vector x1 = x0 + h0 * f0;
    Vector f1(x0.size());
    eval(f, t0 + h0, x1, f1);
    const double dn2 = scaled_norm(f1 - f0, x0, cfg) / h0;
    const double mx = std::max(dn1, dn2);
    const double h1 = mx <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                  : std::pow(0.01 / mx, 0.2);
    return std::min({100.0 * h0, h1, span});
}

} // namespace

OdeResult integrate_ode(const VectorField &f, const Vector &x0, double t0,
                        double t1, const OdeConfig &cfg, bool dense) {
    cfg.validate();
    if (!std::isfinite(t0) || !std::isfinite(t1))
        throw std::invalid_argument("integrate_ode: non-finite time bounds");
    if (t1 < t0)
        throw std::invalid_argument("integrate_ode: t1 < t0");
    if (!x0.allFinite())
        throw std::invalid_argument("integrate_ode: non-finite initial state");

    OdeResult res;
    std::vector<DenseTrajectory::Segment> segs;
    const auto n = x0.size();
    Vector x = x0;
    if (t1 == t0 || n == 0) {
        res.state = x;
        if (dense)
            res.trajectory =
                std::make_shared<const DenseTrajectory>(std::move(segs), t0, x0);
        return res;
    }

    Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), xs(n), xn(n);
    eval(f, t0, x, k1);
    const double span = t1 - t0;
    double h = cfg.initial_step > 0.0 ? std::min(cfg.initial_step, span)
                                      : initial_step(f, t0, x, k1, span, cfg);
    double t = t0;
    bool last_rejected = false;
    constexpr double eps = std::numeric_limits<double>::epsilon();

    while (t < t1) {
        if (res.steps + res.rejected >= cfg.max_steps) {
            std::ostringstream msg;
            msg << "integrate_ode: step budget of " << cfg.max_steps
                << " exhausted at t=" << t << " (target " << t1 << ")";
            throw OdeError(msg.str());
        }
        if (h < 16.0 * eps * std::max(1.0, std::abs(t))) {
            std::ostringstream msg;
            msg << "integrate_ode: step size underflow at t=" << t;
            throw OdeError(msg.str());
        }
        bool final_step = false;
        if (t + h >= t1 || t + 1.01 * h >= t1) {
            h = t1 - t;
            final_step = true;
        }

        xs = x + h * a21 * k1;
        eval(f, t + c2 * h, xs, k2);
        xs = x + h * (a31 * k1 + a32 * k2);
        eval(f, t + c3 * h, xs, k3);
        xs = x + h * (a41 * k1 + a42 * k2 + a43 * k3);
        eval(f, t + c4 * h, xs, k4);
        xs = x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        eval(f, t + c5 * h, xs, k5);
        xs = x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        eval(f, t + h, xs, k6);
        xn = x + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        eval(f, t + h, xn, k7);

        const Vector err =
            h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double en = err_norm(err, x, xn, cfg);
        if (!std::isfinite(en))
            throw OdeError("integrate_ode: non-finite error estimate");

        if (en <= 1.0) {
            if (dense) {
                DenseTrajectory::Segment s;
                s.t0 = t;
                s.h = h;
                s.r1 = x;
                s.r2 = xn - x;
                s.r3 = h * k1 - s.r2;
                s.r4 = s.r2 - h * k7 - s.r3;
                s.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 +
                            d7 * k7);
                segs.push_back(std::move(s));
            }
            t = final_step ? t1 : t + h;
            x = xn;
            k1 = k7;
            ++res.steps;
            double fac = en == 0.0 ? 5.0 : 0.9 * std::pow(en, -0.2);
            fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
            h *= fac;
            last_rejected = false;
        } else {
            ++res.rejected;
            h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
            last_rejected = true;
        }
    }
    res.state = x;
    if (dense)
        res.trajectory =
            std::make_shared<const DenseTrajectory>(std::move(segs), t0, x0);
    return res;
}

} // namespace hawkespop
