#include "hawkespop/transform.hpp"

#include <cmath>
#include <sstream>

namespace hawkespop {

namespace {

void check_size(const Vector &v, std::size_t d, const char *name) {
    if (static_cast<std::size_t>(v.size()) != d)
        throw std::invalid_argument(std::string(name) + ": expected " +
                                    std::to_string(d) + " entries");
    if (!v.allFinite())
        throw std::invalid_argument(std::string(name) + ": non-finite entry");
}

void check_s(const Vector &s, std::size_t d, const char *name) {
    check_size(s, d, name);
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] < -kAnalyticExtension)
            throw TransformDomainError(std::string(name) +
                                       ": entries must be >= 0 (extension "
                                       "limit -0.05)");
}

void check_z(const Vector &z, std::size_t d, const char *name) {
    check_size(z, d, name);
    for (Eigen::Index i = 0; i < z.size(); ++i)
        if (z[i] < -1.0 || z[i] > 1.0 + kAnalyticExtension)
            throw TransformDomainError(std::string(name) +
                                       ": entries must lie in [-1, 1] "
                                       "(extension limit 1.05)");
}

// ds_j/du = -alpha_j s_j - (1 + amp_j e^{-mu_j u}) beta_j(s) + 1 on
// [0, horizon], carrying int_0^u s_j as extra state.
TildeSolution characteristic(const HawkesModel &m, double horizon,
                             const Vector &init, const Vector &amp,
                             const OdeConfig &cfg) {
    const auto d = static_cast<Eigen::Index>(m.dim());
    TildeSolution out;
    if (horizon == 0.0) {
        out.s_end = init;
        out.integral = Vector::Zero(d);
        return out;
    }
    const Vector alpha = m.alpha();
    const Vector mu = m.mu();
    auto rhs = [&](double u, const Vector &x, Vector &dx) {
        dx.resize(2 * d);
        const Vector s = x.head(d);
        for (Eigen::Index j = 0; j < d; ++j) {
            double beta;
            try {
                beta = m.column_laplace(static_cast<std::size_t>(j), s);
            } catch (const std::domain_error &e) {
                throw TransformDomainError(
                    std::string("characteristic ODE left the domain of the "
                                "mark Laplace transform: ") +
                    e.what());
            }
            const double coef = 1.0 + amp[j] * std::exp(-mu[j] * u);
            dx[j] = -alpha[j] * s[j] - coef * beta + 1.0;
            dx[d + j] = s[j];
        }
    };
    Vector x0(2 * d);
    x0.head(d) = init;
    x0.tail(d).setZero();
    const OdeResult r = integrate_ode(rhs, x0, 0.0, horizon, cfg);
    out.s_end = r.state.head(d);
    out.integral = r.state.tail(d);
    return out;
}

double assemble(const HawkesModel &m, const Vector &s_end,
                const Vector &integral) {
    const Vector &lb = m.lambda_bar();
    const Vector &al = m.alpha();
    double expo = 0.0;
    for (Eigen::Index j = 0; j < lb.size(); ++j)
        expo -= lb[j] * s_end[j] + lb[j] * al[j] * integral[j];
    return std::exp(expo);
}

} // namespace

TildeSolution solve_tilde_s(const HawkesModel &m, double t_start,
                            double t_end, const Vector &s_init,
                            const Vector &z, const OdeConfig &cfg) {
    const std::size_t d = m.dim();
    check_s(s_init, d, "s_init");
    check_z(z, d, "z");
    if (!std::isfinite(t_start) || !std::isfinite(t_end) || t_end < t_start)
        throw std::invalid_argument("solve_tilde_s: need t_end >= t_start");
    const Vector amp = z - Vector::Ones(static_cast<Eigen::Index>(d));
    return characteristic(m, t_end - t_start, s_init, amp, cfg);
}

double zeta(const HawkesModel &m, double t, const TransformArgs &args,
            const OdeConfig &cfg) {
    if (!std::isfinite(t) || t < 0.0)
        throw std::invalid_argument("zeta: t must be >= 0");
    const TildeSolution sol = solve_tilde_s(m, 0.0, t, args.s, args.z, cfg);
    return assemble(m, sol.s_end, sol.integral);
}

double zeta_conditional(const HawkesModel &m, const ConditionalState &state,
                        double t, const TransformArgs &args,
                        const OdeConfig &cfg) {
    const std::size_t d = m.dim();
    if (!std::isfinite(state.t0) || state.t0 < 0.0)
        throw std::invalid_argument("zeta_conditional: t0 must be >= 0");
    if (!(t > state.t0))
        throw std::invalid_argument("zeta_conditional: need t > t0");
    if (state.q0.size() != d)
        throw std::invalid_argument("zeta_conditional: Q0 has wrong size");
    for (long q : state.q0)
        if (q < 0)
            throw std::invalid_argument("zeta_conditional: Q0 must be >= 0");
    check_size(state.lambda0, d, "lambda0");
    for (Eigen::Index i = 0; i < state.lambda0.size(); ++i)
        if (state.lambda0[i] < 0.0)
            throw std::invalid_argument("zeta_conditional: lambda0 must be >= 0");

    const double horizon = t - state.t0;
    const TildeSolution sol =
        solve_tilde_s(m, state.t0, t, args.s, args.z, cfg);
    const Vector &lb = m.lambda_bar();
    const Vector &al = m.alpha();
    const Vector &mu = m.mu();
    double log_val = 0.0;
    double sign = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        const double zhat =
            1.0 + (args.z[jj] - 1.0) * std::exp(-mu[jj] * horizon);
        if (state.q0[j] > 0) {
            if (zhat == 0.0)
                return 0.0;
            if (zhat < 0.0 && state.q0[j] % 2 == 1)
                sign = -sign;
            log_val += static_cast<double>(state.q0[j]) * std::log(std::abs(zhat));
        }
        log_val -= sol.s_end[jj] * state.lambda0[jj] +
                   lb[jj] * al[jj] * sol.integral[jj];
    }
    return sign * std::exp(log_val);
}

double zeta_two_time(const HawkesModel &m, double t, double tau,
                     const Vector &r, const Vector &y, const Vector &s,
                     const Vector &z, const OdeConfig &cfg) {
    const std::size_t d = m.dim();
    if (!std::isfinite(t) || t < 0.0)
        throw std::invalid_argument("zeta_two_time: t must be >= 0");
    if (!std::isfinite(tau) || tau < 0.0)
        throw std::invalid_argument("zeta_two_time: tau must be >= 0");
    check_s(r, d, "r");
    check_s(s, d, "s");
    check_z(y, d, "y");
    check_z(z, d, "z");
    const auto n = static_cast<Eigen::Index>(d);
    const Vector ones = Vector::Ones(n);

    // later stage: s-tilde over the lag
    const TildeSolution late = characteristic(m, tau, s, z - ones, cfg);

    // earlier stage: r-tilde over [0, t] started from r + s-tilde(t + tau)
    const Vector &mu = m.mu();
    Vector amp(n);
    for (Eigen::Index j = 0; j < n; ++j)
        amp[j] = (y[j] - 1.0) + y[j] * (z[j] - 1.0) * std::exp(-mu[j] * tau);
    const TildeSolution early =
        characteristic(m, t, r + late.s_end, amp, cfg);

    return assemble(m, early.s_end, early.integral + late.integral);
}

} // namespace hawkespop
