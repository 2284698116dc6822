#include "hawkespop/fd_moments.hpp"

#include "hawkespop/transform.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hawkespop {

namespace {

struct StencilPoint {
    int offset; // multiples of h
    double weight;
};

// Central stencils for d^k/dx^k, weights before division by h^k.
const std::vector<StencilPoint> &stencil(int k) {
    static const std::vector<StencilPoint> s1{{1, 0.5}, {-1, -0.5}};
    static const std::vector<StencilPoint> s2{{1, 1.0}, {0, -2.0}, {-1, 1.0}};
    static const std::vector<StencilPoint> s3{
        {2, 0.5}, {1, -1.0}, {-1, 1.0}, {-2, -0.5}};
    switch (k) {
    case 1:
        return s1;
    case 2:
        return s2;
    case 3:
        return s3;
    default:
        throw std::invalid_argument("fd: derivative order per variable must be 1..3");
    }
}

struct Direction {
    std::size_t var; // position in the flattened argument vector
    int order;
};

// Tensor-product stencil over the given directions around base.
// f receives the shifted argument vector.
struct StencilResult {
    double value;
    double abs_weight_sum;
    double center;
    std::size_t evaluations;
};

StencilResult apply(const std::function<double(const Vector &)> &f,
                    const Vector &base, const std::vector<Direction> &dirs,
                    double h) {
    int total = 0;
    for (const auto &d : dirs)
        total += d.order;
    StencilResult r{0.0, 0.0, 0.0, 0};
    std::vector<std::size_t> pos(dirs.size(), 0);
    double center = std::numeric_limits<double>::quiet_NaN();
    while (true) {
        Vector x = base;
        double w = 1.0;
        for (std::size_t k = 0; k < dirs.size(); ++k) {
            const auto &pt = stencil(dirs[k].order)[pos[k]];
            x[static_cast<Eigen::Index>(dirs[k].var)] += pt.offset * h;
            w *= pt.weight;
        }
        const double fx = f(x);
        ++r.evaluations;
        if (std::isnan(center))
            center = fx;
        r.value += w * fx;
        r.abs_weight_sum += std::abs(w);
        std::size_t k = 0;
        for (; k < dirs.size(); ++k) {
            if (++pos[k] < stencil(dirs[k].order).size())
                break;
            pos[k] = 0;
        }
        if (k == dirs.size())
            break;
    }
    const double scale = std::pow(h, total);
    r.value /= scale;
    r.abs_weight_sum /= scale;
    r.center = center;
    return r;
}

FdEstimate estimate(const std::function<double(const Vector &)> &f,
                    const Vector &base, const std::vector<Direction> &dirs,
                    double sign, const FdSpec &spec, const OdeConfig &cfg) {
    FdEstimate e;
    const StencilResult a = apply(f, base, dirs, spec.h);
    e.value = sign * a.value;
    e.evaluations = a.evaluations;
    const double noise =
        cfg.rel_tol * std::abs(a.center) + cfg.abs_tol +
        std::numeric_limits<double>::epsilon() * std::abs(a.center);
    e.roundoff_estimate = noise * a.abs_weight_sum;
    if (spec.estimate_error) {
        try {
            const StencilResult b = apply(f, base, dirs, 2.0 * spec.h);
            e.evaluations += b.evaluations;
            e.truncation_estimate = std::abs(a.value - b.value) / 3.0;
        } catch (const TransformDomainError &) {
            // 2h stencil leaves the extended domain; keep the h estimate only
            e.truncation_estimate = 0.0;
        }
        e.roundoff_dominated = e.roundoff_estimate > e.truncation_estimate;
    }
    return e;
}

void check_time(double t, const char *who) {
    if (!std::isfinite(t) || t < 0.0)
        throw std::invalid_argument(std::string(who) + ": t must be >= 0");
}

} // namespace

OdeConfig fd_ode_config() {
    OdeConfig c;
    c.rel_tol = 1.49e-8;
    c.abs_tol = 1.49e-8;
    return c;
}

void FdSpec::validate() const {
    if (!(h > 0.0 && h <= 0.1))
        throw std::invalid_argument("FdSpec: h must lie in (0, 0.1]");
    if (max_order < 1)
        throw std::invalid_argument("FdSpec: max_order must be >= 1");
}

FdEstimate fd_moment_estimate(const HawkesModel &m, double t,
                              const MomentIndex &idx, const FdSpec &spec,
                              const OdeConfig &cfg) {
    spec.validate();
    check_time(t, "fd_moment");
    const std::size_t d = m.dim();
    if (idx.dim() != d || idx.n_q.size() != d)
        throw std::invalid_argument("fd_moment: index dimension mismatch");
    if (idx.is_zero())
        return FdEstimate{1.0, 0.0, 0.0, 0, false};
    if (idx.order() > std::min(spec.max_order, 3))
        throw std::invalid_argument(
            "fd_moment: total derivative order above 3 is not supported");

    // argument layout: s_1..s_d, z_1..z_d
    std::vector<Direction> dirs;
    for (std::size_t i = 0; i < d; ++i)
        if (idx.n_lambda[i] > 0)
            dirs.push_back({i, idx.n_lambda[i]});
    for (std::size_t i = 0; i < d; ++i)
        if (idx.n_q[i] > 0)
            dirs.push_back({d + i, idx.n_q[i]});
    const auto n = static_cast<Eigen::Index>(d);
    Vector base(2 * n);
    base.head(n).setZero();
    base.tail(n).setOnes();
    auto f = [&](const Vector &x) {
        TransformArgs a{x.head(n), x.tail(n)};
        return zeta(m, t, a, cfg);
    };
    const double sign = idx.lambda_order() % 2 == 0 ? 1.0 : -1.0;
    return estimate(f, base, dirs, sign, spec, cfg);
}

double fd_moment(const HawkesModel &m, double t, const MomentIndex &idx,
                 const FdSpec &spec, const OdeConfig &cfg) {
    return fd_moment_estimate(m, t, idx, spec, cfg).value;
}

MomentTable fd_moment_table(const HawkesModel &m, double t, int n,
                            const FdSpec &spec, const OdeConfig &cfg) {
    MomentTable table;
    table.time = t;
    table.indices = stacked_indices(m.dim(), n);
    table.values.resize(static_cast<Eigen::Index>(table.indices.size()));
    FdSpec quick = spec;
    quick.estimate_error = false;
    for (std::size_t k = 0; k < table.indices.size(); ++k)
        table.values[static_cast<Eigen::Index>(k)] =
            fd_moment(m, t, table.indices[k], quick, cfg);
    return table;
}

const char *to_string(CrossKind k) {
    switch (k) {
    case CrossKind::QQ:
        return "QQ";
    case CrossKind::LL:
        return "LL";
    case CrossKind::QL:
        return "QL";
    }
    return "?";
}

FdEstimate fd_cross_moment_estimate(const HawkesModel &m, double t, double tau,
                                    std::size_t i, std::size_t j,
                                    CrossKind which, const FdSpec &spec,
                                    const OdeConfig &cfg) {
    spec.validate();
    check_time(t, "fd_cross_moment");
    if (!std::isfinite(tau) || tau < 0.0)
        throw std::invalid_argument("fd_cross_moment: tau must be >= 0");
    const std::size_t d = m.dim();
    if (i >= d || j >= d)
        throw std::out_of_range("fd_cross_moment: component out of range");
    // argument layout: r, y, s, z (each d entries)
    const auto n = static_cast<Eigen::Index>(d);
    Vector base = Vector::Zero(4 * n);
    base.segment(n, n).setOnes();
    base.segment(3 * n, n).setOnes();
    std::size_t first = 0, second = 0;
    double sign = 1.0;
    switch (which) {
    case CrossKind::QQ:
        first = d + i;
        second = 3 * d + j;
        break;
    case CrossKind::LL:
        first = i;
        second = 2 * d + j;
        break;
    case CrossKind::QL:
        first = d + i;
        second = 2 * d + j;
        sign = -1.0;
        break;
    }
    auto f = [&](const Vector &x) {
        return zeta_two_time(m, t, tau, x.segment(0, n), x.segment(n, n),
                             x.segment(2 * n, n), x.segment(3 * n, n), cfg);
    };
    return estimate(f, base, {{first, 1}, {second, 1}}, sign, spec, cfg);
}

double fd_cross_moment(const HawkesModel &m, double t, double tau,
                       std::size_t i, std::size_t j, CrossKind which,
                       const FdSpec &spec, const OdeConfig &cfg) {
    return fd_cross_moment_estimate(m, t, tau, i, j, which, spec, cfg).value;
}

Matrix cross_moment_matrix(const HawkesModel &m, double t, double tau,
                           CrossKind which, const FdSpec &spec,
                           const OdeConfig &cfg) {
    const auto d = static_cast<Eigen::Index>(m.dim());
    FdSpec quick = spec;
    quick.estimate_error = false;
    Matrix R(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            R(i, j) = fd_cross_moment(m, t, tau, static_cast<std::size_t>(i),
                                      static_cast<std::size_t>(j), which, quick,
                                      cfg);
    return R;
}

Matrix autocovariance(const HawkesModel &m, double t, double tau,
                      CrossKind which, const FdSpec &spec,
                      const OdeConfig &cfg) {
    const Matrix R = cross_moment_matrix(m, t, tau, which, spec, cfg);
    const MomentSystem sys = assemble_system(m, 1);
    const MomentTable a =
        transient_moments(sys, t, TransientMethod::automatic);
    const MomentTable b =
        transient_moments(sys, t + tau, TransientMethod::automatic);
    const std::size_t d = m.dim();
    Vector ex(static_cast<Eigen::Index>(d)), ey(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<int> e(d, 0);
        e[i] = 1;
        const MomentIndex li = MomentIndex::lambda(e), qi = MomentIndex::q(e);
        const auto ii = static_cast<Eigen::Index>(i);
        ex[ii] = which == CrossKind::LL ? a.value(li) : a.value(qi);
        ey[ii] = which == CrossKind::QQ ? b.value(qi) : b.value(li);
    }
    return R - ex * ey.transpose();
}

} // namespace hawkespop
