#include "hawkespop/asymptotics.hpp"

#include "hawkespop/moment_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hawkespop {

namespace {

constexpr double kSmallU = 1e-8;
constexpr int kSeriesOrder = 8;
constexpr double kSeriesRange = 0.1;

double sum_nonneg(const Vector &s) {
    if (!s.allFinite())
        throw std::invalid_argument("s must be finite");
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] < 0.0)
            throw std::invalid_argument("s must be >= 0");
    return s.sum();
}

void check_dim(const SymmetricModel &m, const Vector &s) {
    if (static_cast<std::size_t>(s.size()) != m.d)
        throw std::invalid_argument("s has wrong dimension");
}

} // namespace

double GammaLimit::laplace(double s_bar) const {
    return std::pow(rate / (rate + s_bar), shape);
}

GammaLimit GammaLimit::of(const SymmetricModel &m) {
    const ThetaSigma ts = symmetric_theta_sigma(m);
    return GammaLimit{ts.sigma * m.lambda_bar, ts.sigma};
}

double stationary_laplace_symmetric(const SymmetricModel &m, double s_bar,
                                    double tol) {
    m.validate();
    double mean_sum = 0.0;
    for (const auto &b : m.marks)
        mean_sum += b->mean();
    const double theta = mean_sum / m.alpha;
    if (!(theta < 1.0))
        throw UnstableModelError(
            "stationary transform needs theta < 1 (got theta = " +
                std::to_string(theta) + ")",
            theta);
    if (!std::isfinite(s_bar) || s_bar < 0.0)
        throw std::invalid_argument("s_bar must be >= 0");
    if (s_bar == 0.0)
        return 1.0;
    const double limit0 = 1.0 / (m.alpha - mean_sum);
    const double d = static_cast<double>(m.d);
    // (alpha u + sum beta_i(u) - d) / u by its moment series for small u,
    // where the direct form loses all digits to cancellation
    int order = kSeriesOrder;
    double scale = 0.0;
    for (const auto &b : m.marks)
        order = std::min(order, b->max_moment_order());
    for (const auto &b : m.marks)
        scale = std::max(scale, std::pow(b->moment(order), 1.0 / order));
    auto denom_over_u = [&](double u) {
        double acc = m.alpha;
        for (const auto &b : m.marks) {
            double term = -1.0; // (-u)^(k-1) / k!
            for (int k = 1; k <= order; ++k) {
                acc += term * b->moment(k);
                term *= -u / (k + 1);
            }
        }
        return acc;
    };
    auto integrand = [&](double u) {
        if (u < kSmallU)
            return limit0;
        if (u * scale < kSeriesRange)
            return 1.0 / denom_over_u(u);
        double beta = 0.0;
        for (const auto &b : m.marks)
            beta += b->laplace(u);
        return u / (m.alpha * u + beta - d);
    };
    const double integral = quad_adaptive(integrand, 0.0, s_bar, tol);
    return std::exp(-m.alpha * m.lambda_bar * integral);
}

double stationary_laplace_symmetric(const SymmetricModel &m, const Vector &s,
                                    double tol) {
    check_dim(m, s);
    return stationary_laplace_symmetric(m, sum_nonneg(s), tol);
}

double gamma_limit_transform(const SymmetricModel &m, const Vector &s) {
    check_dim(m, s);
    return GammaLimit::of(m).laplace(sum_nonneg(s));
}

SymmetricModel exponential_symmetric_family(std::size_t d, double theta,
                                            double alpha, double lambda_bar) {
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument("theta must lie in (0, 1]");
    SymmetricModel m;
    m.d = d;
    m.alpha = alpha;
    m.lambda_bar = lambda_bar;
    m.marks.assign(d, exponential_mark(theta * alpha / static_cast<double>(d)));
    m.validate();
    return m;
}

std::vector<SweepRow>
convergence_sweep(const std::function<SymmetricModel(double)> &family,
                  const std::vector<double> &theta_grid,
                  const std::vector<double> &s_grid) {
    const SymmetricModel critical = family(1.0);
    const ThetaSigma cts = symmetric_theta_sigma(critical);
    if (std::abs(cts.theta - 1.0) > 1e-9)
        throw std::invalid_argument("family(1) must have theta = 1");
    const GammaLimit limit = GammaLimit::of(critical);
    std::vector<SweepRow> rows;
    for (double theta : theta_grid) {
        if (!(theta > 0.0 && theta < 1.0))
            throw std::invalid_argument("theta grid must lie in (0, 1)");
        const SymmetricModel m = family(theta);
        const ThetaSigma ts = symmetric_theta_sigma(m);
        const GammaLimit matched = GammaLimit::of(m);
        SweepRow row;
        row.theta = ts.theta;
        row.sigma = ts.sigma;
        row.limit_sigma = limit.rate;
        for (double s : s_grid) {
            const double v = stationary_laplace_symmetric(m, s * (1.0 - ts.theta));
            const double dist = std::abs(v - limit.laplace(s));
            row.distances.push_back(dist);
            if (dist > row.sup_distance) {
                row.sup_distance = dist;
                row.argmax_s = s;
            }
            row.matched_sup_distance = std::max(row.matched_sup_distance,
                                                std::abs(v - matched.laplace(s)));
        }
        const MomentTable st = stationary_moments(m.to_model(1.0), 2);
        std::vector<int> e1(m.d, 0), e11(m.d, 0);
        e1[0] = 1;
        e11[0] = 2;
        const double mean = st.value(MomentIndex::lambda(e1));
        const double second = st.value(MomentIndex::lambda(e11));
        row.rescaled_variance =
            (1.0 - ts.theta) * (1.0 - ts.theta) * (second - mean * mean);
        row.limit_variance = m.lambda_bar / limit.rate;
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace hawkespop
