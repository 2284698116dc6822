#include "fixtures.hpp"
#include "hawkespop/fd_moments.hpp"
#include "hawkespop/moment_engine.hpp"

#include <doctest.h>

#include <cmath>

using namespace hawkespop;

namespace {

double mre(const MomentTable &fd, const MomentTable &ref, int order) {
    double acc = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < ref.indices.size(); ++i) {
        if (ref.indices[i].order() != order)
            continue;
        const double r = ref.values[static_cast<Eigen::Index>(i)];
        acc += std::abs(fd.value(ref.indices[i]) - r) / std::abs(r);
        ++n;
    }
    return acc / n;
}

} // namespace

TEST_CASE("finite differences recover the M/M/inf mean and variance") {
    const HawkesModel m = fixtures::poisson();
    const double t = 3.0;
    for (std::size_t i = 0; i < 2; ++i) {
        std::vector<int> e(2, 0), e2(2, 0);
        e[i] = 1;
        e2[i] = 2;
        const auto ii = static_cast<Eigen::Index>(i);
        const double mean = m.lambda_bar()[ii] * (1 - std::exp(-m.mu()[ii] * t)) / m.mu()[ii];
        CHECK(fd_moment(m, t, MomentIndex::q(e)) == doctest::Approx(mean).epsilon(1e-4));
        // Poisson counts: factorial second moment is mean^2
        CHECK(fd_moment(m, t, MomentIndex::q(e2)) == doctest::Approx(mean * mean).epsilon(1e-4));
        CHECK(fd_moment(m, t, MomentIndex::lambda(e)) == doctest::Approx(m.lambda_bar()[ii]).epsilon(1e-4));
    }
}

TEST_CASE("finite differences agree with the engine on the bivariate model") {
    const HawkesModel m = fixtures::bivariate();
    const MomentTable ref = transient_moments(assemble_system(m, 2), 5.0,
                                              TransientMethod::closed_form);
    const MomentTable fd = fd_moment_table(m, 5.0, 2);
    CHECK(fd.indices == ref.indices);
    CHECK(mre(fd, ref, 1) <= 1e-3);
    CHECK(mre(fd, ref, 2) <= 5e-3);

    const FdEstimate e = fd_moment_estimate(m, 5.0, MomentIndex::q({1, 0}));
    CHECK(e.evaluations > 0);
    CHECK(e.truncation_estimate >= 0.0);
    CHECK(e.roundoff_estimate > 0.0);
}

TEST_CASE("central differences converge at second order for larger h") {
    const HawkesModel m = fixtures::trivariate();
    const MomentTable ref = transient_moments(assemble_system(m, 1), 5.0,
                                              TransientMethod::closed_form);
    std::vector<double> err;
    for (double h : {4e-2, 2e-2, 1e-2}) {
        FdSpec spec;
        spec.h = h;
        spec.estimate_error = false;
        err.push_back(mre(fd_moment_table(m, 5.0, 1, spec), ref, 1));
    }
    for (std::size_t k = 1; k < err.size(); ++k) {
        const double ratio = err[k - 1] / err[k];
        CHECK(ratio > 3.5);
        CHECK(ratio < 4.5);
    }
}

TEST_CASE("finite-difference two-time moments") {
    const HawkesModel p = fixtures::poisson();
    const double t = 2.0;
    for (double tau : {0.0, 0.5, 1.5}) {
        const Matrix c = autocovariance(p, t, tau, CrossKind::QQ);
        for (Eigen::Index i = 0; i < 2; ++i) {
            const double mean = p.lambda_bar()[i] * (1 - std::exp(-p.mu()[i] * t)) / p.mu()[i];
            CHECK(c(i, i) == doctest::Approx(mean * std::exp(-p.mu()[i] * tau)).epsilon(1e-4));
            CHECK(std::abs(c(i, 1 - i)) < 1e-5);
        }
    }
    // nothing is present at time 0
    const Matrix c0 = autocovariance(fixtures::bivariate(), 0.0, 1.0, CrossKind::QQ);
    CHECK(c0.cwiseAbs().maxCoeff() < 1e-6);

    const HawkesModel m = fixtures::bivariate();
    const Matrix ll = cross_moment_matrix(m, 2.0, 0.0, CrossKind::LL);
    CHECK(ll(0, 1) == doctest::Approx(ll(1, 0)).epsilon(1e-5));
    const MomentTable ref = transient_moments(assemble_system(m, 2), 2.0,
                                              TransientMethod::closed_form);
    CHECK(ll(0, 1) == doctest::Approx(ref.value(MomentIndex::lambda({1, 1}))).epsilon(1e-4));
    const Matrix ql = cross_moment_matrix(m, 2.0, 0.0, CrossKind::QL);
    CHECK(ql(1, 0) == doctest::Approx(ref.value(MomentIndex{{1, 0}, {0, 1}})).epsilon(1e-4));
    CHECK(std::string(to_string(CrossKind::QL)) == "QL");
}

TEST_CASE("finite-difference argument checks") {
    const HawkesModel m = fixtures::bivariate();
    CHECK_THROWS_AS((void)fd_moment(m, 1.0, MomentIndex::q({2, 2})), std::invalid_argument);
    FdSpec bad;
    bad.h = 0.5;
    CHECK_THROWS_AS((void)fd_moment(m, 1.0, MomentIndex::q({1, 0}), bad), std::invalid_argument);
    CHECK_THROWS((void)fd_cross_moment(m, 1.0, -1.0, 0, 0, CrossKind::QQ));
}
