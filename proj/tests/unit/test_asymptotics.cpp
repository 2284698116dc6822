#include "fixtures.hpp"
#include "hawkespop/asymptotics.hpp"
#include "hawkespop/moment_engine.hpp"

#include <doctest.h>

#include <cmath>

using namespace hawkespop;
using fixtures::vec;

namespace {

SymmetricModel mixed_marks() {
    SymmetricModel m;
    m.d = 3;
    m.alpha = 2.0;
    m.lambda_bar = 0.7;
    m.marks = {exponential_mark(0.3), deterministic_mark(0.5), exponential_mark(0.4)};
    return m;
}

} // namespace

TEST_CASE("symmetric stationary transform: trivial cases") {
    const SymmetricModel m = exponential_symmetric_family(2, 0.6);
    CHECK(stationary_laplace_symmetric(m, 0.0) == 1.0);
    CHECK(stationary_laplace_symmetric(m, vec({0, 0})) == 1.0);
    CHECK(gamma_limit_transform(m, vec({0, 0})) == 1.0);

    SymmetricModel z;
    z.d = 1;
    z.alpha = 1.5;
    z.lambda_bar = 0.8;
    z.marks = {zero_mark()};
    for (double s : {0.1, 1.0, 4.0})
        CHECK(stationary_laplace_symmetric(z, s) ==
              doctest::Approx(std::exp(-0.8 * s)).epsilon(1e-12));

    CHECK_THROWS_AS((void)stationary_laplace_symmetric(
                        exponential_symmetric_family(2, 1.0), 1.0),
                    UnstableModelError);
    CHECK_THROWS_AS((void)stationary_laplace_symmetric(m, -1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)exponential_symmetric_family(2, 1.2), std::invalid_argument);
}

TEST_CASE("symmetric transform derivatives match the stationary moments") {
    const SymmetricModel sm = mixed_marks();
    const MomentTable st = stationary_moments(sm.to_model(1.0), 2);
    const double h = 1e-3;
    auto T = [&](double s) { return stationary_laplace_symmetric(sm, s, 1e-14); };
    const double t0 = 1.0, t1 = T(h), t2 = T(2 * h), t3 = T(3 * h);
    // one-sided stencils of second order
    const double d1 = (-3 * t0 + 4 * t1 - t2) / (2 * h);
    const double d2 = (2 * t0 - 5 * t1 + 4 * t2 - t3) / (h * h);
    const double mean = st.value(MomentIndex::lambda({1, 0, 0}));
    CHECK(-d1 == doctest::Approx(mean).epsilon(1e-5));
    CHECK(mean == doctest::Approx(0.7 / (1 - 1.2 / 2.0)).epsilon(1e-12));
    CHECK(d2 == doctest::Approx(st.value(MomentIndex::lambda({2, 0, 0}))).epsilon(1e-4));
    CHECK(d2 == doctest::Approx(st.value(MomentIndex::lambda({1, 1, 0}))).epsilon(1e-4));
}

TEST_CASE("symmetric transform: exchangeability, monotonicity, log-convexity") {
    const SymmetricModel m = mixed_marks();
    const double a = stationary_laplace_symmetric(m, vec({0.3, 1.1, 0.2}));
    CHECK(std::abs(a - stationary_laplace_symmetric(m, vec({1.1, 0.2, 0.3}))) < 1e-12);
    CHECK(std::abs(a - stationary_laplace_symmetric(m, vec({0.2, 0.3, 1.1}))) < 1e-12);
    CHECK(std::abs(a - stationary_laplace_symmetric(m, 1.6)) < 1e-12);

    const double step = 0.25;
    std::vector<double> logs;
    double prev = 1.0;
    for (int k = 1; k <= 24; ++k) {
        const double v = stationary_laplace_symmetric(m, k * step);
        CHECK(v > 0.0);
        CHECK(v < prev);
        prev = v;
        logs.push_back(std::log(v));
    }
    for (std::size_t k = 1; k + 1 < logs.size(); ++k)
        CHECK(logs[k - 1] - 2 * logs[k] + logs[k + 1] >= -1e-12);
}

TEST_CASE("Gamma limit moment identities") {
    const SymmetricModel m = exponential_symmetric_family(3, 0.8, 1.5, 0.6);
    const GammaLimit g = GammaLimit::of(m);
    const ThetaSigma ts = symmetric_theta_sigma(m);
    CHECK(g.rate == doctest::Approx(ts.sigma));
    CHECK(g.shape == doctest::Approx(ts.sigma * 0.6));
    CHECK(g.mean() == doctest::Approx(0.6));
    CHECK(g.variance() == doctest::Approx(0.6 / ts.sigma));

    // the transform depends on s_bar only, so every partial derivative of
    // log T is the s_bar derivative
    const double h = 1e-4;
    auto lg = [&](double s) { return std::log(g.laplace(s)); };
    const double d1 = (lg(h) - lg(-h)) / (2 * h);
    const double d2 = (lg(h) - 2 * lg(0) + lg(-h)) / (h * h);
    CHECK(std::abs(-d1 - 0.6) < 1e-6);
    CHECK(std::abs(d2 - 0.6 / ts.sigma) < 1e-6);
    CHECK(gamma_limit_transform(m, vec({0.2, 0.5, 0.3})) ==
          doctest::Approx(std::pow(ts.sigma / (ts.sigma + 1.0), ts.sigma * 0.6)));
}

TEST_CASE("convergence sweep toward the Gamma limit") {
    std::vector<double> sgrid;
    for (int k = 0; k <= 20; ++k)
        sgrid.push_back(0.25 * k);
    const auto rows = convergence_sweep(
        [](double th) { return exponential_symmetric_family(2, th); },
        {0.5, 0.9, 0.99}, sgrid);
    REQUIRE(rows.size() == 3);
    for (const auto &r : rows) {
        CHECK(r.distances.front() == 0.0);
        CHECK(r.distances.size() == sgrid.size());
        CHECK(r.limit_sigma == doctest::Approx(2.0));
        CHECK(r.limit_variance == doctest::Approx(0.5));
    }
    CHECK(rows[0].sup_distance > rows[1].sup_distance);
    CHECK(rows[1].sup_distance > rows[2].sup_distance);
    CHECK(rows[2].sup_distance <= 0.02);
    CHECK(std::abs(rows[0].rescaled_variance - 0.5) > std::abs(rows[1].rescaled_variance - 0.5));
    CHECK(std::abs(rows[1].rescaled_variance - 0.5) > std::abs(rows[2].rescaled_variance - 0.5));
    CHECK(rows[2].rescaled_variance == doctest::Approx(0.5).epsilon(0.03));
    CHECK_THROWS_AS((void)convergence_sweep(
                        [](double th) { return exponential_symmetric_family(2, th); },
                        {1.0}, sgrid),
                    std::invalid_argument);
}
