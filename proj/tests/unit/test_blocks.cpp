#include "fixtures.hpp"
#include "listings.hpp"
#include "hawkespop/bivariate_blocks.hpp"
#include "hawkespop/moment_engine.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace hawkespop;
using fixtures::mat;
using fixtures::vec;

namespace {

bool same(const Matrix &a, const Matrix &b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

} // namespace

TEST_CASE("bivariate blocks match the hand-derived matrices") {
    for (const auto &l : listings::bivariate_listings()) {
        INFO(l.name);
        CHECK(l.exact());
    }
}

TEST_CASE("order-3 transfer block and block-triangular structure") {
    const HawkesModel m = fixtures::bivariate();
    CHECK(same(build_K(m, 3, 3), mat(4, 6, {3, 0, 0, 0, 0, 0, //
                                            0, 1, 2, 0, 0, 0, //
                                            0, 0, 0, 2, 1, 0, //
                                            0, 0, 0, 0, 0, 3})));

    const BlockLayout lay = block_layout(3);
    CHECK(lay.sizes == std::vector<std::size_t>{4, 6, 6, 4});
    CHECK(lay.total() == 20);
    const Matrix F = build_nested_F(m, 3);
    for (int k = 0; k <= 3; ++k)
        for (int j = k + 1; j <= 3; ++j)
            CHECK(F.block(static_cast<Eigen::Index>(lay.offsets[k]) + 14,
                          static_cast<Eigen::Index>(lay.offsets[j]) + 14,
                          static_cast<Eigen::Index>(lay.sizes[k]),
                          static_cast<Eigen::Index>(lay.sizes[j]))
                      .isZero());
}

TEST_CASE("nested system equals the assembled generator system") {
    for (const HawkesModel &m : {fixtures::bivariate(), fixtures::poisson()})
        for (int n = 1; n <= 4; ++n) {
            const MomentSystem sys = assemble_system(m, n);
            CHECK(sys.indices == stacked_indices(2, n));
            CHECK(build_nested_F(m, n) == sys.F);
            CHECK(build_nested_b(m, n) == sys.b);
        }
}

TEST_CASE("tridiagonal helper") {
    const Matrix t = tridiag({vec({1, 2}), vec({3, 4, 5}), vec({6, 7})});
    CHECK(same(t, mat(3, 3, {3, 6, 0, 1, 4, 7, 0, 2, 5})));
    CHECK_THROWS_AS((void)tridiag({vec({1}), vec({3, 4, 5}), vec({6, 7})}),
                    std::invalid_argument);
}

TEST_CASE("recursive block solves agree with the engine") {
    const HawkesModel m = fixtures::bivariate();
    const MomentSystem sys = assemble_system(m, 3);
    const MomentTable st = stationary_moments(sys);
    const Vector rs = psi_recursive_stationary(m, 3);
    CHECK((rs - st.values).cwiseAbs().maxCoeff() / st.values.cwiseAbs().maxCoeff() < 1e-12);

    const MomentTable tr = transient_moments(sys, 5.0, TransientMethod::closed_form);
    const Vector rt = psi_recursive_transient(m, 3, 5.0);
    CHECK(((rt - tr.values).cwiseAbs().array() /
           tr.values.cwiseAbs().array().max(1.0))
              .maxCoeff() < 1e-7);
    CHECK(psi_recursive_transient(m, 2, 0.0) == sys.x0.head(14));
    CHECK_THROWS_AS((void)build_M(fixtures::trivariate(), 0, 1), std::invalid_argument);
}

TEST_CASE("closed-form bivariate oracles") {
    const HawkesModel m = fixtures::bivariate();
    const BivariateOracles o = closed_form_oracles(m, 5.0);
    const Matrix M01 = build_M(m, 0, 1);
    const Matrix M02 = build_M(m, 0, 2);
    CHECK_FALSE(o.degenerate);
    CHECK(o.eta1 + o.eta2 == doctest::Approx(M01.trace()));
    CHECK(o.eta1 * o.eta2 == doctest::Approx(M01.determinant()));
    std::vector<double> ev;
    for (auto z : eigenvalues(M02)) {
        CHECK(std::abs(z.imag()) < 1e-12);
        ev.push_back(z.real());
    }
    std::vector<double> ks(o.kappa.begin(), o.kappa.end());
    std::sort(ev.begin(), ev.end());
    std::sort(ks.begin(), ks.end());
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(ks[i] == doctest::Approx(ev[i]).epsilon(1e-12));
        CHECK(std::abs(kappa_cubic(m, ks[i])) < 1e-10);
    }

    const MomentTable t5 = transient_moments(assemble_system(m, 1), 5.0,
                                             TransientMethod::closed_form);
    CHECK(o.mean_lambda[0] == doctest::Approx(t5.value(MomentIndex::lambda({1, 0}))).epsilon(1e-12));
    CHECK(o.mean_lambda[1] == doctest::Approx(t5.value(MomentIndex::lambda({0, 1}))).epsilon(1e-12));
    CHECK(o.mean_q[0] == doctest::Approx(t5.value(MomentIndex::q({1, 0}))).epsilon(1e-12));
    CHECK(o.mean_q[1] == doctest::Approx(t5.value(MomentIndex::q({0, 1}))).epsilon(1e-12));

    const MomentTable st = stationary_moments(m, 2);
    const Vector flat = st.values;
    CHECK(o.stationary_lambda.isApprox(flat.segment(0, 2), 1e-12));
    CHECK(o.stationary_q.isApprox(flat.segment(2, 2), 1e-12));
    CHECK(o.stationary_lambda2.isApprox(flat.segment(4, 3), 1e-12));
    CHECK(o.stationary_qlambda.isApprox(flat.segment(7, 4), 1e-12));
    CHECK(o.stationary_q2.isApprox(flat.segment(11, 3), 1e-12));

    CHECK((o.exp_M02 - mat_exp(M02, 5.0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("matrix exponential oracle on random bivariate models") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> tt(0.1, 10.0);
    for (int rep = 0; rep < 100; ++rep) {
        const HawkesModel m = fixtures::random_bivariate(rng);
        const double t = tt(rng);
        const BivariateOracles o = closed_form_oracles(m, t);
        const Matrix ref1 = mat_exp(build_M(m, 0, 1), t);
        const Matrix ref2 = mat_exp(build_M(m, 0, 2), t);
        CHECK((o.exp_M01 - ref1).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((o.exp_M02 - ref2).cwiseAbs().maxCoeff() < 1e-9);
        const MomentTable mt = transient_moments(assemble_system(m, 1), t,
                                                 TransientMethod::closed_form);
        CHECK(o.mean_q[0] == doctest::Approx(mt.value(MomentIndex::q({1, 0}))).epsilon(1e-9));
    }
}

TEST_CASE("oracles fall back when the discriminant vanishes") {
    // a1 = a2 and no cross excitation gives a double root
    const HawkesModel m(vec({1, 1}), vec({2, 2}), vec({1, 1}),
                        fixtures::exp_marks(mat(2, 2, {0.5, 0, 0, 0.5})));
    const BivariateOracles o = closed_form_oracles(m, 2.0);
    CHECK(o.degenerate);
    CHECK_FALSE(o.warning.empty());
    CHECK((o.exp_M01 - mat_exp(build_M(m, 0, 1), 2.0)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(o.mean_lambda[0] == doctest::Approx(2.0 / 1.5 + (1 - 2.0 / 1.5) * std::exp(-3.0)));
}
