#include "fixtures.hpp"
#include "hawkespop/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace hawkespop;
using fixtures::mat;
using fixtures::vec;

namespace {

// X from (I kron A + B^T kron I) vec(X) = vec(C)
Matrix kronecker_sylvester(const Matrix &A, const Matrix &B, const Matrix &C) {
    const auto n = A.rows(), m = B.rows();
    Matrix K = Matrix::Zero(n * m, n * m);
    for (Eigen::Index j = 0; j < m; ++j)
        K.block(j * n, j * n, n, n) += A;
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            K.block(i * n, j * n, n, n) += B(j, i) * Matrix::Identity(n, n);
    const Vector c = Eigen::Map<const Vector>(C.data(), n * m);
    const Vector x = K.fullPivLu().solve(c);
    return Eigen::Map<const Matrix>(x.data(), n, m);
}

Matrix random_matrix(std::mt19937_64 &rng, Eigen::Index n, double scale) {
    std::normal_distribution<double> g(0.0, scale);
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            a(i, j) = g(rng);
    return a;
}

} // namespace

TEST_CASE("mat_exp of a diagonal and a rotation generator") {
    const Matrix D = vec({-1.0, 0.5, 2.0}).asDiagonal();
    const Matrix E = mat_exp(D, 1.5);
    for (int i = 0; i < 3; ++i)
        CHECK(E(i, i) == doctest::Approx(std::exp(1.5 * D(i, i))).epsilon(1e-14));
    CHECK(std::abs(E(0, 1)) < 1e-300);

    const Matrix R = mat(2, 2, {0, -1, 1, 0});
    const double th = 2.0;
    const Matrix Er = mat_exp(R, th);
    CHECK(Er(0, 0) == doctest::Approx(std::cos(th)).epsilon(1e-14));
    CHECK(Er(1, 0) == doctest::Approx(std::sin(th)).epsilon(1e-14));
}

TEST_CASE("mat_exp of a nilpotent matrix is a finite series") {
    const Matrix N = mat(3, 3, {0, 1, 2, 0, 0, 3, 0, 0, 0});
    const Matrix expected = Matrix::Identity(3, 3) + N + 0.5 * N * N;
    CHECK((mat_exp(N) - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("mat_exp handles large norms through scaling and squaring") {
    std::mt19937_64 rng(3);
    for (double scale : {0.01, 1.0, 30.0}) {
        Matrix A = random_matrix(rng, 5, scale);
        A -= (A.cwiseAbs().rowwise().sum().maxCoeff() + 1.0) *
             Matrix::Identity(5, 5); // decaying
        const Matrix half = mat_exp(A, 0.5);
        const Matrix full = mat_exp(A, 1.0);
        CHECK((half * half - full).cwiseAbs().maxCoeff() <=
              1e-12 * std::max(1.0, full.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("mat_exp agrees with eigen decomposition on a diagonalizable matrix") {
    const Matrix V = mat(3, 3, {1, 2, 0, 0, 1, 1, 1, 0, 1});
    const Matrix L = vec({-0.3, -1.2, 0.7}).asDiagonal();
    const Matrix A = V * L * V.inverse();
    const Matrix expected = V * Matrix(vec({std::exp(-0.6), std::exp(-2.4),
                                            std::exp(1.4)})
                                           .asDiagonal()) *
                            V.inverse();
    CHECK((mat_exp(A, 2.0) - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("solve_linear rejects singular systems") {
    const Matrix S = mat(2, 2, {1, 2, 2, 4});
    CHECK_THROWS_AS((void)solve_linear(S, vec({1, 1})), SingularMatrixError);
    const Matrix A = mat(2, 2, {4, 1, 2, 3});
    const Vector x = solve_linear(A, vec({1, 2}));
    CHECK((A * x - vec({1, 2})).norm() < 1e-14);
}

TEST_CASE("Bartels-Stewart matches the Kronecker oracle") {
    std::mt19937_64 rng(11);
    for (int n : {1, 2, 3, 5}) {
        for (int m : {1, 3, 4}) {
            const Matrix A = random_matrix(rng, n, 1.0) - 3.0 * Matrix::Identity(n, n);
            const Matrix B = random_matrix(rng, m, 1.0) - 3.0 * Matrix::Identity(m, m);
            Matrix C(n, m);
            C.setRandom();
            const Matrix X = solve_sylvester(A, B, C);
            const Matrix K = kronecker_sylvester(A, B, C);
            CHECK((X - K).cwiseAbs().maxCoeff() < 1e-10);
            CHECK((A * X + X * B - C).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("Sylvester with a shared eigenvalue of A and -B is singular") {
    const Matrix A = vec({1.0, 2.0}).asDiagonal();
    const Matrix B = vec({-1.0, 5.0}).asDiagonal();
    CHECK_THROWS_AS((void)solve_sylvester(A, B, Matrix::Ones(2, 2)),
                    SingularMatrixError);
}

TEST_CASE("Dormand-Prince integrates linear and nonlinear problems") {
    OdeConfig cfg;
    cfg.rel_tol = 1e-11;
    cfg.abs_tol = 1e-13;
    auto decay = [](double, const Vector &x, Vector &dx) { dx = -x; };
    const OdeResult r = integrate_ode(decay, vec({1.0, 2.0}), 0.0, 3.0, cfg, true);
    CHECK(r.state[0] == doctest::Approx(std::exp(-3.0)).epsilon(1e-9));
    CHECK(r.state[1] == doctest::Approx(2 * std::exp(-3.0)).epsilon(1e-9));
    REQUIRE(r.trajectory);
    for (double t : {0.0, 0.37, 1.5, 2.999, 3.0})
        CHECK(r.trajectory->at(t)[0] == doctest::Approx(std::exp(-t)).epsilon(1e-7));

    // logistic growth
    auto logistic = [](double, const Vector &x, Vector &dx) {
        dx = x.cwiseProduct((Vector::Ones(1) - x));
    };
    const OdeResult l = integrate_ode(logistic, vec({0.1}), 0.0, 4.0, cfg);
    const double exact = 1.0 / (1.0 + 9.0 * std::exp(-4.0));
    CHECK(l.state[0] == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("ODE solver reports blow-up and bad configs") {
    auto blow = [](double, const Vector &x, Vector &dx) { dx = x.cwiseProduct(x); };
    OdeConfig cfg;
    cfg.max_steps = 2000;
    CHECK_THROWS_AS((void)integrate_ode(blow, vec({1.0}), 0.0, 2.0, cfg), OdeError);
    OdeConfig bad;
    bad.rel_tol = -1;
    CHECK_THROWS((void)integrate_ode(blow, vec({1.0}), 0.0, 0.5, bad));
}

TEST_CASE("adaptive quadrature") {
    CHECK(quad_adaptive([](double x) { return x * x; }, 0, 1) ==
          doctest::Approx(1.0 / 3).epsilon(1e-13));
    CHECK(quad_adaptive([](double x) { return std::sqrt(x); }, 0, 1, 1e-12) ==
          doctest::Approx(2.0 / 3).epsilon(1e-10));
    CHECK(quad_adaptive([](double x) { return std::sin(x); }, 0, std::numbers::pi) ==
          doctest::Approx(2.0).epsilon(1e-13));
    CHECK(quad_adaptive([](double x) { return x; }, 1, 0) == doctest::Approx(-0.5));
    // roundoff-level noise must not stall the refinement
    const double noisy = quad_adaptive(
        [](double x) { return 1.0 + 1e-15 * std::sin(1e9 * x); }, 0, 1, 1e-14);
    CHECK(noisy == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
    for (std::size_t n : {1u, 2u, 5u, 32u}) {
        const GaussRule g = gauss_legendre(n);
        double w = 0.0;
        for (double x : g.weights)
            w += x;
        CHECK(w == doctest::Approx(2.0).epsilon(1e-13));
        const int deg = static_cast<int>(2 * n - 1);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += g.weights[i] * std::pow(g.nodes[i], deg - 1);
        const double exact = (deg - 1) % 2 == 0 ? 2.0 / deg : 0.0;
        CHECK(s == doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("spectral radius and condition estimate") {
    CHECK(spectral_radius(mat(2, 2, {0, 2, 2, 0})) == doctest::Approx(2.0));
    CHECK(condition_estimate(Matrix::Identity(3, 3)) == doctest::Approx(1.0));
    CHECK(condition_estimate(mat(2, 2, {1, 1, 1, 1 + 1e-14})) > 1e12);
}
