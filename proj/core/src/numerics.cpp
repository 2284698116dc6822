#include "hawkespop/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

namespace hawkespop {

namespace {

void require_square(const Matrix &a, const char *who) {
    if (a.rows() != a.cols())
        throw std::invalid_argument(std::string(who) + ": matrix is " +
                                    std::to_string(a.rows()) + "x" +
                                    std::to_string(a.cols()) +
                                    ", expected square");
}

void require_finite(const Matrix &a, const char *who) {
    if (!a.allFinite())
        throw std::invalid_argument(std::string(who) +
                                    ": non-finite matrix entry");
}

double norm1(const Matrix &a) {
    if (a.size() == 0)
        return 0.0;
    return a.cwiseAbs().colwise().sum().maxCoeff();
}

// Higham (2005) theta_m thresholds for degree 3, 5, 7, 9, 13.
constexpr std::array<double, 5> kTheta = {1.495585217958292e-2,
                                          2.539398330063230e-1,
                                          9.504178996162932e-1,
                                          2.097847961257068e0,
                                          5.371920351148152e0};

Matrix pade_low(const Matrix &a, int m) {
    static const double b3[] = {120., 60., 12., 1.};
    static const double b5[] = {30240., 15120., 3360., 420., 30., 1.};
    static const double b7[] = {17297280., 8648640., 1995840., 277200.,
                                25200.,    1512.,    56.,      1.};
    static const double b9[] = {17643225600., 8821612800., 2075673600.,
                                302702400.,   30270240.,   2162160.,
                                110880.,      3960.,       90.,
                                1.};
    const double *b = m == 3 ? b3 : m == 5 ? b5 : m == 7 ? b7 : b9;
    const auto n = a.rows();
    const Matrix ident = Matrix::Identity(n, n);
    const Matrix a2 = a * a;
    Matrix pw = ident;
    Matrix u_inner = b[1] * ident;
    Matrix v = b[0] * ident;
    for (int k = 2; k <= m; k += 2) {
        pw = pw * a2;
        v += b[k] * pw;
        u_inner += b[k + 1] * pw;
    }
    const Matrix u = a * u_inner;
    return (v - u).partialPivLu().solve(v + u);
}

Matrix pade13(const Matrix &a) {
    static const double b[] = {64764752532480000.,
                               32382376266240000.,
                               7771770303897600.,
                               1187353796428800.,
                               129060195264000.,
                               10559470521600.,
                               670442572800.,
                               33522128640.,
                               1323241920.,
                               40840800.,
                               960960.,
                               16380.,
                               182.,
                               1.};
    const auto n = a.rows();
    const Matrix ident = Matrix::Identity(n, n);
    const Matrix a2 = a * a;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    const Matrix u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                          b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
    const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                     b[4] * a4 + b[2] * a2 + b[0] * ident;
    return (v - u).partialPivLu().solve(v + u);
}

} // namespace

Matrix mat_exp(const Matrix &a, double t) {
    require_square(a, "mat_exp");
    require_finite(a, "mat_exp");
    if (!std::isfinite(t))
        throw std::invalid_argument("mat_exp: non-finite time");
    const Matrix ta = t * a;
    const double nrm = norm1(ta);
    static const int degrees[] = {3, 5, 7, 9};
    for (int i = 0; i < 4; ++i)
        if (nrm <= kTheta[i])
            return pade_low(ta, degrees[i]);
    int s = 0;
    if (nrm > kTheta[4])
        s = static_cast<int>(std::ceil(std::log2(nrm / kTheta[4])));
    Matrix r = pade13(ta / std::ldexp(1.0, s));
    for (int i = 0; i < s; ++i)
        r = r * r;
    return r;
}

double condition_estimate(const Matrix &a) {
    require_square(a, "condition_estimate");
    if (a.rows() == 0)
        return 1.0;
    if (!a.allFinite())
        return std::numeric_limits<double>::infinity();
    Eigen::PartialPivLU<Matrix> lu(a);
    const double rc = lu.rcond();
    if (!(rc > 0.0) || !std::isfinite(rc))
        return std::numeric_limits<double>::infinity();
    return 1.0 / rc;
}

Matrix solve_linear(const Matrix &a, const Matrix &b) {
    require_square(a, "solve_linear");
    require_finite(a, "solve_linear");
    require_finite(b, "solve_linear");
    if (b.rows() != a.rows())
        throw std::invalid_argument("solve_linear: right-hand side has " +
                                    std::to_string(b.rows()) +
                                    " rows, expected " +
                                    std::to_string(a.rows()));
    if (a.rows() == 0)
        return Matrix(0, b.cols());
    Eigen::PartialPivLU<Matrix> lu(a);
    const double rc = lu.rcond();
    const double cond = (rc > 0.0 && std::isfinite(rc))
                            ? 1.0 / rc
                            : std::numeric_limits<double>::infinity();
    if (!(cond <= kConditionLimit)) {
        std::ostringstream msg;
        msg << "solve_linear: matrix is singular or nearly so (condition "
               "estimate "
            << cond << ")";
        throw SingularMatrixError(msg.str(), cond);
    }
    Matrix x = lu.solve(b);
    // one step of iterative refinement
    const Matrix r = b - a * x;
    x += lu.solve(r);
    if (!x.allFinite())
        throw SingularMatrixError("solve_linear: non-finite solution", cond);
    return x;
}

Vector solve_linear(const Matrix &a, const Vector &b) {
    return solve_linear(a, Matrix(b)).col(0);
}

Matrix solve_sylvester(const Matrix &a, const Matrix &b, const Matrix &c) {
    require_square(a, "solve_sylvester");
    require_square(b, "solve_sylvester");
    require_finite(a, "solve_sylvester");
    require_finite(b, "solve_sylvester");
    require_finite(c, "solve_sylvester");
    if (c.rows() != a.rows() || c.cols() != b.rows())
        throw std::invalid_argument("solve_sylvester: C has wrong shape");
    using CMatrix = Eigen::MatrixXcd;
    Eigen::ComplexSchur<Matrix> sa(a), sb(b);
    const CMatrix &u = sa.matrixU();
    const CMatrix &ta = sa.matrixT();
    const CMatrix &v = sb.matrixU();
    const CMatrix &tb = sb.matrixT();
    CMatrix f = u.adjoint() * c.cast<std::complex<double>>() * v;

    const double scale = std::max(1.0, norm1(a) + norm1(b));
    const auto m = a.rows();
    const auto n = b.rows();
    CMatrix y(m, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::VectorXcd rhs = f.col(k);
        for (Eigen::Index j = 0; j < k; ++j)
            rhs -= tb(j, k) * y.col(j);
        CMatrix sys = ta;
        sys.diagonal().array() += tb(k, k);
        const double gap = sys.diagonal().cwiseAbs().minCoeff();
        if (gap <= 1e-13 * scale) {
            std::ostringstream msg;
            msg << "solve_sylvester: A and -B share an eigenvalue (gap " << gap
                << ")";
            throw SingularMatrixError(msg.str(), scale / std::max(gap, 1e-300));
        }
        y.col(k) = sys.triangularView<Eigen::Upper>().solve(rhs);
    }
    return (u * y * v.adjoint()).real();
}

std::vector<std::complex<double>> eigenvalues(const Matrix &a) {
    require_square(a, "eigenvalues");
    require_finite(a, "eigenvalues");
    if (a.rows() == 0)
        return {};
    Eigen::EigenSolver<Matrix> es(a, false);
    if (es.info() != Eigen::Success)
        throw NumericsError("eigenvalues: real Schur iteration failed");
    const auto &ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

double spectral_radius(const Matrix &a) {
    double r = 0.0;
    for (const auto &z : eigenvalues(a))
        r = std::max(r, std::abs(z));
    return r;
}

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329,
                            0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926,
                            0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013,
                            0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245,
                            0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970,
                            0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518,
                            0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550,
                            0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649,
                            0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082,
                           0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975,
                           0.417959183673469387755102040816327};

struct GkResult {
    double value;
    double error;
};

GkResult gk15(const std::function<double(double)> &g, double a, double b) {
    const double c = 0.5 * (a + b);
    const double hl = 0.5 * (b - a);
    auto eval = [&](double x) {
        const double y = g(x);
        if (!std::isfinite(y))
            throw NumericsError("quad_adaptive: non-finite integrand at " +
                                std::to_string(x));
        return y;
    };
    const double fc = eval(c);
    double kron = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = hl * kXgk[i];
        const double f1 = eval(c - dx);
        const double f2 = eval(c + dx);
        kron += kWgk[i] * (f1 + f2);
        if (i % 2 == 1)
            gauss += kWg[i / 2] * (f1 + f2);
    }
    return {kron * hl, std::abs((kron - gauss) * hl)};
}

} // namespace

double quad_adaptive(const std::function<double(double)> &g, double a,
                     double b, double tol) {
    if (!std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("quad_adaptive: non-finite bounds");
    if (!(tol > 0.0))
        throw std::invalid_argument("quad_adaptive: tol must be positive");
    if (a == b)
        return 0.0;
    if (b < a)
        return -quad_adaptive(g, b, a, tol);
    // globally adaptive: always bisect the interval with the largest error
    struct Piece {
        double a, b;
        GkResult r;
        bool operator<(const Piece &o) const { return r.error < o.r.error; }
    };
    std::priority_queue<Piece> heap;
    const GkResult first = gk15(g, a, b);
    heap.push({a, b, first});
    double value = first.value, error = first.error;
    constexpr int kMaxPieces = 4000;
    for (int n = 1; n < kMaxPieces; ++n) {
        const double floor =
            50.0 * std::numeric_limits<double>::epsilon() * std::abs(value);
        if (error <= std::max(tol, floor))
            break;
        const Piece p = heap.top();
        const double m = 0.5 * (p.a + p.b);
        if (!(m > p.a && m < p.b))
            break;
        heap.pop();
        const GkResult l = gk15(g, p.a, m), r = gk15(g, m, p.b);
        value += l.value + r.value - p.r.value;
        error += l.error + r.error - p.r.error;
        heap.push({p.a, m, l});
        heap.push({m, p.b, r});
    }
    return value;
}


GaussRule gauss_legendre(std::size_t n) {
    if (n == 0)
        throw std::invalid_argument("gauss_legendre: n must be positive");
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double pi = std::numbers::pi;
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) /
                                  static_cast<double>(k);
                p0 = p1;
                p1 = pk;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double pk =
                ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) /
                static_cast<double>(k);
            p0 = p1;
            p1 = pk;
        }
        if (n == 1) {
            rule.nodes[0] = 0.0;
            rule.weights[0] = 2.0;
            return rule;
        }
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

} // namespace hawkespop
