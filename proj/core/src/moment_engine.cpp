#include "hawkespop/moment_engine.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

namespace hawkespop {

int MomentIndex::order() const { return lambda_order() + q_order(); }

int MomentIndex::q_order() const {
    return std::accumulate(n_q.begin(), n_q.end(), 0);
}

int MomentIndex::lambda_order() const {
    return std::accumulate(n_lambda.begin(), n_lambda.end(), 0);
}

MomentIndex MomentIndex::lambda(std::vector<int> n) {
    MomentIndex i;
    i.n_q.assign(n.size(), 0);
    i.n_lambda = std::move(n);
    return i;
}

MomentIndex MomentIndex::q(std::vector<int> n) {
    MomentIndex i;
    i.n_lambda.assign(n.size(), 0);
    i.n_q = std::move(n);
    return i;
}

std::string render_index(const MomentIndex &idx) {
    std::string out;
    auto add = [&](const std::string &s) {
        if (!out.empty())
            out += ' ';
        out += s;
    };
    for (std::size_t i = 0; i < idx.n_lambda.size(); ++i)
        if (idx.n_lambda[i] > 0)
            add("L" + std::to_string(i + 1) + "^" +
                std::to_string(idx.n_lambda[i]));
    for (std::size_t i = 0; i < idx.n_q.size(); ++i)
        if (idx.n_q[i] > 0)
            add("Q" + std::to_string(i + 1) + "^[" +
                std::to_string(idx.n_q[i]) + "]");
    return out.empty() ? "1" : out;
}

namespace {

constexpr double kUnderflowExponent = -600.0;

double binom(int n, int k) {
    if (k < 0 || k > n)
        return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return std::round(r);
}

// d-part compositions of n, first component descending
void compositions(std::size_t d, int n, std::vector<std::vector<int>> &out) {
    std::vector<int> cur(d, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t pos,
                                                    int left) {
        if (pos + 1 == d) {
            cur[pos] = left;
            out.push_back(cur);
            return;
        }
        for (int v = left; v >= 0; --v) {
            cur[pos] = v;
            rec(pos + 1, left - v);
        }
    };
    rec(0, n);
}

} // namespace

std::size_t dimension(std::size_t d, int n) {
    if (d < 1 || n < 1)
        throw std::invalid_argument("dimension: need d >= 1 and n >= 1");
    double total = 0.0;
    for (int k = 1; k <= n; ++k)
        total += binom(static_cast<int>(2 * d), k) * binom(n - 1, k - 1);
    return static_cast<std::size_t>(total);
}

std::vector<MomentIndex> enumerate_indices(std::size_t d, int n) {
    if (d < 1 || n < 1)
        throw std::invalid_argument("enumerate_indices: need d >= 1, n >= 1");
    std::vector<MomentIndex> out;
    for (int k = 0; k <= n; ++k) {
        std::vector<std::vector<int>> qs, ls;
        compositions(d, k, qs);
        compositions(d, n - k, ls);
        for (const auto &q : qs)
            for (const auto &l : ls)
                out.push_back(MomentIndex{l, q});
    }
    return out;
}

std::vector<MomentIndex> stacked_indices(std::size_t d, int n) {
    std::vector<MomentIndex> out;
    for (int o = 1; o <= n; ++o) {
        auto blk = enumerate_indices(d, o);
        out.insert(out.end(), blk.begin(), blk.end());
    }
    return out;
}

IndexMap::IndexMap(const std::vector<MomentIndex> &indices) {
    for (std::size_t i = 0; i < indices.size(); ++i)
        pos_.emplace(indices[i], i);
}

std::optional<std::size_t> IndexMap::find(const MomentIndex &i) const {
    auto it = pos_.find(i);
    if (it == pos_.end())
        return std::nullopt;
    return it->second;
}

std::size_t IndexMap::at(const MomentIndex &i) const {
    auto p = find(i);
    if (!p)
        throw std::out_of_range("moment index " + render_index(i) +
                                " is not part of the system");
    return *p;
}

std::vector<GeneratorTerm> generator_row(const HawkesModel &m,
                                         const MomentIndex &row) {
    const std::size_t d = m.dim();
    if (row.n_lambda.size() != d || row.n_q.size() != d)
        throw std::invalid_argument("generator_row: index dimension mismatch");
    const auto &a = row.n_lambda;
    const auto &b = row.n_q;
    const Vector &alpha = m.alpha();
    const Vector &mu = m.mu();
    const Vector &lb = m.lambda_bar();

    std::map<MomentIndex, double> acc;
    auto add = [&](MomentIndex col, double c) {
        if (c != 0.0)
            acc[std::move(col)] += c;
    };

    double diag = 0.0;
    for (std::size_t j = 0; j < d; ++j)
        diag -= a[j] * alpha[static_cast<Eigen::Index>(j)] +
                b[j] * mu[static_cast<Eigen::Index>(j)];
    add(row, diag);

    for (std::size_t j = 0; j < d; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        if (b[j] > 0) {
            MomentIndex c = row;
            c.n_lambda[j] += 1;
            c.n_q[j] -= 1;
            add(std::move(c), static_cast<double>(b[j]));
        }
        if (a[j] > 0) {
            MomentIndex c = row;
            c.n_lambda[j] -= 1;
            add(std::move(c), alpha[jj] * lb[jj] * a[j]);
        }
    }

    // arrivals of component j: lambda_j * prod (lambda + B_j)^a terms
    std::vector<int> mm(d, 0), rest(d, 0);
    const int total_a = row.lambda_order();
    std::function<void(std::size_t)> rec = [&](std::size_t pos) {
        if (pos == d) {
            int sm = std::accumulate(mm.begin(), mm.end(), 0);
            if (sm == total_a)
                return; // m == a
            double comb = 1.0;
            for (std::size_t k = 0; k < d; ++k) {
                comb *= binom(a[k], mm[k]);
                rest[k] = a[k] - mm[k];
            }
            for (std::size_t j = 0; j < d; ++j) {
                const double w = comb * m.joint_mark_moment(j, rest);
                if (w == 0.0)
                    continue;
                MomentIndex c{mm, b};
                c.n_lambda[j] += 1;
                if (b[j] > 0) {
                    MomentIndex c2 = c;
                    c2.n_q[j] -= 1;
                    add(std::move(c2), b[j] * w);
                }
                add(std::move(c), w);
            }
            return;
        }
        for (int v = 0; v <= a[pos]; ++v) {
            mm[pos] = v;
            rec(pos + 1);
        }
    };
    rec(0);

    std::vector<GeneratorTerm> out;
    out.reserve(acc.size());
    for (auto &[k, v] : acc)
        if (v != 0.0)
            out.push_back({k, v});
    return out;
}

MomentSystem assemble_system(const HawkesModel &m, int n) {
    if (n < 1)
        throw std::invalid_argument("assemble_system: order must be >= 1");
    if (n > m.max_mark_moment_order())
        throw ModelError("assemble_system: mark moments of order " +
                         std::to_string(n) + " are not available (max " +
                         std::to_string(m.max_mark_moment_order()) + ")");
    MomentSystem sys;
    sys.order = n;
    sys.d = m.dim();
    sys.indices = stacked_indices(sys.d, n);
    sys.index_map = IndexMap(sys.indices);
    const auto N = static_cast<Eigen::Index>(sys.indices.size());
    sys.F = Matrix::Zero(N, N);
    sys.b = Vector::Zero(N);
    sys.x0 = Vector::Zero(N);
    const Vector &lb = m.lambda_bar();
    for (Eigen::Index r = 0; r < N; ++r) {
        const MomentIndex &idx = sys.indices[static_cast<std::size_t>(r)];
        for (const auto &term : generator_row(m, idx)) {
            if (term.column.is_zero())
                sys.b[r] += term.coefficient;
            else
                sys.F(r, static_cast<Eigen::Index>(
                             sys.index_map.at(term.column))) +=
                    term.coefficient;
        }
        if (idx.q_order() == 0) {
            double v = 1.0;
            for (std::size_t i = 0; i < sys.d; ++i)
                v *= std::pow(lb[static_cast<Eigen::Index>(i)],
                              idx.n_lambda[i]);
            sys.x0[r] = v;
        }
    }
    sys.stable = check_stability(m).stable;
    sys.departures_positive = (m.mu().array() > 0.0).all();
    return sys;
}

double MomentTable::value(const MomentIndex &idx) const {
    auto v = find(idx);
    if (!v)
        throw std::out_of_range("moment table has no entry " +
                                render_index(idx));
    return *v;
}

std::optional<double> MomentTable::find(const MomentIndex &idx) const {
    for (std::size_t i = 0; i < indices.size(); ++i)
        if (indices[i] == idx)
            return values[static_cast<Eigen::Index>(i)];
    return std::nullopt;
}

int MomentTable::max_order() const {
    int o = 0;
    for (const auto &i : indices)
        o = std::max(o, i.order());
    return o;
}

Vector closed_form_solution(const Matrix &F, const Vector &b, const Vector &x0,
                            double t) {
    const Vector shift = solve_linear(F, b);
    const Matrix E = mat_exp(F, t);
    return E * (x0 + shift) - shift;
}

Vector augmented_exp_solution(const Matrix &F, const Vector &b,
                              const Vector &x0, double t) {
    const auto n = F.rows();
    Matrix aug = Matrix::Zero(n + 1, n + 1);
    aug.topLeftCorner(n, n) = F;
    aug.topRightCorner(n, 1) = b;
    Vector z(n + 1);
    z.head(n) = x0;
    z[n] = 1.0;
    return (mat_exp(aug, t) * z).head(n);
}

ClosedFormPropagator::ClosedFormPropagator(const Matrix &F, const Vector &b,
                                           const Vector &x0)
    : F_(F), x0_(x0) {
    shift_ = solve_linear(F, b);
    const auto n = F.rows();
    if (n == 0)
        return;
    Eigen::EigenSolver<Matrix> es(F, true);
    if (es.info() != Eigen::Success)
        return;
    V_ = es.eigenvectors();
    lambda_ = es.eigenvalues();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(V_);
    const double rc = lu.rcond();
    if (!(rc > 1e-8) || !std::isfinite(rc))
        return; // close to defective; use the Pade route
    const Eigen::MatrixXcd resid =
        F.cast<std::complex<double>>() * V_ - V_ * lambda_.asDiagonal();
    const double fn = std::max(1.0, F.cwiseAbs().colwise().sum().maxCoeff());
    if (resid.cwiseAbs().maxCoeff() > 1e-10 * fn)
        return;
    coef_ = lu.solve((x0_ + shift_).cast<std::complex<double>>());
    spectral_ = true;
}

Vector ClosedFormPropagator::operator()(double t) const {
    if (!std::isfinite(t))
        throw std::invalid_argument("closed form: non-finite time");
    if (t == 0.0)
        return x0_;
    if (!spectral_)
        return mat_exp(F_, t) * (x0_ + shift_) - shift_;
    Eigen::VectorXcd w(coef_.size());
    for (Eigen::Index i = 0; i < coef_.size(); ++i) {
        const double re = lambda_[i].real() * t;
        // same work for every t: dead modes are clamped, then masked out,
        // so no subnormal arithmetic
        const double live = re < kUnderflowExponent ? 0.0 : 1.0;
        w[i] = live * std::polar(std::exp(std::max(re, kUnderflowExponent)),
                                 lambda_[i].imag() * t) *
               coef_[i];
    }
    return (V_ * w).real() - shift_;
}

MomentTable transient_moments(const MomentSystem &sys, double t,
                              TransientMethod method, const OdeConfig &cfg) {
    if (!std::isfinite(t) || t < 0.0)
        throw std::invalid_argument("transient_moments: t must be >= 0");
    MomentTable out;
    out.time = t;
    out.indices = sys.indices;
    if (t == 0.0) {
        out.values = sys.x0;
        return out;
    }
    switch (method) {
    case TransientMethod::ode: {
        const Matrix &F = sys.F;
        const Vector &b = sys.b;
        auto f = [&](double, const Vector &x, Vector &dx) {
            dx.noalias() = F * x;
            dx += b;
        };
        out.values = integrate_ode(f, sys.x0, 0.0, t, cfg).state;
        break;
    }
    case TransientMethod::closed_form:
        out.values = ClosedFormPropagator(sys.F, sys.b, sys.x0)(t);
        break;
    case TransientMethod::automatic:
        try {
            out.values = ClosedFormPropagator(sys.F, sys.b, sys.x0)(t);
        } catch (const SingularMatrixError &) {
            out.values = augmented_exp_solution(sys.F, sys.b, sys.x0, t);
        }
        break;
    }
    return out;
}

MomentTable stationary_moments(const MomentSystem &sys) {
    if (!sys.stable)
        throw UnstableModelError("stationary moments require a stable model",
                                 std::numeric_limits<double>::quiet_NaN());
    if (!sys.departures_positive)
        throw ModelError("stationary moments require mu_i > 0 for every "
                         "component (Q grows without bound otherwise)");
    MomentTable out;
    out.time = std::numeric_limits<double>::infinity();
    out.indices = sys.indices;
    out.values = -solve_linear(sys.F, sys.b);
    return out;
}

MomentTable stationary_moments(const HawkesModel &m, int n) {
    return stationary_moments(assemble_system(m, n));
}

MomentTable stationary_sylvester(const HawkesModel &m) {
    if (!check_stability(m).stable)
        throw UnstableModelError("stationary moments require a stable model",
                                 check_stability(m).rho);
    if (!(m.mu().array() > 0.0).all())
        throw ModelError("stationary moments require mu_i > 0");
    const auto d = static_cast<Eigen::Index>(m.dim());
    const Matrix EB = m.mean_marks();
    const Matrix A = EB - Matrix(m.alpha().asDiagonal());
    const Vector c = m.alpha().cwiseProduct(m.lambda_bar());
    const Vector El = -solve_linear(A, c);
    const Vector EQ = El.cwiseQuotient(m.mu());

    Matrix rhs = c * El.transpose() + El * c.transpose();
    for (Eigen::Index k = 0; k < d; ++k) {
        Matrix G(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) {
                std::vector<int> e(static_cast<std::size_t>(d), 0);
                e[static_cast<std::size_t>(i)] += 1;
                e[static_cast<std::size_t>(j)] += 1;
                G(i, j) = m.joint_mark_moment(static_cast<std::size_t>(k), e);
            }
        rhs += El[k] * G;
    }
    const Matrix S = solve_sylvester(A, A.transpose(), -rhs);
    const Matrix Dmu = m.mu().asDiagonal();
    const Matrix P = solve_sylvester(
        A, -Dmu, -(S + c * EQ.transpose() + EB * Matrix(El.asDiagonal())));
    const Matrix R = solve_sylvester(-Dmu, -Dmu, -(P + P.transpose()));

    MomentTable out;
    out.time = std::numeric_limits<double>::infinity();
    out.indices = stacked_indices(m.dim(), 2);
    out.values.resize(static_cast<Eigen::Index>(out.indices.size()));
    for (std::size_t r = 0; r < out.indices.size(); ++r) {
        const auto &idx = out.indices[r];
        std::vector<Eigen::Index> ls, qs;
        for (Eigen::Index i = 0; i < d; ++i) {
            for (int k = 0; k < idx.n_lambda[static_cast<std::size_t>(i)]; ++k)
                ls.push_back(i);
            for (int k = 0; k < idx.n_q[static_cast<std::size_t>(i)]; ++k)
                qs.push_back(i);
        }
        double v;
        if (idx.order() == 1)
            v = ls.empty() ? EQ[qs[0]] : El[ls[0]];
        else if (qs.empty())
            v = S(ls[0], ls[1]);
        else if (ls.empty())
            v = R(qs[0], qs[1]);
        else
            v = P(ls[0], qs[0]);
        out.values[static_cast<Eigen::Index>(r)] = v;
    }
    return out;
}

double stirling2(int n, int k) {
    if (n < 0 || k < 0)
        throw std::invalid_argument("stirling2: negative argument");
    if (n == 0 && k == 0)
        return 1.0;
    if (n == 0 || k == 0 || k > n)
        return 0.0;
    std::vector<double> row(static_cast<std::size_t>(k) + 1, 0.0);
    row[0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        for (int j = std::min(i, k); j >= 1; --j)
            row[static_cast<std::size_t>(j)] =
                j * row[static_cast<std::size_t>(j)] +
                row[static_cast<std::size_t>(j) - 1];
        row[0] = 0.0;
    }
    return row[static_cast<std::size_t>(k)];
}

MomentTable factorial_to_raw(const MomentTable &table) {
    if (table.raw)
        return table;
    MomentTable out = table;
    out.raw = true;
    for (std::size_t r = 0; r < table.indices.size(); ++r) {
        const auto &idx = table.indices[r];
        const std::size_t d = idx.dim();
        double total = 0.0;
        std::vector<int> c(d, 0);
        std::function<void(std::size_t, double)> rec = [&](std::size_t pos,
                                                           double w) {
            if (w == 0.0)
                return;
            if (pos == d) {
                MomentIndex sub{idx.n_lambda, c};
                if (sub.is_zero()) {
                    total += w;
                    return;
                }
                auto v = table.find(sub);
                if (!v)
                    throw std::invalid_argument(
                        "factorial_to_raw: table is missing " +
                        render_index(sub));
                total += w * *v;
                return;
            }
            for (int k = 0; k <= idx.n_q[pos]; ++k) {
                c[pos] = k;
                rec(pos + 1, w * stirling2(idx.n_q[pos], k));
            }
            c[pos] = 0;
        };
        rec(0, 1.0);
        out.values[static_cast<Eigen::Index>(r)] = total;
    }
    return out;
}

Vector hawkes_count_moments(const HawkesModel &m, double t) {
    if (!std::isfinite(t) || t < 0.0)
        throw std::invalid_argument("hawkes_count_moments: t must be >= 0");
    const auto d = static_cast<Eigen::Index>(m.dim());
    if (t == 0.0)
        return Vector::Zero(d);
    const Matrix A = m.mean_marks() - Matrix(m.alpha().asDiagonal());
    const Vector c = m.alpha().cwiseProduct(m.lambda_bar());
    const Matrix EmI = mat_exp(A, t) - Matrix::Identity(d, d);
    const Vector ainv_c = solve_linear(A, c);
    const Vector term1 = solve_linear(A, Vector(EmI * m.lambda_bar()));
    const Vector term2 = solve_linear(A, Vector(solve_linear(A, Vector(EmI * c))));
    return term1 + term2 - t * ainv_c;
}

} // namespace hawkespop
