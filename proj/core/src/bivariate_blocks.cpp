#include "hawkespop/bivariate_blocks.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

namespace hawkespop {

namespace {

void require_bivariate(const HawkesModel &m, const char *who) {
    if (m.dim() != 2)
        throw std::invalid_argument(std::string(who) +
                                    ": only defined for d = 2 (got d = " +
                                    std::to_string(m.dim()) + ")");
}

void require_block(int k, int n, const char *who) {
    if (n < 1 || k < 0 || k > n)
        throw std::invalid_argument(std::string(who) +
                                    ": need n >= 1 and 0 <= k <= n");
}

std::vector<MomentIndex> block_indices(int k, int n) {
    std::vector<MomentIndex> out;
    for (auto &idx : enumerate_indices(2, n))
        if (idx.q_order() == k)
            out.push_back(std::move(idx));
    return out;
}

struct BlockCoupling {
    Matrix K;
    Matrix L;
    Vector f;
};

BlockCoupling extract(const HawkesModel &m, int k, int n) {
    const auto rows = block_indices(k, n);
    const auto prev = k > 0 ? block_indices(k - 1, n) : std::vector<MomentIndex>{};
    const auto lower = n > 1 ? stacked_indices(2, n - 1) : std::vector<MomentIndex>{};
    const IndexMap prev_map(prev), lower_map(lower), self_map(rows);
    const auto R = static_cast<Eigen::Index>(rows.size());
    BlockCoupling c;
    c.K = Matrix::Zero(R, static_cast<Eigen::Index>(prev.size()));
    c.L = Matrix::Zero(R, static_cast<Eigen::Index>(lower.size()));
    c.f = Vector::Zero(R);
    for (Eigen::Index r = 0; r < R; ++r) {
        for (const auto &term : generator_row(m, rows[static_cast<std::size_t>(r)])) {
            const MomentIndex &col = term.column;
            if (col.is_zero()) {
                c.f[r] += term.coefficient;
            } else if (col.order() < n) {
                c.L(r, static_cast<Eigen::Index>(lower_map.at(col))) +=
                    term.coefficient;
            } else if (auto p = prev_map.find(col)) {
                c.K(r, static_cast<Eigen::Index>(*p)) += term.coefficient;
            } else if (!self_map.find(col)) {
                throw std::logic_error("generator couples block (" +
                                       std::to_string(k) + "," +
                                       std::to_string(n - k) +
                                       ") outside the nested structure");
            }
        }
    }
    return c;
}

double initial_value(const HawkesModel &m, const MomentIndex &idx) {
    if (idx.q_order() > 0)
        return 0.0;
    double v = 1.0;
    for (std::size_t i = 0; i < idx.dim(); ++i)
        v *= std::pow(m.lambda_bar()[static_cast<Eigen::Index>(i)],
                      idx.n_lambda[i]);
    return v;
}

} // namespace

Matrix tridiag(const TridiagSpec &spec) {
    const auto n = spec.diag.size();
    if (n < 1 || spec.sub.size() != n - 1 || spec.sup.size() != n - 1)
        throw std::invalid_argument("tridiag: inconsistent lengths");
    Matrix t = Matrix::Zero(n, n);
    t.diagonal() = spec.diag;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        t(i + 1, i) = spec.sub[i];
        t(i, i + 1) = spec.sup[i];
    }
    return t;
}

std::size_t BlockLayout::total() const {
    return std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
}

BlockLayout block_layout(int n) {
    if (n < 1)
        throw std::invalid_argument("block_layout: n must be >= 1");
    BlockLayout l;
    l.order = n;
    std::size_t off = 0;
    for (int k = 0; k <= n; ++k) {
        const auto sz = static_cast<std::size_t>((k + 1) * (n - k + 1));
        l.offsets.push_back(off);
        l.sizes.push_back(sz);
        off += sz;
    }
    return l;
}

Matrix build_M(const HawkesModel &m, int k, int n) {
    require_bivariate(m, "build_M");
    require_block(k, n, "build_M");
    const Matrix EB = m.mean_marks();
    const Vector &al = m.alpha();
    const Vector &mu = m.mu();
    const double ab1 = al[0] - EB(0, 0);
    const double ab2 = al[1] - EB(1, 1);
    const int np = n - k;
    const auto sz = static_cast<Eigen::Index>(np + 1);
    Matrix M = Matrix::Zero((k + 1) * sz, (k + 1) * sz);
    for (int mq = 0; mq <= k; ++mq) {
        TridiagSpec spec;
        spec.diag.resize(sz);
        spec.sub.resize(sz - 1);
        spec.sup.resize(sz - 1);
        for (int l = 0; l <= np; ++l) {
            // lambda exponents (np - l, l), Q exponents (k - mq, mq)
            spec.diag[l] = -(np - l) * ab1 - (k - mq) * mu[0] - l * ab2 -
                           mq * mu[1];
            if (l >= 1)
                spec.sub[l - 1] = l * EB(1, 0);
            if (l < np)
                spec.sup[l] = (np - l) * EB(0, 1);
        }
        M.block(mq * sz, mq * sz, sz, sz) = tridiag(spec);
    }
    return M;
}

Matrix build_K(const HawkesModel &m, int k, int n) {
    require_bivariate(m, "build_K");
    require_block(k, n, "build_K");
    return extract(m, k, n).K;
}

Matrix build_L(const HawkesModel &m, int k, int n) {
    require_bivariate(m, "build_L");
    require_block(k, n, "build_L");
    return extract(m, k, n).L;
}

Vector build_forcing(const HawkesModel &m, int k, int n) {
    require_bivariate(m, "build_forcing");
    require_block(k, n, "build_forcing");
    return extract(m, k, n).f;
}

Matrix build_nested_F(const HawkesModel &m, int n) {
    require_bivariate(m, "build_nested_F");
    if (n < 1)
        throw std::invalid_argument("build_nested_F: n must be >= 1");
    std::size_t N = 0;
    for (int o = 1; o <= n; ++o)
        N += dimension(2, o);
    Matrix F = Matrix::Zero(static_cast<Eigen::Index>(N),
                            static_cast<Eigen::Index>(N));
    std::size_t base = 0;
    for (int o = 1; o <= n; ++o) {
        const BlockLayout lay = block_layout(o);
        for (int k = 0; k <= o; ++k) {
            const auto row = static_cast<Eigen::Index>(
                base + lay.offsets[static_cast<std::size_t>(k)]);
            const Matrix M = build_M(m, k, o);
            const BlockCoupling c = extract(m, k, o);
            F.block(row, row, M.rows(), M.cols()) = M;
            if (k > 0) {
                const auto col = static_cast<Eigen::Index>(
                    base + lay.offsets[static_cast<std::size_t>(k) - 1]);
                F.block(row, col, c.K.rows(), c.K.cols()) = c.K;
            }
            if (c.L.cols() > 0)
                F.block(row, 0, c.L.rows(), c.L.cols()) = c.L;
        }
        base += lay.total();
    }
    return F;
}

Vector build_nested_b(const HawkesModel &m, int n) {
    require_bivariate(m, "build_nested_b");
    std::size_t N = 0;
    for (int o = 1; o <= n; ++o)
        N += dimension(2, o);
    Vector b = Vector::Zero(static_cast<Eigen::Index>(N));
    b.head(2) = build_forcing(m, 0, 1);
    return b;
}

Vector psi_recursive_stationary(const HawkesModel &m, int n) {
    require_bivariate(m, "psi_recursive_stationary");
    if (n < 1)
        throw std::invalid_argument("psi_recursive_stationary: n must be >= 1");
    if (!check_stability(m).stable)
        throw UnstableModelError("stationary moments require a stable model",
                                 check_stability(m).rho);
    if (!(m.mu().array() > 0.0).all())
        throw ModelError("stationary moments require mu_i > 0");
    std::vector<double> stack;
    for (int o = 1; o <= n; ++o) {
        const Vector lower = Eigen::Map<const Vector>(
            stack.data(), static_cast<Eigen::Index>(stack.size()));
        Vector prev;
        std::vector<double> order_vals;
        for (int k = 0; k <= o; ++k) {
            const Matrix M = build_M(m, k, o);
            const BlockCoupling c = extract(m, k, o);
            Vector rhs = c.f;
            if (k > 0)
                rhs += c.K * prev;
            if (c.L.cols() > 0)
                rhs += c.L * lower;
            Vector x = -solve_linear(M, rhs);
            order_vals.insert(order_vals.end(), x.data(), x.data() + x.size());
            prev = std::move(x);
        }
        stack.insert(stack.end(), order_vals.begin(), order_vals.end());
    }
    return Eigen::Map<const Vector>(stack.data(),
                                    static_cast<Eigen::Index>(stack.size()));
}

Vector psi_recursive_transient(const HawkesModel &m, int n, double t,
                               const OdeConfig &cfg) {
    require_bivariate(m, "psi_recursive_transient");
    if (n < 1)
        throw std::invalid_argument("psi_recursive_transient: n must be >= 1");
    if (!std::isfinite(t) || t < 0.0)
        throw std::invalid_argument("psi_recursive_transient: t must be >= 0");

    std::vector<std::shared_ptr<const DenseTrajectory>> done; // canonical order
    std::vector<double> result;
    for (int o = 1; o <= n; ++o) {
        const std::vector<std::shared_ptr<const DenseTrajectory>> lower_trajs = done;
        auto lower_at = [&](double u) {
            std::vector<double> v;
            for (const auto &tr : lower_trajs) {
                const Vector x = tr->at(u);
                v.insert(v.end(), x.data(), x.data() + x.size());
            }
            return Vector(Eigen::Map<const Vector>(
                v.data(), static_cast<Eigen::Index>(v.size())));
        };
        std::shared_ptr<const DenseTrajectory> prev;
        for (int k = 0; k <= o; ++k) {
            const auto rows = block_indices(k, o);
            const Matrix M = build_M(m, k, o);
            const BlockCoupling c = extract(m, k, o);
            Vector y0(static_cast<Eigen::Index>(rows.size()));
            for (std::size_t i = 0; i < rows.size(); ++i)
                y0[static_cast<Eigen::Index>(i)] = initial_value(m, rows[i]);

            auto forcing = [&, prev](double u) {
                Vector g = c.f;
                if (k > 0)
                    g += c.K * prev->at(u);
                if (c.L.cols() > 0)
                    g += c.L * lower_at(u);
                return g;
            };
            auto rhs = [&](double u, const Vector &y, Vector &dy) {
                dy = M * y + forcing(u);
            };
            const OdeResult sol = integrate_ode(rhs, y0, 0.0, t, cfg, true);

            // variation of constants at t, Gauss-Legendre over panels
            Vector value = mat_exp(M, t) * y0;
            if (t > 0.0) {
                static const GaussRule rule = gauss_legendre(32);
                auto integral = [&](int panels) {
                    Vector acc = Vector::Zero(y0.size());
                    const double w = t / panels;
                    for (int p = 0; p < panels; ++p) {
                        const double a = p * w;
                        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                            const double s = a + 0.5 * w * (rule.nodes[q] + 1.0);
                            acc += (0.5 * w * rule.weights[q]) *
                                   (mat_exp(M, t - s) * forcing(s));
                        }
                    }
                    return acc;
                };
                int panels = std::max(1, static_cast<int>(std::ceil(t)));
                Vector cur = integral(panels);
                for (int refine = 0; refine < 4; ++refine) {
                    Vector next = integral(2 * panels);
                    const double diff = (next - cur).cwiseAbs().maxCoeff();
                    const double scale = 1.0 + next.cwiseAbs().maxCoeff();
                    cur = std::move(next);
                    panels *= 2;
                    if (diff <= 1e-12 * scale)
                        break;
                }
                value += cur;
            }
            result.insert(result.end(), value.data(), value.data() + value.size());
            done.push_back(sol.trajectory);
            prev = sol.trajectory;
        }
    }
    return Eigen::Map<const Vector>(result.data(),
                                    static_cast<Eigen::Index>(result.size()));
}

double kappa_cubic(const HawkesModel &m, double x) {
    require_bivariate(m, "kappa_cubic");
    const Matrix EB = m.mean_marks();
    const double ab1 = m.alpha()[0] - EB(0, 0);
    const double ab2 = m.alpha()[1] - EB(1, 1);
    const double s = ab1 + ab2;
    const double delta = ab1 * ab2 - EB(0, 1) * EB(1, 0);
    return x * x * x + 3.0 * s * x * x + (2.0 * s * s + 4.0 * delta) * x +
           4.0 * s * delta;
}

BivariateOracles closed_form_oracles(const HawkesModel &m, double t) {
    require_bivariate(m, "closed_form_oracles");
    if (m.coupling() != ColumnCoupling::independent)
        throw std::invalid_argument(
            "closed_form_oracles: formulas assume independent marks");
    if (!std::isfinite(t) || t < 0.0)
        throw std::invalid_argument("closed_form_oracles: t must be >= 0");
    const Matrix EB = m.mean_marks();
    const double b11 = EB(0, 0), b12 = EB(0, 1), b21 = EB(1, 0), b22 = EB(1, 1);
    const double a1 = m.alpha()[0], a2 = m.alpha()[1];
    const double ab1 = a1 - b11, ab2 = a2 - b22;
    const double lb1 = m.lambda_bar()[0], lb2 = m.lambda_bar()[1];
    const double mu1 = m.mu()[0], mu2 = m.mu()[1];
    const double c1 = a1 * lb1, c2 = a2 * lb2;
    const double s = ab1 + ab2;
    const double prod = b12 * b21;
    const double delta = ab1 * ab2 - prod;

    BivariateOracles o;
    o.D1 = (ab1 - ab2) * (ab1 - ab2) + 4.0 * prod;
    const double sq = std::sqrt(o.D1);
    o.eta1 = 0.5 * (-s + sq);
    o.eta2 = 0.5 * (-s - sq);
    o.kappa = {-s, -s + sq, -s - sq};
    o.degenerate = o.D1 <= 1e-12 * std::max(1.0, s * s);

    Matrix M01(2, 2);
    M01 << -ab1, b12, b21, -ab2;
    Matrix M02(3, 3);
    M02 << -2 * ab1, 2 * b12, 0, b21, -s, b12, 0, 2 * b21, -2 * ab2;
    Matrix N(2, 2);
    N << 0.5 * (ab2 - ab1), b12, b21, 0.5 * (ab1 - ab2);

    const Vector lb = (Vector(2) << lb1, lb2).finished();
    const Vector c = (Vector(2) << c1, c2).finished();
    const Vector S = (Vector(2) << (c1 * ab2 + c2 * b12) / delta,
                      (c2 * ab1 + c1 * b21) / delta)
                         .finished();

    if (o.degenerate) {
        o.warning = "repeated eigenvalues (D1 = 0): numeric matrix "
                    "exponential used instead of the closed form";
        o.exp_M01 = mat_exp(M01, t);
        o.exp_M02 = mat_exp(M02, t);
        MomentSystem sys = assemble_system(m, 1);
        const Vector x = augmented_exp_solution(sys.F, sys.b, sys.x0, t);
        o.mean_lambda = x.head(2);
        o.mean_q = x.tail(2);
    } else {
        const double e1 = std::exp(t * o.eta1), e2 = std::exp(t * o.eta2);
        o.exp_M01 = 0.5 * (e1 + e2) * Matrix::Identity(2, 2) +
                    ((e1 - e2) / sq) * N;
        o.mean_lambda = S + 0.5 * (e1 + e2) * lb + ((e1 - e2) / sq) * (N * lb) +
                        0.5 * (e1 / o.eta1 + e2 / o.eta2) * c +
                        ((e1 / o.eta1 - e2 / o.eta2) / sq) * (N * c);

        auto conv = [&](double eta, double mu) {
            // int_0^t e^{-mu (t - u)} e^{eta u} du
            if (std::abs(mu + eta) < 1e-12)
                return t * std::exp(eta * t);
            return (std::exp(eta * t) - std::exp(-mu * t)) / (mu + eta);
        };
        auto decay_int = [&](double mu) {
            return mu == 0.0 ? t : (1.0 - std::exp(-mu * t)) / mu;
        };
        const double mus[2] = {mu1, mu2};
        const Vector Nl = N * lb, Nc = N * c;
        o.mean_q.resize(2);
        for (int i = 0; i < 2; ++i) {
            const double f1 = conv(o.eta1, mus[i]);
            const double f2 = conv(o.eta2, mus[i]);
            const double u1 = f1 + f2, u2 = f1 - f2;
            const double u3 = f1 / o.eta1 + f2 / o.eta2;
            const double u4 = f1 / o.eta1 - f2 / o.eta2;
            o.mean_q[i] = S[i] * decay_int(mus[i]) + 0.5 * u1 * lb[i] +
                          u2 / sq * Nl[i] + 0.5 * u3 * c[i] + u4 / sq * Nc[i];
        }

        const Matrix I3 = Matrix::Identity(3, 3);
        o.exp_M02 = Matrix::Zero(3, 3);
        for (int i = 0; i < 3; ++i) {
            Matrix term = I3;
            double den = 1.0;
            for (int j = 0; j < 3; ++j) {
                if (j == i)
                    continue;
                term = term * (M02 - o.kappa[static_cast<std::size_t>(j)] * I3);
                den *= o.kappa[static_cast<std::size_t>(i)] -
                       o.kappa[static_cast<std::size_t>(j)];
            }
            o.exp_M02 +=
                (std::exp(o.kappa[static_cast<std::size_t>(i)] * t) / den) * term;
        }
    }

    o.stationary_lambda = S;
    if (mu1 > 0.0 && mu2 > 0.0 && delta > 0.0 && ab1 > 0.0 && ab2 > 0.0) {
        o.stationary_q = (Vector(2) << S[0] / mu1, S[1] / mu2).finished();
        const double B11s = m.mark(0, 0).moment(2), B12s = m.mark(0, 1).moment(2);
        const double B21s = m.mark(1, 0).moment(2), B22s = m.mark(1, 1).moment(2);
        Matrix A02(3, 3);
        A02 << 2 * ab1, -2 * b12, 0, -b21, s, -b12, 0, -2 * b21, 2 * ab2;
        Vector r02(3);
        r02 << S[0] * (2 * c1 + B11s) + S[1] * B12s,
            S[0] * (b11 * b21 + c2) + S[1] * (b22 * b12 + c1),
            S[0] * B21s + S[1] * (2 * c2 + B22s);
        o.stationary_lambda2 = solve_linear(A02, r02);
        const Vector &L2 = o.stationary_lambda2;
        const Vector &EQ = o.stationary_q;
        Matrix A11 = Matrix::Zero(4, 4);
        A11(0, 0) = ab1 + mu1;
        A11(0, 1) = -b12;
        A11(1, 0) = -b21;
        A11(1, 1) = ab2 + mu1;
        A11(2, 2) = ab1 + mu2;
        A11(2, 3) = -b12;
        A11(3, 2) = -b21;
        A11(3, 3) = ab2 + mu2;
        Vector r11(4);
        r11 << L2[0] + c1 * EQ[0] + b11 * S[0], L2[1] + c2 * EQ[0] + b21 * S[0],
            L2[1] + c1 * EQ[1] + b12 * S[1], L2[2] + c2 * EQ[1] + b22 * S[1];
        o.stationary_qlambda = solve_linear(A11, r11);
        const Vector &P = o.stationary_qlambda;
        o.stationary_q2 = (Vector(3) << P[0] / mu1, (P[1] + P[2]) / (mu1 + mu2),
                           P[3] / mu2)
                              .finished();
    }
    return o;
}

} // namespace hawkespop
