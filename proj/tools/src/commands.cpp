#include "hawkespop_cli/commands.hpp"

#include "hawkespop/asymptotics.hpp"
#include "hawkespop/bivariate_blocks.hpp"
#include "hawkespop/csv.hpp"
#include "hawkespop/fd_moments.hpp"
#include "hawkespop/model_config.hpp"
#include "hawkespop/moment_engine.hpp"
#include "hawkespop/simulator.hpp"
#include "hawkespop/transform.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>

namespace hawkespop::cli {

namespace {

using Clock = std::chrono::steady_clock;

template <class T>
T pick(const std::optional<T> &flag, const std::optional<T> &file,
       const char *name) {
    if (flag)
        return *flag;
    if (file)
        return *file;
    throw UsageError(std::string("missing --") + name +
                     " (not given and not set in the config's run section)");
}

template <class T>
T pick_or(const std::optional<T> &flag, const std::optional<T> &file, T dflt) {
    return flag ? *flag : file ? *file : dflt;
}

HawkesModel model_of(const ModelConfig &cfg) {
    if (cfg.model)
        return *cfg.model;
    if (cfg.symmetric)
        return cfg.symmetric->to_model(1.0);
    throw ConfigError("config defines no model");
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double x) { return format_number(x); }

Vector to_vector(const std::vector<double> &v) {
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<std::size_t> positions_of_order(const std::vector<MomentIndex> &idx,
                                            int k) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < idx.size(); ++i)
        if (idx[i].order() == k)
            out.push_back(i);
    return out;
}

struct Errors {
    double mae = 0.0;
    double mre = 0.0;
};

// summed absolute / relative error against the benchmark
Errors errors(const Vector &bm, const Vector &x,
              const std::vector<std::size_t> &pos) {
    Errors e;
    for (std::size_t p : pos) {
        const auto i = static_cast<Eigen::Index>(p);
        const double a = std::abs(x[i] - bm[i]);
        e.mae += a;
        e.mre += bm[i] != 0.0 ? a / std::abs(bm[i]) : a;
    }
    return e;
}

void check_runs(std::size_t runs) {
    if (runs < 2)
        throw UsageError("--runs must be at least 2 (got " +
                         std::to_string(runs) + ")");
}

Vector order_one_means(const HawkesModel &m, double t) {
    return transient_moments(assemble_system(m, 1), t, TransientMethod::automatic)
        .values;
}

} // namespace

void cmd_moments(const MomentsOptions &o, std::ostream &out) {
    const ModelConfig cfg = load_model_config(o.config);
    const HawkesModel m = model_of(cfg);
    const int n = pick_or(o.order, cfg.run.order, 2);
    if (n < 1)
        throw UsageError("--order must be >= 1");
    const std::string method =
        pick_or(o.method, cfg.run.method, std::string("closed"));
    if (method != "ode" && method != "closed" && method != "blocks")
        throw UsageError("--method must be ode, closed or blocks (got " +
                         method + ")");
    if (method == "blocks" && m.dim() != 2)
        throw UsageError("--method blocks requires d = 2");

    const std::vector<MomentIndex> idx = stacked_indices(m.dim(), n);
    Vector values;
    if (o.stationary) {
        values = method == "blocks" ? psi_recursive_stationary(m, n)
                                    : stationary_moments(m, n).values;
    } else {
        const double t = pick(o.t, cfg.run.t, "t");
        if (method == "blocks") {
            values = psi_recursive_transient(m, n, t);
        } else {
            const auto tm = method == "ode" ? TransientMethod::ode
                                            : TransientMethod::closed_form;
            values = transient_moments(assemble_system(m, n), t, tm).values;
        }
    }
    CsvWriter w(out);
    w.header({"index", "value"});
    for (std::size_t k = 0; k < idx.size(); ++k)
        w.row({render_index(idx[k]), num(values[static_cast<Eigen::Index>(k)])});
}

void cmd_compare(const CompareOptions &o, std::ostream &out) {
    const ModelConfig cfg = load_model_config(o.config);
    const HawkesModel m = model_of(cfg);
    const double t = pick(o.t, cfg.run.t, "t");
    const int n = pick_or(o.order, cfg.run.order, 2);
    if (n < 1)
        throw UsageError("--order must be >= 1");
    const auto hs = pick_or(o.h, cfg.run.h, std::vector<double>{1e-2, 1e-3, 1e-4});
    const auto ms = pick_or(o.mc_runs, cfg.run.mc_runs,
                            std::vector<std::size_t>{100, 1000});
    const std::uint64_t seed = pick_or(o.seed, cfg.run.seed, std::uint64_t{1});
    for (std::size_t r : ms)
        check_runs(r);

    CsvWriter w(out);
    w.header({"method", "param", "order", "runtime_s", "mae", "mre"});
    for (int k = 1; k <= n; ++k) {
        auto t0 = Clock::now();
        const MomentSystem sys = assemble_system(m, k);
        const Vector bm = transient_moments(sys, t, TransientMethod::closed_form).values;
        const double bm_time = seconds_since(t0);
        const auto pos = positions_of_order(sys.indices, k);
        const std::string ks = std::to_string(k);
        w.row({"BM-engine", "", ks, num(bm_time), num(0.0), num(0.0)});

        if (m.dim() == 2) {
            t0 = Clock::now();
            const Vector v = psi_recursive_transient(m, k, t);
            const double rt = seconds_since(t0);
            const Errors e = errors(bm, v, pos);
            w.row({"BM-blocks", "", ks, num(rt), num(e.mae), num(e.mre)});
        }
        if (k <= 3) {
            for (double h : hs) {
                FdSpec spec;
                spec.h = h;
                spec.estimate_error = false;
                t0 = Clock::now();
                Vector v = Vector::Zero(bm.size());
                for (std::size_t p : pos)
                    v[static_cast<Eigen::Index>(p)] =
                        fd_moment(m, t, sys.indices[p], spec);
                const double rt = seconds_since(t0);
                const Errors e = errors(bm, v, pos);
                w.row({"FD", "h=" + num(h), ks, num(rt), num(e.mae), num(e.mre)});
            }
        }
        for (std::size_t runs : ms) {
            t0 = Clock::now();
            const McMomentTable mc = estimate_moments(m, t, k, runs, seed);
            const double rt = seconds_since(t0);
            const Errors e = errors(bm, mc.values().values, pos);
            w.row({"MC", "m=" + std::to_string(runs), ks, num(rt), num(e.mae),
                   num(e.mre)});
        }
    }
}

void cmd_cross(const CrossOptions &o, std::ostream &out) {
    const ModelConfig cfg = load_model_config(o.config);
    const HawkesModel m = model_of(cfg);
    const double t = pick(o.t, cfg.run.t, "t");
    const auto taus = pick(o.tau_grid, cfg.run.tau_grid, "tau-grid");
    FdSpec spec;
    spec.h = o.h ? *o.h : cfg.run.h && !cfg.run.h->empty() ? cfg.run.h->front() : 1e-3;
    spec.estimate_error = false;
    const std::size_t runs =
        o.mc_runs ? *o.mc_runs
                  : cfg.run.mc_runs && !cfg.run.mc_runs->empty()
                        ? cfg.run.mc_runs->front()
                        : 0;
    if (runs != 0)
        check_runs(runs);
    const std::uint64_t seed = pick_or(o.seed, cfg.run.seed, std::uint64_t{1});

    const std::size_t d = m.dim();
    const auto dd = static_cast<Eigen::Index>(d);
    std::vector<McCrossMoments> mc;
    if (runs != 0)
        mc = estimate_cross_moments(m, t, taus, runs, seed);
    const Vector mean0 = order_one_means(m, t);

    CsvWriter w(out);
    w.header({"tau", "pair", "method", "value"});
    for (std::size_t k = 0; k < taus.size(); ++k) {
        const double tau = taus[k];
        const Vector mean1 = order_one_means(m, t + tau);
        for (CrossKind kind : {CrossKind::QQ, CrossKind::LL, CrossKind::QL}) {
            const bool x_is_q = kind != CrossKind::LL;
            const bool y_is_q = kind == CrossKind::QQ;
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) {
                    const auto ii = static_cast<Eigen::Index>(i);
                    const auto jj = static_cast<Eigen::Index>(j);
                    const double mx = x_is_q ? mean0[dd + ii] : mean0[ii];
                    const double my = y_is_q ? mean1[dd + jj] : mean1[jj];
                    const std::string pair = std::string(to_string(kind)) + "(" +
                                             std::to_string(i + 1) + "," +
                                             std::to_string(j + 1) + ")";
                    const double r = fd_cross_moment(m, t, tau, i, j, kind, spec);
                    w.row({num(tau), pair, "FD", num(r)});
                    w.row({num(tau), pair, "FD-cov", num(r - mx * my)});
                    if (!mc.empty()) {
                        const McMatrix &mm = kind == CrossKind::QQ   ? mc[k].qq
                                             : kind == CrossKind::LL ? mc[k].ll
                                                                     : mc[k].ql;
                        const McEstimate &e = mm.at(i, j);
                        w.row({num(tau), pair, "MC", num(e.value)});
                        w.row({num(tau), pair, "MC-se", num(e.std_error)});
                        w.row({num(tau), pair, "MC-cov", num(e.value - mx * my)});
                    }
                }
        }
    }
}

void cmd_simulate(const SimulateOptions &o, std::ostream &out) {
    const ModelConfig cfg = load_model_config(o.config);
    const HawkesModel m = model_of(cfg);
    const double horizon =
        o.horizon ? *o.horizon : pick(cfg.run.horizon, cfg.run.t, "horizon");
    const std::size_t runs = pick(o.runs, cfg.run.runs, "runs");
    check_runs(runs);
    const std::uint64_t seed = pick_or(o.seed, cfg.run.seed, std::uint64_t{1});
    const int n = pick_or(o.order, cfg.run.order, 2);
    if (n < 1)
        throw UsageError("--order must be >= 1");

    const McMomentTable mc = estimate_moments(m, horizon, n, runs, seed);
    CsvWriter w(out);
    w.header({"index", "estimate", "std_error", "runs"});
    for (std::size_t k = 0; k < mc.indices.size(); ++k)
        w.row({render_index(mc.indices[k]), num(mc.estimates[k].value),
               num(mc.estimates[k].std_error), std::to_string(runs)});

    if (!o.dump_events.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(o.dump_events);
        const std::size_t count = std::min(runs, o.dump_limit);
        for (std::size_t r = 0; r < count; ++r) {
            const fs::path p =
                fs::path(o.dump_events) / ("run_" + std::to_string(r) + ".csv");
            std::ofstream f(p);
            if (!f)
                throw std::runtime_error("cannot write " + p.string());
            if (horizon > 0.0)
                write_event_log(f, simulate_path(m, horizon, child_seed(seed, r)));
        }
    }
}

void cmd_nearly_unstable(const NearlyUnstableOptions &o, std::ostream &out) {
    const ModelConfig cfg = load_model_config(o.config);
    if (!cfg.symmetric)
        throw ConfigError("nearly-unstable needs a config with a \"symmetric\" "
                          "section; asymmetric models are not supported");
    const SymmetricModel base = *cfg.symmetric;
    const double theta0 = symmetric_theta_sigma(base).theta;
    if (!(theta0 > 0.0))
        throw ConfigError("symmetric model has zero marks; theta cannot be varied");
    const auto thetas = pick_or(o.theta_grid, cfg.run.theta_grid,
                                std::vector<double>{0.5, 0.9, 0.99});
    std::vector<double> sdef;
    for (int i = 0; i <= 20; ++i)
        sdef.push_back(0.25 * i);
    const auto sgrid = pick_or(o.s_grid, cfg.run.s_grid, sdef);

    // same mark shapes, means scaled so that theta hits the grid value
    auto family = [&](double theta) {
        SymmetricModel s = base;
        for (auto &b : s.marks)
            b = b->scaled(theta / theta0);
        return s;
    };
    const auto rows = convergence_sweep(family, thetas, sgrid);
    CsvWriter w(out);
    if (o.summary) {
        w.header({"theta", "sigma", "limit_sigma", "sup_distance", "argmax_s",
                  "matched_sup_distance", "rescaled_variance",
                  "limit_variance"});
        for (const auto &r : rows)
            w.row({num(r.theta), num(r.sigma), num(r.limit_sigma),
                   num(r.sup_distance), num(r.argmax_s),
                   num(r.matched_sup_distance), num(r.rescaled_variance),
                   num(r.limit_variance)});
        return;
    }
    w.header({"theta", "sigma", "s_bar", "transform", "gamma_limit", "distance"});
    const GammaLimit g = GammaLimit::of(family(1.0));
    for (const auto &r : rows) {
        const SymmetricModel s = family(r.theta);
        for (std::size_t k = 0; k < sgrid.size(); ++k) {
            const double v =
                stationary_laplace_symmetric(s, sgrid[k] * (1.0 - r.theta));
            w.row({num(r.theta), num(r.sigma), num(sgrid[k]), num(v),
                   num(g.laplace(sgrid[k])), num(r.distances[k])});
        }
    }
}

void cmd_transform(const TransformOptions &o, std::ostream &out) {
    const ModelConfig cfg = load_model_config(o.config);
    const HawkesModel m = model_of(cfg);
    const double t = pick(o.t, cfg.run.t, "t");
    const auto d = static_cast<Eigen::Index>(m.dim());
    auto arg = [&](const std::vector<double> &v, double dflt, const char *name) {
        if (v.empty())
            return Vector(Vector::Constant(d, dflt));
        if (static_cast<Eigen::Index>(v.size()) != d)
            throw UsageError(std::string("--") + name + " needs " +
                             std::to_string(d) + " values");
        return to_vector(v);
    };
    const Vector s = arg(o.s, 0.0, "s"), z = arg(o.z, 1.0, "z");
    double value;
    if (o.tau) {
        const Vector r = arg(o.r, 0.0, "r"), y = arg(o.y, 1.0, "y");
        value = zeta_two_time(m, t, *o.tau, r, y, s, z);
    } else {
        value = zeta(m, t, TransformArgs{s, z});
    }
    CsvWriter w(out);
    w.header({"quantity", "value"});
    w.row({o.tau ? "zeta_two_time" : "zeta", num(value)});
}

} // namespace hawkespop::cli
