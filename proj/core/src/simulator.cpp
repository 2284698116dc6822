#include "hawkespop/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <thread>

namespace hawkespop {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Runs body(r) for r in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)> &body) {
    const unsigned w = static_cast<unsigned>(
        std::max<std::size_t>(1, std::min<std::size_t>(threads, n)));
    if (w == 1) {
        for (std::size_t r = 0; r < n; ++r)
            body(r);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(w);
    for (unsigned k = 0; k < w; ++k) {
        pool.emplace_back([&, k] {
            try {
                for (std::size_t r = k; r < n; r += w)
                    body(r);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        });
    }
    for (auto &th : pool)
        th.join();
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
}

McEstimate summarize(const std::vector<double> &x, std::size_t stride,
                     std::size_t offset, std::size_t m) {
    double sum = 0.0;
    for (std::size_t r = 0; r < m; ++r)
        sum += x[r * stride + offset];
    const double mean = sum / static_cast<double>(m);
    double ss = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
        const double dlt = x[r * stride + offset] - mean;
        ss += dlt * dlt;
    }
    const double var = ss / static_cast<double>(m - 1);
    return McEstimate{mean, std::sqrt(var / static_cast<double>(m)), m};
}

double falling(long q, int c) {
    double v = 1.0;
    for (int k = 0; k < c; ++k)
        v *= static_cast<double>(q - k);
    return v;
}

void check_replications(std::size_t reps) {
    if (reps < 2)
        throw std::invalid_argument("Monte Carlo needs at least 2 replications");
}

EventLog path_or_empty(const HawkesModel &m, double horizon,
                       std::uint64_t seed) {
    if (horizon > 0.0)
        return simulate_path(m, horizon, seed);
    EventLog log;
    log.seed = seed;
    log.lambda_bar = m.lambda_bar();
    log.alpha = m.alpha();
    return log;
}

} // namespace

Vector EventLog::intensity(double t) const {
    Vector lam = lambda_bar;
    for (const auto &e : events) {
        if (e.time > t)
            break;
        for (Eigen::Index i = 0; i < lam.size(); ++i)
            lam[i] += e.marks[i] * std::exp(-alpha[i] * (t - e.time));
    }
    return lam;
}

std::vector<long> EventLog::population(double t) const {
    std::vector<long> q(dim(), 0);
    for (const auto &e : events)
        if (e.time <= t && e.time + e.lifetime > t)
            ++q[e.component];
    return q;
}

std::vector<long> EventLog::population_sweep(double t) const {
    // births and deaths merged in time order; deaths first on ties
    struct Change {
        double time;
        int delta;
        std::size_t comp;
    };
    std::vector<Change> ch;
    for (const auto &e : events) {
        ch.push_back({e.time, +1, e.component});
        ch.push_back({e.time + e.lifetime, -1, e.component});
    }
    std::stable_sort(ch.begin(), ch.end(), [](const Change &a, const Change &b) {
        return a.time < b.time || (a.time == b.time && a.delta < b.delta);
    });
    std::vector<long> q(dim(), 0);
    for (const auto &c : ch) {
        if (c.time > t)
            break;
        q[c.comp] += c.delta;
    }
    return q;
}

std::vector<long> EventLog::counts(double t) const {
    std::vector<long> n(dim(), 0);
    for (const auto &e : events) {
        if (e.time > t)
            break;
        ++n[e.component];
    }
    return n;
}

EventLog simulate_path(const HawkesModel &m, double horizon, std::uint64_t seed,
                       std::size_t event_cap) {
    if (!std::isfinite(horizon) || horizon <= 0.0)
        throw std::invalid_argument("simulate_path: horizon must be > 0");
    const auto d = static_cast<Eigen::Index>(m.dim());
    const Vector &lb = m.lambda_bar();
    const Vector &al = m.alpha();
    const Vector &mu = m.mu();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);

    EventLog log;
    log.seed = seed;
    log.horizon = horizon;
    log.lambda_bar = lb;
    log.alpha = al;

    Vector lam = lb;
    double t = 0.0;
    while (true) {
        const double bound = lam.sum();
        if (!(bound > 0.0))
            break;
        const double w = expo(rng) / bound;
        t += w;
        if (t > horizon)
            break;
        for (Eigen::Index i = 0; i < d; ++i)
            lam[i] = lb[i] + (lam[i] - lb[i]) * std::exp(-al[i] * w);
        const double u = unif(rng) * bound;
        double acc = 0.0;
        Eigen::Index comp = -1;
        for (Eigen::Index i = 0; i < d; ++i) {
            acc += lam[i];
            if (u < acc) {
                comp = i;
                break;
            }
        }
        if (comp < 0)
            continue; // rejected; bound refreshed from the decayed state
        Event e;
        e.time = t;
        e.component = static_cast<std::size_t>(comp);
        e.marks = m.sample_column(e.component, rng);
        e.lifetime = mu[comp] > 0.0 ? expo(rng) / mu[comp]
                                    : std::numeric_limits<double>::infinity();
        lam += e.marks;
        log.events.push_back(std::move(e));
        if (log.events.size() > event_cap)
            throw SimulationError(
                "simulate_path: more than " + std::to_string(event_cap) +
                " events before t = " + std::to_string(t) +
                "; the model is likely unstable or nearly so");
    }
    return log;
}

void write_event_log(std::ostream &out, const EventLog &log) {
    out << "t,component,lifetime";
    for (std::size_t i = 0; i < log.dim(); ++i)
        out << ",mark_" << i + 1;
    out << '\n';
    out.precision(17);
    for (const auto &e : log.events) {
        out << e.time << ',' << e.component + 1 << ',' << e.lifetime;
        for (Eigen::Index i = 0; i < e.marks.size(); ++i)
            out << ',' << e.marks[i];
        out << '\n';
    }
}

std::uint64_t child_seed(std::uint64_t master, std::uint64_t r) {
    return splitmix64(splitmix64(master) ^ (r * 0xD1B54A32D192ED03ULL + 1));
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0)
        return requested;
    if (const char *env = std::getenv("HAWKESPOP_THREADS")) {
        char *end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

const McEstimate &McMomentTable::at(const MomentIndex &idx) const {
    for (std::size_t k = 0; k < indices.size(); ++k)
        if (indices[k] == idx)
            return estimates[k];
    throw std::out_of_range("McMomentTable: index " + render_index(idx) +
                            " not present");
}

MomentTable McMomentTable::values() const {
    MomentTable t;
    t.time = time;
    t.indices = indices;
    t.values.resize(static_cast<Eigen::Index>(estimates.size()));
    for (std::size_t k = 0; k < estimates.size(); ++k)
        t.values[static_cast<Eigen::Index>(k)] = estimates[k].value;
    return t;
}

McMomentTable estimate_moments(const HawkesModel &m, double t, int n,
                               std::size_t replications,
                               std::uint64_t master_seed, unsigned threads) {
    check_replications(replications);
    if (!std::isfinite(t) || t < 0.0)
        throw std::invalid_argument("estimate_moments: t must be >= 0");
    McMomentTable out;
    out.time = t;
    out.indices = stacked_indices(m.dim(), n);
    const std::size_t K = out.indices.size();
    const std::size_t d = m.dim();
    std::vector<double> samples(replications * K);
    parallel_for(replications, resolve_threads(threads), [&](std::size_t r) {
        const EventLog log = path_or_empty(m, t, child_seed(master_seed, r));
        const Vector lam = log.intensity(t);
        const std::vector<long> q = log.population(t);
        for (std::size_t k = 0; k < K; ++k) {
            const MomentIndex &idx = out.indices[k];
            double v = 1.0;
            for (std::size_t i = 0; i < d; ++i) {
                v *= std::pow(lam[static_cast<Eigen::Index>(i)], idx.n_lambda[i]);
                v *= falling(q[i], idx.n_q[i]);
            }
            samples[r * K + k] = v;
        }
    });
    out.estimates.reserve(K);
    for (std::size_t k = 0; k < K; ++k)
        out.estimates.push_back(summarize(samples, K, k, replications));
    return out;
}

std::vector<McCrossMoments>
estimate_cross_moments(const HawkesModel &m, double t,
                       const std::vector<double> &taus,
                       std::size_t replications, std::uint64_t master_seed,
                       unsigned threads) {
    check_replications(replications);
    if (!std::isfinite(t) || t < 0.0)
        throw std::invalid_argument("estimate_cross_moments: t must be >= 0");
    double tmax = 0.0;
    for (double tau : taus) {
        if (!std::isfinite(tau) || tau < 0.0)
            throw std::invalid_argument("estimate_cross_moments: tau must be >= 0");
        tmax = std::max(tmax, tau);
    }
    const std::size_t d = m.dim();
    const std::size_t per_tau = 3 * d * d;
    const std::size_t stride = per_tau * taus.size();
    std::vector<double> samples(replications * stride);
    parallel_for(replications, resolve_threads(threads), [&](std::size_t r) {
        const EventLog log =
            path_or_empty(m, t + tmax, child_seed(master_seed, r));
        const Vector lam0 = log.intensity(t);
        const std::vector<long> q0 = log.population(t);
        for (std::size_t k = 0; k < taus.size(); ++k) {
            const Vector lam1 = log.intensity(t + taus[k]);
            const std::vector<long> q1 = log.population(t + taus[k]);
            double *row = &samples[r * stride + k * per_tau];
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) {
                    const auto ii = static_cast<Eigen::Index>(i);
                    const auto jj = static_cast<Eigen::Index>(j);
                    row[i * d + j] = static_cast<double>(q0[i] * q1[j]);
                    row[d * d + i * d + j] = lam0[ii] * lam1[jj];
                    row[2 * d * d + i * d + j] =
                        static_cast<double>(q0[i]) * lam1[jj];
                }
        }
    });
    std::vector<McCrossMoments> out;
    for (std::size_t k = 0; k < taus.size(); ++k) {
        McCrossMoments c;
        c.tau = taus[k];
        for (McMatrix *mat : {&c.qq, &c.ll, &c.ql})
            mat->d = d;
        for (std::size_t e = 0; e < d * d; ++e) {
            const std::size_t base = k * per_tau;
            c.qq.entries.push_back(summarize(samples, stride, base + e, replications));
            c.ll.entries.push_back(
                summarize(samples, stride, base + d * d + e, replications));
            c.ql.entries.push_back(
                summarize(samples, stride, base + 2 * d * d + e, replications));
        }
        out.push_back(std::move(c));
    }
    return out;
}

} // namespace hawkespop
