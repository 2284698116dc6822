#pragma once

#include "hawkespop/model.hpp"
#include "hawkespop/moment_engine.hpp"

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace hawkespop {

class SimulationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultEventCap = 10'000'000;

struct Event {
    double time = 0.0;
    std::size_t component = 0;
    double lifetime = 0.0; // departs at time + lifetime
    Vector marks;          // jump applied to lambda
};

struct EventLog {
    std::uint64_t seed = 0;
    double horizon = 0.0;
    Vector lambda_bar;
    Vector alpha;
    std::vector<Event> events;

    [[nodiscard]] std::size_t dim() const {
        return static_cast<std::size_t>(lambda_bar.size());
    }
    // right-continuous lambda(t), exact decay from the log
    [[nodiscard]] Vector intensity(double t) const;
    // arrivals in [0, t] still present at t
    [[nodiscard]] std::vector<long> population(double t) const;
    // same quantity from an incremental birth/death counter
    [[nodiscard]] std::vector<long> population_sweep(double t) const;
    [[nodiscard]] std::vector<long> counts(double t) const;
};

[[nodiscard]] EventLog simulate_path(const HawkesModel &m, double horizon,
                                     std::uint64_t seed,
                                     std::size_t event_cap = kDefaultEventCap);

// header t,component,lifetime,mark_1..mark_d
void write_event_log(std::ostream &out, const EventLog &log);

// seed of replication r, independent of scheduling
[[nodiscard]] std::uint64_t child_seed(std::uint64_t master, std::uint64_t r);

// 0 means: HAWKESPOP_THREADS if set, otherwise hardware concurrency
[[nodiscard]] unsigned resolve_threads(unsigned requested);

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t replications = 0;
};

struct McMomentTable {
    double time = 0.0;
    std::vector<MomentIndex> indices;
    std::vector<McEstimate> estimates;

    [[nodiscard]] const McEstimate &at(const MomentIndex &idx) const;
    [[nodiscard]] MomentTable values() const;
};

// Reduced moments prod lambda^a prod Q^[c] of orders 1..n at t.
[[nodiscard]] McMomentTable estimate_moments(const HawkesModel &m, double t,
                                             int n, std::size_t replications,
                                             std::uint64_t master_seed,
                                             unsigned threads = 0);

struct McMatrix {
    std::size_t d = 0;
    std::vector<McEstimate> entries; // row-major

    [[nodiscard]] const McEstimate &at(std::size_t i, std::size_t j) const {
        return entries.at(i * d + j);
    }
};

struct McCrossMoments {
    double tau = 0.0;
    McMatrix qq; // Q_i(t) Q_j(t + tau)
    McMatrix ll; // lambda_i(t) lambda_j(t + tau)
    McMatrix ql; // Q_i(t) lambda_j(t + tau)
};

[[nodiscard]] std::vector<McCrossMoments>
estimate_cross_moments(const HawkesModel &m, double t,
                       const std::vector<double> &taus,
                       std::size_t replications, std::uint64_t master_seed,
                       unsigned threads = 0);

} // namespace hawkespop
