#pragma once

#include "hawkespop/model.hpp"
#include "hawkespop/moment_engine.hpp"
#include "hawkespop/numerics.hpp"

namespace hawkespop {

// Solver precision of the FD baseline: the usual general-purpose default
// (rel = abs = 1.49e-8). Its noise is what makes very small h lose accuracy.
[[nodiscard]] OdeConfig fd_ode_config();

struct FdSpec {
    double h = 1e-3;
    int max_order = 3;
    // also evaluate at 2h to estimate the truncation error
    bool estimate_error = true;

    void validate() const;
};

struct FdEstimate {
    double value = 0.0;
    double truncation_estimate = 0.0; // |D(h) - D(2h)| / 3, 0 if not computed
    double roundoff_estimate = 0.0;   // solver tolerance propagated through the stencil
    std::size_t evaluations = 0;
    bool roundoff_dominated = false;
};

// Reduced moment psi(idx) at time t from central differences of zeta.
[[nodiscard]] FdEstimate fd_moment_estimate(const HawkesModel &m, double t,
                                            const MomentIndex &idx,
                                            const FdSpec &spec = {},
                                            const OdeConfig &cfg = fd_ode_config());
[[nodiscard]] double fd_moment(const HawkesModel &m, double t,
                               const MomentIndex &idx, const FdSpec &spec = {},
                               const OdeConfig &cfg = fd_ode_config());

// Every index of orders 1..n, canonical order.
[[nodiscard]] MomentTable fd_moment_table(const HawkesModel &m, double t, int n,
                                          const FdSpec &spec = {},
                                          const OdeConfig &cfg = fd_ode_config());

enum class CrossKind { QQ, LL, QL };

[[nodiscard]] const char *to_string(CrossKind k);

// E[X_i(t) Y_j(t + tau)] with (X, Y) = (Q, Q), (lambda, lambda), (Q, lambda).
[[nodiscard]] FdEstimate fd_cross_moment_estimate(
    const HawkesModel &m, double t, double tau, std::size_t i, std::size_t j,
    CrossKind which, const FdSpec &spec = {},
    const OdeConfig &cfg = fd_ode_config());
[[nodiscard]] double fd_cross_moment(const HawkesModel &m, double t, double tau,
                                     std::size_t i, std::size_t j,
                                     CrossKind which, const FdSpec &spec = {},
                                     const OdeConfig &cfg = fd_ode_config());

[[nodiscard]] Matrix cross_moment_matrix(const HawkesModel &m, double t,
                                         double tau, CrossKind which,
                                         const FdSpec &spec = {},
                                         const OdeConfig &cfg = fd_ode_config());

// R(t, tau) - E[X(t)] E[Y(t + tau)]^T, means from the exact engine.
[[nodiscard]] Matrix autocovariance(const HawkesModel &m, double t, double tau,
                                    CrossKind which, const FdSpec &spec = {},
                                    const OdeConfig &cfg = fd_ode_config());

} // namespace hawkespop
