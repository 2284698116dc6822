#pragma once

#include "hawkespop/model.hpp"

#include <functional>
#include <vector>

namespace hawkespop {

// Gamma law with rate convention: transform (rate / (rate + s))^shape.
struct GammaLimit {
    double shape = 0.0; // sigma * lambda_bar
    double rate = 0.0;  // sigma

    [[nodiscard]] double mean() const { return shape / rate; }
    [[nodiscard]] double variance() const { return shape / (rate * rate); }
    [[nodiscard]] double laplace(double s_bar) const;

    [[nodiscard]] static GammaLimit of(const SymmetricModel &m);
};

// Stationary E[exp(-s^T lambda)] of the symmetric model.
[[nodiscard]] double stationary_laplace_symmetric(const SymmetricModel &m,
                                                  const Vector &s,
                                                  double tol = 1e-11);
// same, as a function of s_bar = sum s_i
[[nodiscard]] double stationary_laplace_symmetric(const SymmetricModel &m,
                                                  double s_bar,
                                                  double tol = 1e-11);

[[nodiscard]] double gamma_limit_transform(const SymmetricModel &m,
                                           const Vector &s);

// alpha = 1 and lambda_bar = 1 unless given; B_i ~ Exp(mean theta alpha / d).
// theta = 1 gives the critical member, which carries the limit law.
[[nodiscard]] SymmetricModel exponential_symmetric_family(std::size_t d,
                                                          double theta,
                                                          double alpha = 1.0,
                                                          double lambda_bar = 1.0);

struct SweepRow {
    double theta = 0.0;
    double sigma = 0.0;       // of the member at theta
    double limit_sigma = 0.0; // of the critical member family(1)
    // |T(s (1 - theta)) - limit law(s)| per s_bar grid point
    std::vector<double> distances;
    double sup_distance = 0.0;
    double argmax_s = 0.0;
    // same against the Gamma law built from the member's own sigma
    double matched_sup_distance = 0.0;
    // (1 - theta)^2 Var(lambda_1) from the exact stationary engine
    double rescaled_variance = 0.0;
    double limit_variance = 0.0; // lambda_bar / limit_sigma
};

// Distances to the theta -> 1 Gamma limit over the s_bar grid, per theta.
// family(1.0) must return the critical member; only its sigma is used.
[[nodiscard]] std::vector<SweepRow>
convergence_sweep(const std::function<SymmetricModel(double)> &family,
                  const std::vector<double> &theta_grid,
                  const std::vector<double> &s_grid);

} // namespace hawkespop
