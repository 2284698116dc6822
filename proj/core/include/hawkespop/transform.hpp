#pragma once

#include "hawkespop/model.hpp"
#include "hawkespop/numerics.hpp"

#include <vector>

namespace hawkespop {

class TransformDomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// How far past the nominal domain (s >= 0, z <= 1) evaluation is allowed so
// that central differences can straddle s = 0 and z = 1.
inline constexpr double kAnalyticExtension = 0.05;

struct TransformArgs {
    Vector s; // >= 0
    Vector z; // in [-1, 1]
};

struct ConditionalState {
    double t0 = 0.0;
    std::vector<long> q0;
    Vector lambda0;
};

struct TildeSolution {
    Vector s_end;
    Vector integral;
};

[[nodiscard]] TildeSolution solve_tilde_s(const HawkesModel &m,
                                          double t_start, double t_end,
                                          const Vector &s_init,
                                          const Vector &z,
                                          const OdeConfig &cfg = {});

[[nodiscard]] double zeta(const HawkesModel &m, double t,
                          const TransformArgs &args,
                          const OdeConfig &cfg = {});

[[nodiscard]] double zeta_conditional(const HawkesModel &m,
                                      const ConditionalState &state, double t,
                                      const TransformArgs &args,
                                      const OdeConfig &cfg = {});

// E[prod y^{Q(t)} e^{-r lambda(t)} z^{Q(t+tau)} e^{-s lambda(t+tau)}]
[[nodiscard]] double zeta_two_time(const HawkesModel &m, double t, double tau,
                                   const Vector &r, const Vector &y,
                                   const Vector &s, const Vector &z,
                                   const OdeConfig &cfg = {});

} // namespace hawkespop
