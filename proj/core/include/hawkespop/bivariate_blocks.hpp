#pragma once

#include "hawkespop/model.hpp"
#include "hawkespop/moment_engine.hpp"
#include "hawkespop/numerics.hpp"

#include <array>
#include <string>
#include <vector>

namespace hawkespop {

struct TridiagSpec {
    Vector sub;  // n - 1
    Vector diag; // n
    Vector sup;  // n - 1
};

[[nodiscard]] Matrix tridiag(const TridiagSpec &spec);

// Offsets of the (k, n-k) blocks inside the order-n stack Psi^(n).
struct BlockLayout {
    int order = 0;
    std::vector<std::size_t> offsets; // k = 0..n
    std::vector<std::size_t> sizes;

    [[nodiscard]] std::size_t total() const;
};

[[nodiscard]] BlockLayout block_layout(int n);

// Tridiagonal direct-sum block acting on Psi^(k, n-k).
[[nodiscard]] Matrix build_M(const HawkesModel &m, int k, int n);
// Coupling of Psi^(k, n-k) to Psi^(k-1, n-k+1); zero columns when k = 0.
[[nodiscard]] Matrix build_K(const HawkesModel &m, int k, int n);
// Coupling of Psi^(k, n-k) to the stacked lower orders (Psi^(1),..,Psi^(n-1)).
[[nodiscard]] Matrix build_L(const HawkesModel &m, int k, int n);
// Constant forcing of Psi^(k, n-k); nonzero only for (0, 1).
[[nodiscard]] Vector build_forcing(const HawkesModel &m, int k, int n);

// Nested block generator F_n over orders 1..n, assembled from M, K, L.
[[nodiscard]] Matrix build_nested_F(const HawkesModel &m, int n);
[[nodiscard]] Vector build_nested_b(const HawkesModel &m, int n);

// Order by order solves; results stacked in canonical order over 1..n.
[[nodiscard]] Vector psi_recursive_stationary(const HawkesModel &m, int n);
[[nodiscard]] Vector psi_recursive_transient(const HawkesModel &m, int n,
                                             double t,
                                             const OdeConfig &cfg = {});

struct BivariateOracles {
    double D1 = 0.0;
    double eta1 = 0.0, eta2 = 0.0;
    std::array<double, 3> kappa{};
    bool degenerate = false;
    std::string warning;

    Matrix exp_M01;
    Matrix exp_M02;
    Vector mean_lambda; // at t
    Vector mean_q;      // at t
    Vector stationary_lambda;
    Vector stationary_q;
    Vector stationary_lambda2; // Psi^(0,2)
    Vector stationary_qlambda; // Psi^(1,1)
    Vector stationary_q2;      // Psi^(2,0)
};

// Characteristic polynomial of M^(0,2) evaluated at x.
[[nodiscard]] double kappa_cubic(const HawkesModel &m, double x);

[[nodiscard]] BivariateOracles closed_form_oracles(const HawkesModel &m,
                                                   double t);

} // namespace hawkespop
