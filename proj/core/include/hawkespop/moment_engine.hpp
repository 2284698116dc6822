#pragma once

#include "hawkespop/model.hpp"
#include "hawkespop/numerics.hpp"

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hawkespop {

struct MomentIndex {
    std::vector<int> n_lambda;
    std::vector<int> n_q;

    [[nodiscard]] int order() const;
    [[nodiscard]] int q_order() const;
    [[nodiscard]] int lambda_order() const;
    [[nodiscard]] std::size_t dim() const { return n_lambda.size(); }
    [[nodiscard]] bool is_zero() const { return order() == 0; }

    auto operator<=>(const MomentIndex &) const = default;
    bool operator==(const MomentIndex &) const = default;

    // pure lambda or pure Q index
    [[nodiscard]] static MomentIndex lambda(std::vector<int> n);
    [[nodiscard]] static MomentIndex q(std::vector<int> n);
};

// "L1^2 Q2^[1]"; zero exponents are omitted
[[nodiscard]] std::string render_index(const MomentIndex &idx);

// number of indices of total order exactly n
[[nodiscard]] std::size_t dimension(std::size_t d, int n);

// indices of total order exactly n, canonical order
[[nodiscard]] std::vector<MomentIndex> enumerate_indices(std::size_t d, int n);

// orders 1..n stacked; the ordering of every MomentSystem
[[nodiscard]] std::vector<MomentIndex> stacked_indices(std::size_t d, int n);

// Positions of indices inside a stacked sequence.
class IndexMap {
  public:
    IndexMap() = default;
    explicit IndexMap(const std::vector<MomentIndex> &indices);
    [[nodiscard]] std::optional<std::size_t> find(const MomentIndex &i) const;
    [[nodiscard]] std::size_t at(const MomentIndex &i) const;

  private:
    std::map<MomentIndex, std::size_t> pos_;
};

// One generator term: d/dt psi(row) gets coefficient * psi(column); a zero
// column index stands for the constant psi(0,0) = 1.
struct GeneratorTerm {
    MomentIndex column;
    double coefficient = 0.0;
};

[[nodiscard]] std::vector<GeneratorTerm>
generator_row(const HawkesModel &m, const MomentIndex &row);

struct MomentSystem {
    int order = 0;
    std::size_t d = 0;
    std::vector<MomentIndex> indices;
    IndexMap index_map;
    Matrix F;
    Vector b;
    Vector x0;
    bool stable = false;
    bool departures_positive = false;
};

[[nodiscard]] MomentSystem assemble_system(const HawkesModel &m, int n);

struct MomentTable {
    double time = 0.0; // +inf for stationary tables
    std::vector<MomentIndex> indices;
    Vector values;
    bool raw = false; // true after factorial_to_raw

    [[nodiscard]] double value(const MomentIndex &idx) const;
    [[nodiscard]] std::optional<double> find(const MomentIndex &idx) const;
    [[nodiscard]] int max_order() const;
};

enum class TransientMethod { ode, closed_form, automatic };

[[nodiscard]] MomentTable transient_moments(const MomentSystem &sys, double t,
                                            TransientMethod method,
                                            const OdeConfig &cfg = {});

// x(t) = e^{Ft}x0 - F^{-1}(I - e^{Ft}) b
[[nodiscard]] Vector closed_form_solution(const Matrix &F, const Vector &b,
                                          const Vector &x0, double t);
// Reusable closed form: factorises once so each evaluation costs the same
// for every t. Uses the eigendecomposition of F when it is well conditioned
// and the Pade exponential otherwise.
class ClosedFormPropagator {
  public:
    ClosedFormPropagator(const Matrix &F, const Vector &b, const Vector &x0);
    [[nodiscard]] Vector operator()(double t) const;
    [[nodiscard]] bool spectral() const noexcept { return spectral_; }

  private:
    Matrix F_;
    Vector x0_;
    Vector shift_; // F^{-1} b
    bool spectral_ = false;
    Eigen::MatrixXcd V_;
    Eigen::VectorXcd lambda_;
    Eigen::VectorXcd coef_; // V^{-1}(x0 + F^{-1} b)
};

// exp(t [[F, b], [0, 0]]) route, valid for singular F
[[nodiscard]] Vector augmented_exp_solution(const Matrix &F, const Vector &b,
                                            const Vector &x0, double t);

[[nodiscard]] MomentTable stationary_moments(const MomentSystem &sys);
[[nodiscard]] MomentTable stationary_moments(const HawkesModel &m, int n);

// Orders 1..2 via the matrix Sylvester systems, general d.
[[nodiscard]] MomentTable stationary_sylvester(const HawkesModel &m);

[[nodiscard]] MomentTable factorial_to_raw(const MomentTable &table);

// Stirling number of the second kind S(n, k)
[[nodiscard]] double stirling2(int n, int k);

// E[N(t)] for the counting process
[[nodiscard]] Vector hawkes_count_moments(const HawkesModel &m, double t);

} // namespace hawkespop
