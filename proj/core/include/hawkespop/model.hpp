#pragma once

#include "hawkespop/numerics.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace hawkespop {

class ModelError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class UnstableModelError : public ModelError {
  public:
    UnstableModelError(const std::string &what, double rho)
        : ModelError(what), rho_(rho) {}
    [[nodiscard]] double rho() const noexcept { return rho_; }

  private:
    double rho_;
};

inline constexpr int kDefaultMaxMarkMoment = 8;

// Law of a nonnegative jump size.
class MarkLaw {
  public:
    virtual ~MarkLaw() = default;

    [[nodiscard]] virtual std::string kind() const = 0;
    // E[B^k]; k = 0 gives 1.
    [[nodiscard]] virtual double moment(int k) const = 0;
    // E[exp(-u B)]; throws std::domain_error where it diverges.
    [[nodiscard]] virtual double laplace(double u) const = 0;
    [[nodiscard]] virtual double sample(std::mt19937_64 &rng) const = 0;
    // c * B with the same shape
    [[nodiscard]] virtual std::shared_ptr<const MarkLaw>
    scaled(double c) const = 0;
    [[nodiscard]] virtual int max_moment_order() const {
        return kDefaultMaxMarkMoment;
    }
    // Printable parameterisation, e.g. "mean=0.5".
    [[nodiscard]] virtual std::string describe() const = 0;

    [[nodiscard]] double mean() const { return moment(1); }
    [[nodiscard]] bool is_zero() const { return kind() == "zero"; }
};

using MarkPtr = std::shared_ptr<const MarkLaw>;

[[nodiscard]] MarkPtr exponential_mark(double mean);
[[nodiscard]] MarkPtr deterministic_mark(double value);
[[nodiscard]] MarkPtr zero_mark();

// Whether one event's jump vector (column j) has independent entries or a
// single draw shared by every row.
enum class ColumnCoupling { independent, common };

struct StabilityReport {
    bool stable = false;
    double rho = 0.0;
};

class HawkesModel {
  public:
    // marks[i][j] is the jump of lambda_i caused by an event of component j.
    HawkesModel(Vector lambda_bar, Vector alpha, Vector mu,
                std::vector<std::vector<MarkPtr>> marks,
                ColumnCoupling coupling = ColumnCoupling::independent,
                bool allow_unstable = false);

    [[nodiscard]] std::size_t dim() const noexcept { return d_; }
    [[nodiscard]] const Vector &lambda_bar() const noexcept { return lb_; }
    [[nodiscard]] const Vector &alpha() const noexcept { return alpha_; }
    [[nodiscard]] const Vector &mu() const noexcept { return mu_; }
    [[nodiscard]] const MarkLaw &mark(std::size_t i, std::size_t j) const;
    [[nodiscard]] const MarkPtr &mark_ptr(std::size_t i, std::size_t j) const;
    [[nodiscard]] ColumnCoupling coupling() const noexcept { return coupling_; }
    [[nodiscard]] bool allow_unstable() const noexcept { return allow_unstable_; }

    [[nodiscard]] Matrix mean_marks() const;
    // E[prod_i B_ij^{k_i}] for column j
    [[nodiscard]] double joint_mark_moment(std::size_t j,
                                           std::span<const int> k) const;
    // beta_j(s) = E[exp(-s^T B_j)]
    [[nodiscard]] double column_laplace(std::size_t j, const Vector &s) const;
    // Jumps applied to lambda by one event of component j.
    [[nodiscard]] Vector sample_column(std::size_t j,
                                       std::mt19937_64 &rng) const;
    // Highest total mark moment order every entry can supply.
    [[nodiscard]] int max_mark_moment_order() const;

    [[nodiscard]] HawkesModel with_mu(Vector mu) const;
    [[nodiscard]] HawkesModel with_marks(
        std::vector<std::vector<MarkPtr>> marks) const;

  private:
    std::size_t d_;
    Vector lb_, alpha_, mu_;
    std::vector<std::vector<MarkPtr>> marks_;
    ColumnCoupling coupling_;
    bool allow_unstable_;
};

[[nodiscard]] Matrix branching_matrix(const HawkesModel &m);
[[nodiscard]] StabilityReport check_stability(const HawkesModel &m);

struct SymmetricModel {
    std::size_t d = 1;
    double alpha = 1.0;
    double lambda_bar = 1.0;
    std::vector<MarkPtr> marks; // B_1..B_d, one per column

    void validate() const;
    // Full model with every row of column j receiving the same draw B_j.
    [[nodiscard]] HawkesModel to_model(double mu = 1.0,
                                       bool allow_unstable = false) const;
};

struct ThetaSigma {
    double theta;
    double sigma;
};

[[nodiscard]] ThetaSigma symmetric_theta_sigma(const SymmetricModel &m);

} // namespace hawkespop
