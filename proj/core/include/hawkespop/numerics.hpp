#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace hawkespop {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class NumericsError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Raised when a linear solve is refused; carries the 1-norm condition estimate.
class SingularMatrixError : public NumericsError {
  public:
    SingularMatrixError(const std::string &what, double condition)
        : NumericsError(what), condition_(condition) {}
    [[nodiscard]] double condition() const noexcept { return condition_; }

  private:
    double condition_;
};

class OdeError : public NumericsError {
  public:
    using NumericsError::NumericsError;
};

struct OdeConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    std::size_t max_steps = 1'000'000;
    double initial_step = 0.0; // 0 selects a starting step automatically

    void validate() const;
};

inline constexpr double kConditionLimit = 1e12;

[[nodiscard]] Matrix mat_exp(const Matrix &a, double t = 1.0);

[[nodiscard]] double condition_estimate(const Matrix &a);
[[nodiscard]] Matrix solve_linear(const Matrix &a, const Matrix &b);
[[nodiscard]] Vector solve_linear(const Matrix &a, const Vector &b);

// A X + X B = C by Bartels-Stewart on complex Schur forms.
[[nodiscard]] Matrix solve_sylvester(const Matrix &a, const Matrix &b,
                                     const Matrix &c);

[[nodiscard]] std::vector<std::complex<double>> eigenvalues(const Matrix &a);
[[nodiscard]] double spectral_radius(const Matrix &a);

using VectorField = std::function<void(double, const Vector &, Vector &)>;

// Piecewise quartic continuous extension of a Dormand-Prince run.
class DenseTrajectory {
  public:
    struct Segment {
        double t0 = 0.0;
        double h = 0.0;
        Vector r1, r2, r3, r4, r5;
    };

    DenseTrajectory() = default;
    explicit DenseTrajectory(std::vector<Segment> segments, double t0,
                             Vector x0);

    [[nodiscard]] Vector at(double t) const;
    [[nodiscard]] double t_begin() const noexcept { return t0_; }
    [[nodiscard]] double t_end() const noexcept;
    [[nodiscard]] std::size_t size() const noexcept { return segs_.size(); }
    [[nodiscard]] Eigen::Index dim() const noexcept { return x0_.size(); }

  private:
    std::vector<Segment> segs_;
    double t0_ = 0.0;
    Vector x0_;
};

struct OdeResult {
    Vector state;
    std::size_t steps = 0;
    std::size_t rejected = 0;
    std::shared_ptr<const DenseTrajectory> trajectory; // set when requested
};

[[nodiscard]] OdeResult integrate_ode(const VectorField &f, const Vector &x0,
                                      double t0, double t1,
                                      const OdeConfig &cfg = {},
                                      bool dense = false);

[[nodiscard]] double quad_adaptive(const std::function<double(double)> &g,
                                   double a, double b, double tol = 1e-10);

struct GaussRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

[[nodiscard]] GaussRule gauss_legendre(std::size_t n);

} // namespace hawkespop
