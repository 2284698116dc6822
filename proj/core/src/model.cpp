#include "hawkespop/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hawkespop {

namespace {

double factorial(int k) {
    double r = 1.0;
    for (int i = 2; i <= k; ++i)
        r *= i;
    return r;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

class ExponentialMark final : public MarkLaw {
  public:
    explicit ExponentialMark(double mean) : mean_(mean) {}
    std::string kind() const override { return "exponential"; }
    double moment(int k) const override {
        if (k < 0)
            throw std::invalid_argument("moment: negative order");
        return factorial(k) * std::pow(mean_, k);
    }
    double laplace(double u) const override {
        const double den = 1.0 + mean_ * u;
        if (!(den > 0.0))
            throw std::domain_error("exponential mark: Laplace transform "
                                    "diverges at u=" + fmt(u));
        return 1.0 / den;
    }
    double sample(std::mt19937_64 &rng) const override {
        std::exponential_distribution<double> e(1.0 / mean_);
        return e(rng);
    }
    MarkPtr scaled(double c) const override {
        if (c == 0.0)
            return zero_mark();
        return exponential_mark(mean_ * c);
    }
    std::string describe() const override { return "mean=" + fmt(mean_); }

  private:
    double mean_;
};

class DeterministicMark final : public MarkLaw {
  public:
    explicit DeterministicMark(double v) : v_(v) {}
    std::string kind() const override { return "deterministic"; }
    double moment(int k) const override {
        if (k < 0)
            throw std::invalid_argument("moment: negative order");
        return std::pow(v_, k);
    }
    double laplace(double u) const override { return std::exp(-u * v_); }
    double sample(std::mt19937_64 &) const override { return v_; }
    MarkPtr scaled(double c) const override {
        return deterministic_mark(v_ * c);
    }
    std::string describe() const override { return "value=" + fmt(v_); }

  private:
    double v_;
};

class ZeroMark final : public MarkLaw {
  public:
    std::string kind() const override { return "zero"; }
    double moment(int k) const override {
        if (k < 0)
            throw std::invalid_argument("moment: negative order");
        return k == 0 ? 1.0 : 0.0;
    }
    double laplace(double) const override { return 1.0; }
    double sample(std::mt19937_64 &) const override { return 0.0; }
    MarkPtr scaled(double) const override { return zero_mark(); }
    int max_moment_order() const override { return 1 << 20; }
    std::string describe() const override { return ""; }
};

bool same_law(const MarkLaw &a, const MarkLaw &b) {
    return a.kind() == b.kind() && a.describe() == b.describe();
}

void check_vector(const Vector &v, std::size_t d, const char *name) {
    if (static_cast<std::size_t>(v.size()) != d)
        throw ModelError(std::string(name) + ": expected " +
                         std::to_string(d) + " entries, got " +
                         std::to_string(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!std::isfinite(v[i]) || v[i] < 0.0)
            throw ModelError(std::string(name) + "[" + std::to_string(i) +
                             "] must be finite and >= 0, got " + fmt(v[i]));
}

} // namespace

MarkPtr exponential_mark(double mean) {
    if (!std::isfinite(mean) || !(mean > 0.0))
        throw ModelError("exponential mark: mean must be positive and finite");
    return std::make_shared<ExponentialMark>(mean);
}

MarkPtr deterministic_mark(double value) {
    if (!std::isfinite(value) || value < 0.0)
        throw ModelError("deterministic mark: value must be >= 0 and finite");
    return std::make_shared<DeterministicMark>(value);
}

MarkPtr zero_mark() {
    static const MarkPtr z = std::make_shared<ZeroMark>();
    return z;
}

HawkesModel::HawkesModel(Vector lambda_bar, Vector alpha, Vector mu,
                         std::vector<std::vector<MarkPtr>> marks,
                         ColumnCoupling coupling, bool allow_unstable)
    : d_(static_cast<std::size_t>(lambda_bar.size())),
      lb_(std::move(lambda_bar)), alpha_(std::move(alpha)),
      mu_(std::move(mu)), marks_(std::move(marks)), coupling_(coupling),
      allow_unstable_(allow_unstable) {
    if (d_ < 1)
        throw ModelError("model: dimension must be >= 1");
    check_vector(lb_, d_, "lambda_bar");
    check_vector(alpha_, d_, "alpha");
    check_vector(mu_, d_, "mu");
    if (marks_.size() != d_)
        throw ModelError("marks: expected " + std::to_string(d_) + " rows");
    for (std::size_t i = 0; i < d_; ++i) {
        if (marks_[i].size() != d_)
            throw ModelError("marks[" + std::to_string(i) + "]: expected " +
                             std::to_string(d_) + " entries");
        for (std::size_t j = 0; j < d_; ++j)
            if (!marks_[i][j])
                throw ModelError("marks[" + std::to_string(i) + "][" +
                                 std::to_string(j) + "] is null");
    }
    if (coupling_ == ColumnCoupling::common) {
        for (std::size_t j = 0; j < d_; ++j)
            for (std::size_t i = 1; i < d_; ++i)
                if (!same_law(*marks_[i][j], *marks_[0][j]))
                    throw ModelError("common column coupling requires one law "
                                     "per column (column " +
                                     std::to_string(j) + ")");
    }
    if (!allow_unstable_) {
        const StabilityReport rep = check_stability(*this);
        if (!rep.stable)
            throw UnstableModelError("model violates the stability condition "
                                     "(spectral radius of branching matrix " +
                                         fmt(rep.rho) + " >= 1)",
                                     rep.rho);
    }
}

const MarkLaw &HawkesModel::mark(std::size_t i, std::size_t j) const {
    return *mark_ptr(i, j);
}

const MarkPtr &HawkesModel::mark_ptr(std::size_t i, std::size_t j) const {
    if (i >= d_ || j >= d_)
        throw std::out_of_range("mark index out of range");
    return marks_[i][j];
}

Matrix HawkesModel::mean_marks() const {
    Matrix eb(d_, d_);
    for (std::size_t i = 0; i < d_; ++i)
        for (std::size_t j = 0; j < d_; ++j)
            eb(i, j) = marks_[i][j]->mean();
    return eb;
}

double HawkesModel::joint_mark_moment(std::size_t j,
                                      std::span<const int> k) const {
    if (j >= d_ || k.size() != d_)
        throw std::invalid_argument("joint_mark_moment: bad arguments");
    if (coupling_ == ColumnCoupling::common) {
        int total = 0;
        for (int ki : k)
            total += ki;
        return marks_[0][j]->moment(total);
    }
    double r = 1.0;
    for (std::size_t i = 0; i < d_; ++i) {
        if (k[i] == 0)
            continue;
        r *= marks_[i][j]->moment(k[i]);
        if (r == 0.0)
            return 0.0;
    }
    return r;
}

double HawkesModel::column_laplace(std::size_t j, const Vector &s) const {
    if (j >= d_ || static_cast<std::size_t>(s.size()) != d_)
        throw std::invalid_argument("column_laplace: bad arguments");
    if (coupling_ == ColumnCoupling::common)
        return marks_[0][j]->laplace(s.sum());
    double r = 1.0;
    for (std::size_t i = 0; i < d_; ++i)
        r *= marks_[i][j]->laplace(s[i]);
    return r;
}

Vector HawkesModel::sample_column(std::size_t j, std::mt19937_64 &rng) const {
    Vector b(d_);
    if (coupling_ == ColumnCoupling::common) {
        b.setConstant(marks_[0][j]->sample(rng));
        return b;
    }
    for (std::size_t i = 0; i < d_; ++i)
        b[i] = marks_[i][j]->sample(rng);
    return b;
}

int HawkesModel::max_mark_moment_order() const {
    int r = 1 << 20;
    for (const auto &row : marks_)
        for (const auto &mk : row)
            r = std::min(r, mk->max_moment_order());
    return r;
}

HawkesModel HawkesModel::with_mu(Vector mu) const {
    return HawkesModel(lb_, alpha_, std::move(mu), marks_, coupling_,
                       allow_unstable_);
}

HawkesModel
HawkesModel::with_marks(std::vector<std::vector<MarkPtr>> marks) const {
    return HawkesModel(lb_, alpha_, mu_, std::move(marks), coupling_,
                       allow_unstable_);
}

Matrix branching_matrix(const HawkesModel &m) {
    const std::size_t d = m.dim();
    Matrix h(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const double eb = m.mark(i, j).mean();
            if (eb == 0.0) {
                h(i, j) = 0.0;
            } else if (m.alpha()[i] == 0.0) {
                throw UnstableModelError(
                    "branching_matrix: alpha[" + std::to_string(i) +
                        "] = 0 with positive mark mean: intensity never "
                        "decays",
                    std::numeric_limits<double>::infinity());
            } else {
                h(i, j) = eb / m.alpha()[i];
            }
        }
    return h;
}

StabilityReport check_stability(const HawkesModel &m) {
    StabilityReport r;
    try {
        r.rho = spectral_radius(branching_matrix(m));
    } catch (const UnstableModelError &e) {
        r.rho = e.rho();
    }
    r.stable = r.rho < 1.0;
    return r;
}

void SymmetricModel::validate() const {
    if (d < 1)
        throw ModelError("symmetric model: d must be >= 1");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw ModelError("symmetric model: alpha must be positive");
    if (!(lambda_bar >= 0.0) || !std::isfinite(lambda_bar))
        throw ModelError("symmetric model: lambda_bar must be >= 0");
    if (marks.size() != d)
        throw ModelError("symmetric model: expected " + std::to_string(d) +
                         " mark laws");
    for (const auto &mk : marks)
        if (!mk)
            throw ModelError("symmetric model: null mark law");
}

HawkesModel SymmetricModel::to_model(double mu, bool allow_unstable) const {
    validate();
    std::vector<std::vector<MarkPtr>> grid(d, std::vector<MarkPtr>(d));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            grid[i][j] = marks[j];
    const auto n = static_cast<Eigen::Index>(d);
    return HawkesModel(Vector::Constant(n, lambda_bar),
                       Vector::Constant(n, alpha), Vector::Constant(n, mu),
                       std::move(grid), ColumnCoupling::common,
                       allow_unstable);
}

ThetaSigma symmetric_theta_sigma(const SymmetricModel &m) {
    m.validate();
    double s1 = 0.0, s2 = 0.0;
    for (const auto &mk : m.marks) {
        s1 += mk->moment(1);
        s2 += mk->moment(2);
    }
    if (!(s2 > 0.0))
        throw ModelError("symmetric model: sum of E[B_i^2] is zero, sigma is "
                         "undefined");
    return {s1 / m.alpha, 2.0 * m.alpha / s2};
}

} // namespace hawkespop
