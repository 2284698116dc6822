#pragma once

#include "hawkespop/model.hpp"

#include <initializer_list>
#include <random>
#include <vector>

namespace fixtures {

using hawkespop::HawkesModel;
using hawkespop::MarkPtr;
using hawkespop::Matrix;
using hawkespop::Vector;

inline Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v)
        out[i++] = x;
    return out;
}

inline Matrix mat(Eigen::Index rows, Eigen::Index cols,
                  std::initializer_list<double> v) {
    Matrix out(rows, cols);
    auto it = v.begin();
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            out(r, c) = *it++;
    return out;
}

inline std::vector<std::vector<MarkPtr>> exp_marks(const Matrix &means) {
    std::vector<std::vector<MarkPtr>> g(
        static_cast<std::size_t>(means.rows()),
        std::vector<MarkPtr>(static_cast<std::size_t>(means.cols())));
    for (Eigen::Index i = 0; i < means.rows(); ++i)
        for (Eigen::Index j = 0; j < means.cols(); ++j)
            g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                means(i, j) > 0.0 ? hawkespop::exponential_mark(means(i, j))
                                  : hawkespop::zero_mark();
    return g;
}

// bivariate example with exponential marks
inline HawkesModel bivariate() {
    return HawkesModel(vec({0.5, 0.5}), vec({3, 2}), vec({1, 2}),
                       exp_marks(mat(2, 2, {1.5, 0.5, 0.75, 1.25})));
}

// trivariate example with exponential marks
inline HawkesModel trivariate() {
    return HawkesModel(vec({0.3, 1, 0.5}), vec({2, 1.5, 2.5}), vec({1.5, 0.5, 1}),
                       exp_marks(mat(3, 3, {0.5, 0.3, 0.4, 0.7, 0.5, 0.5, 0.4,
                                            0.2, 0.5})));
}

// all marks zero: independent Poisson arrivals into M/M/inf queues
inline HawkesModel poisson() {
    return HawkesModel(vec({0.5, 0.5}), vec({3, 2}), vec({1, 2}),
                       exp_marks(Matrix::Zero(2, 2)));
}

// random stable bivariate model with exponential marks
inline HawkesModel random_bivariate(std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(0.1, 2.0);
    while (true) {
        Vector alpha = vec({u(rng) + 0.5, u(rng) + 0.5});
        Matrix means = mat(2, 2, {u(rng), u(rng), u(rng), u(rng)});
        Matrix H(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                H(i, j) = means(i, j) / alpha[i];
        if (hawkespop::spectral_radius(H) < 0.9)
            return HawkesModel(vec({u(rng), u(rng)}), alpha,
                               vec({u(rng), u(rng)}), exp_marks(means));
    }
}

} // namespace fixtures
