#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>

#include "locsvm/errors.hpp"

namespace locsvm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// Point sets, one point per row.
using Points = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using PointRef = Eigen::Ref<const Eigen::VectorXd>;

/// Labelled sample; row i of x is the i-th input point.
struct Dataset {
    Points x;
    Vector y;

    [[nodiscard]] std::ptrdiff_t size() const { return x.rows(); }
    [[nodiscard]] std::ptrdiff_t dim() const { return x.cols(); }
};

inline void check_dataset(const Dataset& d) {
    if (d.x.rows() != d.y.size()) {
        throw InputError("dataset: " + std::to_string(d.x.rows()) + " points but " +
                         std::to_string(d.y.size()) + " labels");
    }
}

/// Discrete probability measure on X x Y.
struct WeightedSample {
    Points x;
    Vector y;
    Vector w;

    [[nodiscard]] std::ptrdiff_t size() const { return x.rows(); }
    [[nodiscard]] std::ptrdiff_t dim() const { return x.cols(); }

    /// Uniform empirical measure n^-1 sum delta_(x_i, y_i).
    static WeightedSample uniform(Points x, Vector y) {
        const auto n = x.rows();
        WeightedSample s{std::move(x), std::move(y), Vector::Constant(n, 1.0 / static_cast<double>(n))};
        return s;
    }
};

inline void validate(const WeightedSample& s) {
    if (s.x.rows() == 0) throw InputError("weighted sample is empty");
    if (s.x.rows() != s.y.size() || s.x.rows() != s.w.size()) {
        throw InputError("weighted sample: inconsistent sizes");
    }
    if ((s.w.array() < 0.0).any()) throw InputError("weighted sample: negative weight");
    if (std::abs(s.w.sum() - 1.0) > 1e-12) {
        throw InputError("weighted sample: weights must sum to 1");
    }
}

inline double squared_distance(const PointRef& a, const PointRef& b) {
    return (a - b).squaredNorm();
}

}  // namespace locsvm
