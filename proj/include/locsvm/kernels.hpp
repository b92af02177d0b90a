#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "locsvm/region.hpp"
#include "locsvm/types.hpp"

namespace locsvm {

enum class KernelFamily { GaussianRBF, Linear, Polynomial };

/// Positive-definite kernel on R^d. Immutable value type.
///
/// GaussianRBF uses the length-scale form k(x, x') = exp(-|x - x'|^2 / gamma^2).
/// Polynomial is (<x, x'> + offset)^degree.
struct Kernel {
    KernelFamily family = KernelFamily::GaussianRBF;
    double gamma = 1.0;
    int degree = 2;
    double offset = 0.0;
    int input_dim = 1;

    static Kernel gaussian_rbf(double gamma, int input_dim) {
        if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InputError("gaussian-rbf: gamma must be positive");
        if (input_dim < 1) throw InputError("kernel: input_dim must be positive");
        return Kernel{KernelFamily::GaussianRBF, gamma, 2, 0.0, input_dim};
    }
    static Kernel linear(int input_dim) {
        if (input_dim < 1) throw InputError("kernel: input_dim must be positive");
        return Kernel{KernelFamily::Linear, 1.0, 1, 0.0, input_dim};
    }
    static Kernel polynomial(int degree, double offset, int input_dim) {
        if (degree < 1) throw InputError("polynomial: degree must be positive");
        if (!(offset >= 0.0)) throw InputError("polynomial: offset must be nonnegative");
        if (input_dim < 1) throw InputError("kernel: input_dim must be positive");
        return Kernel{KernelFamily::Polynomial, 1.0, degree, offset, input_dim};
    }

    /// True when sqrt(k(x,x)) does not depend on x.
    [[nodiscard]] bool has_constant_diagonal() const { return family == KernelFamily::GaussianRBF; }

    /// Unchecked evaluation; callers guarantee matching dimensions.
    [[nodiscard]] double operator()(const PointRef& a, const PointRef& b) const {
        switch (family) {
            case KernelFamily::GaussianRBF:
                return std::exp(-(a - b).squaredNorm() / (gamma * gamma));
            case KernelFamily::Linear:
                return a.dot(b);
            case KernelFamily::Polynomial:
                return std::pow(a.dot(b) + offset, degree);
        }
        return 0.0;
    }

    bool operator==(const Kernel&) const = default;
};

inline std::string_view family_name(KernelFamily f) {
    switch (f) {
        case KernelFamily::GaussianRBF: return "gaussian-rbf";
        case KernelFamily::Linear: return "linear";
        case KernelFamily::Polynomial: return "polynomial";
    }
    return "?";
}

inline KernelFamily parse_kernel_family(std::string_view name) {
    if (name == "gaussian-rbf") return KernelFamily::GaussianRBF;
    if (name == "linear") return KernelFamily::Linear;
    if (name == "polynomial") return KernelFamily::Polynomial;
    throw InputError("unknown kernel family '" + std::string(name) + "'");
}

inline double eval(const Kernel& k, const PointRef& a, const PointRef& b) {
    if (a.size() != k.input_dim || b.size() != k.input_dim) {
        throw InputError("kernel eval: expected dimension " + std::to_string(k.input_dim) + ", got " +
                         std::to_string(a.size()) + " and " + std::to_string(b.size()));
    }
    const double v = k(a, b);
    if (!std::isfinite(v)) throw InputError("kernel eval: non-finite value");
    return v;
}

/// Gram matrix over the rows of `points`. Upper triangle is computed, lower mirrored.
inline Matrix gram(const Kernel& k, const Points& points) {
    if (points.rows() == 0) throw InputError("gram: empty point list");
    if (points.cols() != k.input_dim) throw InputError("gram: dimension mismatch");
    const auto n = points.rows();
    Matrix g(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            const double v = k(points.row(i).transpose(), points.row(j).transpose());
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return g;
}

/// Rectangular kernel matrix K(i, j) = k(a_i, b_j).
inline Matrix cross_gram(const Kernel& k, const Points& a, const Points& b) {
    if (a.cols() != k.input_dim || b.cols() != k.input_dim) throw InputError("cross_gram: dimension mismatch");
    Matrix g(a.rows(), b.rows());
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            g(i, j) = k(a.row(i).transpose(), b.row(j).transpose());
        }
    }
    return g;
}

enum class SupNormMethod { Exact, EmpiricalSup };

/// sup over a region of sqrt(k(x, x)).
struct KernelSupNorm {
    double value = 0.0;
    int region_id = 0;
    SupNormMethod method = SupNormMethod::Exact;

    /// Empirical sups only see the probes, so they may underestimate the true norm.
    [[nodiscard]] bool is_lower_bound() const { return method == SupNormMethod::EmpiricalSup; }
};

/// Probes outside the region are ignored.
inline KernelSupNorm sup_norm_on_region(const Kernel& k, const RegionPredicate& region, const Points& probes) {
    if (k.has_constant_diagonal()) return {1.0, region.id, SupNormMethod::Exact};
    if (probes.rows() > 0 && probes.cols() != k.input_dim) throw InputError("sup_norm_on_region: dimension mismatch");
    bool any = false;
    double best = 0.0;
    for (Eigen::Index i = 0; i < probes.rows(); ++i) {
        const auto x = probes.row(i).transpose();
        if (!region.contains(x)) continue;
        any = true;
        best = std::max(best, std::sqrt(std::max(0.0, k(x, x))));
    }
    if (!any) {
        throw InsufficientDataError("sup_norm_on_region: no probes inside region " + std::to_string(region.id));
    }
    return {best, region.id, SupNormMethod::EmpiricalSup};
}

}  // namespace locsvm
