#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "locsvm/errors.hpp"

namespace locsvm {

enum class LossFamily { LogisticClassification, LogisticRegression };

namespace detail {

/// ln(1 + e^u) without overflow.
inline double softplus(double u) {
    return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

/// 1 / (1 + e^-u).
inline double sigmoid(double u) {
    if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
    const double e = std::exp(u);
    return e / (1.0 + e);
}

}  // namespace detail

/// Smooth, convex, Lipschitz loss L(y, t).
///
/// Classification: L(y, t) = ln(1 + exp(-y t)), y in {-1, +1}.
/// Regression:     L(y, t) = -ln(4 exp(y - t) / (1 + exp(y - t))^2).
/// Both have Lipschitz constant 1; sup L'' is 1/4 and 1/2 respectively.
struct SmoothLoss {
    LossFamily family = LossFamily::LogisticRegression;

    static constexpr SmoothLoss classification() { return {LossFamily::LogisticClassification}; }
    static constexpr SmoothLoss regression() { return {LossFamily::LogisticRegression}; }

    [[nodiscard]] bool is_classification() const { return family == LossFamily::LogisticClassification; }

    void check_label(double y) const {
        if (is_classification()) {
            if (y != 1.0 && y != -1.0) {
                throw InputError("logistic-classification: label must be -1 or +1, got " + std::to_string(y));
            }
        } else if (!std::isfinite(y)) {
            throw InputError("logistic-regression: label must be finite");
        }
    }

    /// Unchecked; callers validate labels once up front.
    [[nodiscard]] double value_unchecked(double y, double t) const {
        if (is_classification()) return detail::softplus(-y * t);
        // (y-t) + 2 ln(1 + e^-(y-t)) - ln 4, symmetric in y - t
        const double a = std::abs(y - t);
        return a + 2.0 * std::log1p(std::exp(-a)) - 2.0 * std::numbers::ln2;
    }

    [[nodiscard]] double dt_unchecked(double y, double t) const {
        if (is_classification()) return -y * detail::sigmoid(-y * t);
        return -std::tanh(0.5 * (y - t));
    }

    [[nodiscard]] double dtt_unchecked(double y, double t) const {
        if (is_classification()) {
            const double s = detail::sigmoid(y * t);
            return s * (1.0 - s);
        }
        const double c = std::cosh(0.5 * (y - t));
        return std::isfinite(c) ? 0.5 / (c * c) : 0.0;
    }

    [[nodiscard]] double value(double y, double t) const {
        check_label(y);
        return value_unchecked(y, t);
    }
    [[nodiscard]] double dt(double y, double t) const {
        check_label(y);
        return dt_unchecked(y, t);
    }
    [[nodiscard]] double dtt(double y, double t) const {
        check_label(y);
        return dtt_unchecked(y, t);
    }

    /// L*(y, t) = L(y, t) - L(y, 0). Derivatives in t coincide with those of L.
    [[nodiscard]] double shifted_value(double y, double t) const {
        check_label(y);
        return value_unchecked(y, t) - value_unchecked(y, 0.0);
    }

    /// |L|_1; shifting does not change it.
    [[nodiscard]] static constexpr double lipschitz_constant() { return 1.0; }

    /// sup over (y, t) of L''(y, t).
    [[nodiscard]] double curvature_bound() const { return is_classification() ? 0.25 : 0.5; }

    bool operator==(const SmoothLoss&) const = default;
};

/// View that evaluates L* while keeping the base loss's derivatives and constant.
struct ShiftedLossView {
    SmoothLoss base;

    [[nodiscard]] double value(double y, double t) const { return base.shifted_value(y, t); }
    [[nodiscard]] double dt(double y, double t) const { return base.dt(y, t); }
    [[nodiscard]] double dtt(double y, double t) const { return base.dtt(y, t); }
    [[nodiscard]] static constexpr double lipschitz_constant() { return SmoothLoss::lipschitz_constant(); }
};

inline std::string_view loss_name(const SmoothLoss& l) {
    return l.is_classification() ? "logistic-classification" : "logistic-regression";
}

inline SmoothLoss parse_loss(std::string_view name) {
    if (name == "logistic-classification") return SmoothLoss::classification();
    if (name == "logistic-regression") return SmoothLoss::regression();
    throw InputError("unknown loss '" + std::string(name) + "'");
}

}  // namespace locsvm
