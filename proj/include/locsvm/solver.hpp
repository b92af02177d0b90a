#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "locsvm/kernels.hpp"
#include "locsvm/losses.hpp"
#include "locsvm/types.hpp"

namespace locsvm {

struct TrainConfig {
    double lambda = 1.0;
    double grad_tol = 1e-10;
    int max_iter = 200;
    /// Extra diagonal added to the reduced Newton system only.
    double ridge = 0.0;
};

inline void validate(const TrainConfig& cfg) {
    if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda)) throw InputError("lambda must be in (0, inf)");
    if (!(cfg.grad_tol > 0.0)) throw InputError("grad_tol must be positive");
    if (cfg.max_iter < 1) throw InputError("max_iter must be positive");
    if (!(cfg.ridge >= 0.0)) throw InputError("ridge must be nonnegative");
}

/// f = sum_i c_i k(., a_i), an element of the RKHS of `kernel`.
struct KernelExpansion {
    Kernel kernel;
    Points anchors;
    Vector coefficients;

    [[nodiscard]] double operator()(const PointRef& x) const {
        if (x.size() != kernel.input_dim) throw InputError("predict: dimension mismatch");
        double s = 0.0;
        for (Eigen::Index i = 0; i < anchors.rows(); ++i) {
            s += coefficients[i] * kernel(x, anchors.row(i).transpose());
        }
        return s;
    }

    [[nodiscard]] Vector evaluate(const Points& points) const {
        if (points.cols() != kernel.input_dim) throw InputError("predict: dimension mismatch");
        Vector out = Vector::Zero(points.rows());
        if (anchors.rows() == 0) return out;
        for (Eigen::Index i = 0; i < points.rows(); ++i) {
            const auto x = points.row(i).transpose();
            double s = 0.0;
            for (Eigen::Index j = 0; j < anchors.rows(); ++j) {
                s += coefficients[j] * kernel(x, anchors.row(j).transpose());
            }
            out[i] = s;
        }
        return out;
    }

    /// sqrt(c^T G c); tiny negative rounding is clamped to zero.
    [[nodiscard]] double h_norm() const {
        if (anchors.rows() == 0) return 0.0;
        const Matrix g = gram(kernel, anchors);
        return std::sqrt(std::max(0.0, coefficients.dot(g * coefficients)));
    }
};

struct TrainStats {
    int iterations = 0;
    double grad_norm = 0.0;
    int gradient_steps = 0;
};

/// Minimizer of sum_i w_i L*(y_i, f(x_i)) + lambda |f|_H^2 over the anchors' span.
struct LocalModel {
    Vector coefficients;
    Points anchor_points;
    Vector anchor_weights;
    Kernel kernel;
    SmoothLoss loss;
    double lambda = 1.0;
    /// nullopt for a global (unregionalized) model.
    std::optional<int> region_id;
    TrainStats stats;

    [[nodiscard]] KernelExpansion expansion() const { return {kernel, anchor_points, coefficients}; }
    [[nodiscard]] std::ptrdiff_t size() const { return coefficients.size(); }

    /// The zero function on `input_dim` inputs, used for null-measure regions.
    static LocalModel zero(const Kernel& k, const SmoothLoss& l, double lambda, std::optional<int> region) {
        LocalModel m;
        m.coefficients = Vector(0);
        m.anchor_points = Points(0, k.input_dim);
        m.anchor_weights = Vector(0);
        m.kernel = k;
        m.loss = l;
        m.lambda = lambda;
        m.region_id = region;
        return m;
    }
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, Vector best, double grad_norm)
        : std::runtime_error(what), best_iterate(std::move(best)), final_grad_norm(grad_norm) {}

    Vector best_iterate;
    double final_grad_norm;
    std::optional<int> region_id;
};

enum class LossShift { Shifted, Unshifted };

struct TrainOptions {
    /// Initial coefficients; must match the sample size.
    std::optional<Vector> warm_start;
    LossShift shift = LossShift::Shifted;
    std::optional<int> region_id;
};

namespace detail {

inline void check_sample_labels(const WeightedSample& s, const SmoothLoss& loss) {
    for (Eigen::Index i = 0; i < s.y.size(); ++i) loss.check_label(s.y[i]);
}

/// Objective given precomputed f = K alpha.
inline double objective_from_predictions(const Vector& alpha, const Vector& f, const WeightedSample& s,
                                         const SmoothLoss& loss, double lambda, LossShift shift) {
    double risk = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        double l = loss.value_unchecked(s.y[i], f[i]);
        if (shift == LossShift::Shifted) l -= loss.value_unchecked(s.y[i], 0.0);
        risk += s.w[i] * l;
    }
    return risk + lambda * alpha.dot(f);
}

/// r = w .* L'(y, f) + 2 lambda alpha; the objective gradient is K r.
inline Vector stationarity_residual(const Vector& alpha, const Vector& f, const WeightedSample& s,
                                    const SmoothLoss& loss, double lambda) {
    Vector r(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        r[i] = s.w[i] * loss.dt_unchecked(s.y[i], f[i]) + 2.0 * lambda * alpha[i];
    }
    return r;
}

}  // namespace detail

/// Regularized weighted empirical risk at coefficient vector alpha (anchors = sample points).
inline double objective(const Vector& alpha, const WeightedSample& sample, const Kernel& kernel,
                        const SmoothLoss& loss, const TrainConfig& cfg, LossShift shift = LossShift::Shifted) {
    if (alpha.size() != sample.size()) throw InputError("objective: coefficient length mismatch");
    detail::check_sample_labels(sample, loss);
    const Matrix k = gram(kernel, sample.x);
    const Vector f = k * alpha;
    return detail::objective_from_predictions(alpha, f, sample, loss, cfg.lambda, shift);
}

/// Objective gradient K (w .* L'(y, K alpha)) + 2 lambda K alpha.
inline Vector objective_gradient(const Vector& alpha, const WeightedSample& sample, const Kernel& kernel,
                                 const SmoothLoss& loss, const TrainConfig& cfg) {
    if (alpha.size() != sample.size()) throw InputError("objective_gradient: coefficient length mismatch");
    detail::check_sample_labels(sample, loss);
    const Matrix k = gram(kernel, sample.x);
    const Vector f = k * alpha;
    return k * detail::stationarity_residual(alpha, f, sample, loss, cfg.lambda);
}

/// Damped Newton on the representer coefficients.
///
/// The Hessian is K (D K + 2 lambda I) with D = diag(w .* L''). The step solves the reduced system
/// (D K + 2 lambda I) d = -r through the SPD matrix 2 lambda I + S K S, S = D^(1/2), which keeps the
/// iteration well defined when K is singular (duplicate points). Steps are accepted by Armijo
/// backtracking (c = 1e-4); a non-descent direction falls back to steepest descent.
inline LocalModel train(const WeightedSample& sample, const Kernel& kernel, const SmoothLoss& loss,
                        const TrainConfig& cfg, const TrainOptions& opts = {}) {
    validate(sample);
    validate(cfg);
    detail::check_sample_labels(sample, loss);
    if (sample.dim() != kernel.input_dim) throw InputError("train: sample dimension does not match kernel");

    const auto n = sample.size();
    const double lambda = cfg.lambda;
    const Matrix k = gram(kernel, sample.x);

    Vector alpha = Vector::Zero(n);
    if (opts.warm_start) {
        if (opts.warm_start->size() != n) throw InputError("train: warm start length mismatch");
        alpha = *opts.warm_start;
    }
    Vector f = k * alpha;
    double obj = detail::objective_from_predictions(alpha, f, sample, loss, lambda, opts.shift);

    Vector best = alpha;
    double best_grad = std::numeric_limits<double>::infinity();
    TrainStats stats;

    constexpr double armijo_c = 1e-4;
    constexpr int max_backtracks = 60;

    for (int iter = 0;; ++iter) {
        const Vector r = detail::stationarity_residual(alpha, f, sample, loss, lambda);
        const Vector g = k * r;
        const double gnorm = g.lpNorm<Eigen::Infinity>();
        if (gnorm < best_grad) {
            best_grad = gnorm;
            best = alpha;
        }
        if (gnorm <= cfg.grad_tol) {
            stats.iterations = iter;
            stats.grad_norm = gnorm;
            break;
        }
        if (iter >= cfg.max_iter) {
            ConvergenceError err("train: no convergence after " + std::to_string(cfg.max_iter) +
                                     " iterations (gradient norm " + std::to_string(best_grad) + ")",
                                 best, best_grad);
            err.region_id = opts.region_id;
            throw err;
        }

        Vector s(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            s[i] = std::sqrt(std::max(0.0, sample.w[i] * loss.dtt_unchecked(sample.y[i], f[i])));
        }
        Matrix a = s.asDiagonal() * k * s.asDiagonal();
        a.diagonal().array() += 2.0 * lambda + cfg.ridge;
        const Eigen::LLT<Matrix> llt(a);
        Vector d;
        bool newton = llt.info() == Eigen::Success;
        if (newton) {
            const Vector sg = s.cwiseProduct(g);
            d = -(r - s.cwiseProduct(llt.solve(sg))) / (2.0 * lambda);
        }
        double slope = newton ? g.dot(d) : 0.0;
        if (!newton || !(slope < 0.0) || !d.allFinite()) {
            newton = false;
            d = -g;
            slope = -g.squaredNorm();
            ++stats.gradient_steps;
        }

        const Vector kd = k * d;
        double t = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < max_backtracks; ++bt, t *= 0.5) {
            const Vector alpha_new = alpha + t * d;
            const Vector f_new = f + t * kd;
            const double obj_new = detail::objective_from_predictions(alpha_new, f_new, sample, loss, lambda, opts.shift);
            bool ok = obj_new <= obj + armijo_c * t * slope;
            if (!ok && newton && t == 1.0) {
                // Near the optimum objective differences drown in rounding; accept a full Newton step that
                // does not increase the objective beyond rounding and shrinks the gradient.
                const double noise = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(obj));
                if (obj_new <= obj + noise) {
                    const Vector g_new = k * detail::stationarity_residual(alpha_new, f_new, sample, loss, lambda);
                    ok = g_new.lpNorm<Eigen::Infinity>() < gnorm;
                }
            }
            if (ok) {
                alpha = alpha_new;
                f = f_new;
                obj = obj_new;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            ConvergenceError err("train: line search failed (gradient norm " + std::to_string(gnorm) + ")", best,
                                 best_grad);
            err.region_id = opts.region_id;
            throw err;
        }
    }

    LocalModel m;
    m.coefficients = std::move(alpha);
    m.anchor_points = sample.x;
    m.anchor_weights = sample.w;
    m.kernel = kernel;
    m.loss = loss;
    m.lambda = lambda;
    m.region_id = opts.region_id;
    m.stats = stats;
    return m;
}

inline double predict(const LocalModel& m, const PointRef& x) { return m.expansion()(x); }

/// Batch form; only exact point sets select it, so vector expressions go to the pointwise overload.
template <class P>
    requires std::same_as<std::remove_cvref_t<P>, Points>
Vector predict(const LocalModel& m, const P& points) {
    return m.expansion().evaluate(points);
}

inline double h_norm(const LocalModel& m) { return m.expansion().h_norm(); }

/// Analytic bound |f|_H <= |L|_1 |k|_inf / lambda for trained models.
inline double h_norm_bound(const LocalModel& m, double kernel_sup) {
    return SmoothLoss::lipschitz_constant() * kernel_sup / m.lambda;
}

struct ShiftIdentityReport {
    Vector alpha_unshifted;
    Vector alpha_shifted;
    double max_abs_difference = 0.0;
};

/// Trains with L and with L* and compares the coefficient vectors.
inline ShiftIdentityReport shifted_unshifted_identity_check(const WeightedSample& sample, const Kernel& kernel,
                                                            const SmoothLoss& loss, const TrainConfig& cfg) {
    TrainOptions plain;
    plain.shift = LossShift::Unshifted;
    const LocalModel a = train(sample, kernel, loss, cfg, plain);
    const LocalModel b = train(sample, kernel, loss, cfg);
    ShiftIdentityReport rep;
    rep.alpha_unshifted = a.coefficients;
    rep.alpha_shifted = b.coefficients;
    rep.max_abs_difference = (a.coefficients - b.coefficients).lpNorm<Eigen::Infinity>();
    return rep;
}

}  // namespace locsvm
