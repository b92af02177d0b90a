#pragma once

#include <algorithm>
#include <concepts>
#include <span>
#include <type_traits>
#include <vector>

#include "locsvm/parallel.hpp"
#include "locsvm/regionalization.hpp"
#include "locsvm/solver.hpp"

namespace locsvm {

/// Hyperparameters of one local learner.
struct LocalConfig {
    Kernel kernel;
    double lambda = 1.0;
};

/// f_comp(x) = sum_b w_b(x) f_b(x).
struct ComposedModel {
    /// locals[b - 1] belongs to region id b.
    std::vector<LocalModel> locals;
    WeightScheme scheme;
    std::vector<int> null_region_ids;
    SmoothLoss loss;

    [[nodiscard]] std::size_t size() const { return locals.size(); }
    [[nodiscard]] const LocalModel& local(int id) const { return locals.at(static_cast<std::size_t>(id - 1)); }
    [[nodiscard]] bool is_null_region(int id) const {
        return std::find(null_region_ids.begin(), null_region_ids.end(), id) != null_region_ids.end();
    }
};

/// One config shared by all regions, or one per region.
inline const LocalConfig& config_for(std::span<const LocalConfig> configs, std::size_t b) {
    if (configs.size() == 1) return configs.front();
    return configs[b];
}

/// Trains one local model per region on its restricted sample. Null-measure regions get the zero
/// function. Convergence errors carry the failing region id.
inline ComposedModel fit_composed(const Dataset& data, const WeightScheme& scheme, std::span<const LocalConfig> configs,
                                  const SmoothLoss& loss, const TrainConfig& solver = {}) {
    check_dataset(data);
    const std::size_t nb = scheme.size();
    if (nb == 0) throw InputError("fit_composed: partition has no regions");
    if (configs.size() != 1 && configs.size() != nb) {
        throw InputError("fit_composed: need 1 or " + std::to_string(nb) + " local configs, got " +
                         std::to_string(configs.size()));
    }
    if (!uncovered_points(scheme.partition, data.x).empty()) {
        throw InputError("fit_composed: partition does not cover the training data");
    }

    ComposedModel model;
    model.scheme = scheme;
    model.loss = loss;
    model.locals.resize(nb);
    std::vector<char> is_null(nb, 0);

    parallel_for(nb, [&](std::size_t b) {
        const int id = static_cast<int>(b) + 1;
        const LocalConfig& lc = config_for(configs, b);
        auto sample = restrict(data, scheme.partition, id);
        if (!sample) {
            model.locals[b] = LocalModel::zero(lc.kernel, loss, lc.lambda, id);
            is_null[b] = 1;
            return;
        }
        TrainConfig cfg = solver;
        cfg.lambda = lc.lambda;
        TrainOptions opts;
        opts.region_id = id;
        model.locals[b] = train(*sample, lc.kernel, loss, cfg, opts);
    });
    for (std::size_t b = 0; b < nb; ++b) {
        if (is_null[b]) model.null_region_ids.push_back(static_cast<int>(b) + 1);
    }
    return model;
}

/// Uncovered points use the nearest region's predictor.
inline double predict_composed(const ComposedModel& model, const PointRef& x) {
    const Vector w = weights_with_fallback(model.scheme, x);
    double s = 0.0;
    for (Eigen::Index b = 0; b < w.size(); ++b) {
        if (w[b] != 0.0) s += w[b] * predict(model.locals[static_cast<std::size_t>(b)], x);
    }
    return s;
}

/// Weight matrix (points x regions) with nearest-region fallback.
inline Matrix weight_matrix(const WeightScheme& scheme, const Points& points) {
    Matrix w(points.rows(), static_cast<Eigen::Index>(scheme.size()));
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        w.row(i) = weights_with_fallback(scheme, points.row(i).transpose()).transpose();
    }
    return w;
}

/// Per-region local predictions at points, evaluated only where the region's weight is nonzero
/// (other entries are 0).
inline Matrix local_predictions(const ComposedModel& model, const Points& points, const Matrix& weights) {
    Matrix out = Matrix::Zero(points.rows(), static_cast<Eigen::Index>(model.size()));
    constexpr Eigen::Index chunk = 1024;
    const auto chunks = static_cast<std::size_t>((points.rows() + chunk - 1) / chunk);
    parallel_for(chunks, [&](std::size_t c) {
        const Eigen::Index lo = static_cast<Eigen::Index>(c) * chunk;
        const Eigen::Index hi = std::min(points.rows(), lo + chunk);
        for (std::size_t b = 0; b < model.size(); ++b) {
            const auto e = model.locals[b].expansion();
            if (e.anchors.rows() == 0) continue;
            for (Eigen::Index i = lo; i < hi; ++i) {
                if (weights(i, static_cast<Eigen::Index>(b)) != 0.0) {
                    out(i, static_cast<Eigen::Index>(b)) = e(points.row(i).transpose());
                }
            }
        }
    });
    return out;
}

template <class P>
    requires std::same_as<std::remove_cvref_t<P>, Points>
Vector predict_composed(const ComposedModel& model, const P& points) {
    const Matrix w = weight_matrix(model.scheme, points);
    const Matrix f = local_predictions(model, points, w);
    return w.cwiseProduct(f).rowwise().sum();
}

/// n^-1 sum L(y_i, t_i), or the shifted L* when `shifted`.
inline double empirical_risk(const Vector& predictions, const Dataset& data, const SmoothLoss& loss, bool shifted) {
    check_dataset(data);
    if (data.size() == 0) throw InputError("empirical_risk: empty data");
    if (predictions.size() != data.size()) throw InputError("empirical_risk: prediction count mismatch");
    double s = 0.0;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        s += shifted ? loss.shifted_value(data.y[i], predictions[i]) : loss.value(data.y[i], predictions[i]);
    }
    return s / static_cast<double>(data.size());
}

template <class Predictor>
    requires std::is_invocable_r_v<double, const Predictor&, const PointRef&> && (!std::is_base_of_v<Eigen::EigenBase<Predictor>, Predictor>)
double empirical_risk(const Predictor& f, const Dataset& data, const SmoothLoss& loss, bool shifted) {
    Vector t(data.size());
    for (Eigen::Index i = 0; i < data.size(); ++i) t[i] = f(data.x.row(i).transpose());
    return empirical_risk(t, data, loss, shifted);
}

inline double empirical_risk(const ComposedModel& model, const Dataset& data, bool shifted) {
    return empirical_risk(predict_composed(model, data.x), data, model.loss, shifted);
}

}  // namespace locsvm
