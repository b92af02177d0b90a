#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "locsvm/composer.hpp"
#include "locsvm/robustness.hpp"
#include "locsvm/rng.hpp"

namespace locsvm {

enum class TaskKind { SineRegression, TwoMoonsClassification, PiecewiseRegression };

inline std::string_view task_name(TaskKind k) {
    switch (k) {
        case TaskKind::SineRegression: return "sine-regression";
        case TaskKind::TwoMoonsClassification: return "two-moons-classification";
        case TaskKind::PiecewiseRegression: return "piecewise-regression";
    }
    return "?";
}

inline TaskKind parse_task_kind(std::string_view s) {
    if (s == "sine-regression") return TaskKind::SineRegression;
    if (s == "two-moons-classification") return TaskKind::TwoMoonsClassification;
    if (s == "piecewise-regression") return TaskKind::PiecewiseRegression;
    throw InputError("unknown synthetic task '" + std::string(s) + "'");
}

/// Synthetic distribution with a closed-form Bayes predictor.
///
/// sine-regression:   x ~ U[-pi, pi]^d, y = mean_j sin(x_j) + noise N(0, 1)
/// piecewise:         x ~ U[-pi, pi]^d, y = (-1)^(#breakpoints <= x_0) + noise N(0, 1)
/// two-moons:         y = +-1 equiprobable, (x_0, x_1) on the upper or lower moon plus N(0, noise^2 I),
///                    remaining coordinates pure N(0, noise^2) noise
struct SyntheticTask {
    TaskKind kind = TaskKind::SineRegression;
    double noise = 0.1;
    int dim = 2;
    std::uint64_t seed = 0;
    std::vector<double> breakpoints{0.0};

    [[nodiscard]] SmoothLoss loss() const {
        return kind == TaskKind::TwoMoonsClassification ? SmoothLoss::classification() : SmoothLoss::regression();
    }

    void validate() const {
        if (dim < 1) throw InputError("synthetic task: dim must be positive");
        if (!(noise >= 0.0) || !std::isfinite(noise)) throw InputError("synthetic task: noise must be nonnegative");
        if (kind == TaskKind::TwoMoonsClassification) {
            if (dim < 2) throw InputError("two-moons: dim must be at least 2");
            if (!(noise > 0.0)) throw InputError("two-moons: noise must be positive");
        }
        if (kind == TaskKind::PiecewiseRegression && !std::is_sorted(breakpoints.begin(), breakpoints.end())) {
            throw InputError("piecewise-regression: breakpoints must be sorted");
        }
    }

    /// Minimizer of the expected loss at x (regression: conditional median; classification: log-odds).
    [[nodiscard]] double bayes_predictor(const PointRef& x) const {
        switch (kind) {
            case TaskKind::SineRegression: {
                double s = 0.0;
                for (Eigen::Index j = 0; j < x.size(); ++j) s += std::sin(x[j]);
                return s / static_cast<double>(x.size());
            }
            case TaskKind::PiecewiseRegression: {
                const auto k = std::upper_bound(breakpoints.begin(), breakpoints.end(), x[0]) - breakpoints.begin();
                return k % 2 == 0 ? 1.0 : -1.0;
            }
            case TaskKind::TwoMoonsClassification:
                return moons_log_odds(x[0], x[1]);
        }
        return 0.0;
    }

private:
    /// ln p(x | +1) - ln p(x | -1), each density a Gaussian-smoothed arc integrated by the midpoint rule.
    [[nodiscard]] double moons_log_odds(double x0, double x1) const {
        constexpr int nodes = 720;
        const double s2 = 2.0 * noise * noise;
        double mp = -std::numeric_limits<double>::infinity(), mm = mp;
        std::vector<double> ep(nodes), em(nodes);
        for (int i = 0; i < nodes; ++i) {
            const double th = std::numbers::pi * (i + 0.5) / nodes;
            const double c = std::cos(th), s = std::sin(th);
            ep[static_cast<std::size_t>(i)] = -((x0 - c) * (x0 - c) + (x1 - s) * (x1 - s)) / s2;
            em[static_cast<std::size_t>(i)] = -((x0 - 1.0 + c) * (x0 - 1.0 + c) + (x1 - 0.5 + s) * (x1 - 0.5 + s)) / s2;
            mp = std::max(mp, ep[static_cast<std::size_t>(i)]);
            mm = std::max(mm, em[static_cast<std::size_t>(i)]);
        }
        double sp = 0.0, sm = 0.0;
        for (int i = 0; i < nodes; ++i) {
            sp += std::exp(ep[static_cast<std::size_t>(i)] - mp);
            sm += std::exp(em[static_cast<std::size_t>(i)] - mm);
        }
        return (mp + std::log(sp)) - (mm + std::log(sm));
    }
};

/// n i.i.d. draws; identical for identical (task, n, seed).
inline Dataset generate(const SyntheticTask& task, int n, std::uint64_t seed) {
    task.validate();
    if (n < 1) throw InputError("generate: n must be positive");
    Rng rng(seed);
    Dataset d{Points(n, task.dim), Vector(n)};
    for (int i = 0; i < n; ++i) {
        if (task.kind == TaskKind::TwoMoonsClassification) {
            const double label = rng.uniform() < 0.5 ? 1.0 : -1.0;
            const double th = std::numbers::pi * rng.uniform();
            const double c = std::cos(th), s = std::sin(th);
            d.x(i, 0) = (label > 0 ? c : 1.0 - c) + task.noise * rng.normal();
            d.x(i, 1) = (label > 0 ? s : 0.5 - s) + task.noise * rng.normal();
            for (int j = 2; j < task.dim; ++j) d.x(i, j) = task.noise * rng.normal();
            d.y[i] = label;
        } else {
            for (int j = 0; j < task.dim; ++j) d.x(i, j) = rng.uniform(-std::numbers::pi, std::numbers::pi);
            const double f = task.bayes_predictor(d.x.row(i).transpose());
            d.y[i] = task.noise > 0.0 ? f + task.noise * rng.normal() : f;
        }
    }
    return d;
}

inline Dataset generate(const SyntheticTask& task, int n) { return generate(task, n, task.seed); }

/// lambda(n_b) = c n_b^-beta. Both lambda -> 0 and lambda^2 n_b -> infinity need 0 < beta < 1/2.
struct LambdaSchedule {
    double c = 1.0;
    double beta = 0.25;

    void validate() const {
        if (!(c > 0.0) || !std::isfinite(c)) throw InputError("lambda schedule: c must be positive");
        if (!(beta > 0.0 && beta < 0.5)) {
            throw InputError("lambda schedule: beta must lie in (0, 1/2) so that lambda -> 0 and lambda^2 n -> inf");
        }
    }
    [[nodiscard]] double operator()(double n_b) const { return c * std::pow(n_b, -beta); }
};

struct RiskEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Monte-Carlo risk under the unshifted loss.
inline RiskEstimate mc_risk(const Vector& predictions, const Dataset& sample, const SmoothLoss& loss) {
    const auto m = sample.size();
    Vector l(m);
    for (Eigen::Index i = 0; i < m; ++i) l[i] = loss.value(sample.y[i], predictions[i]);
    const double mean = l.mean();
    const double var = m > 1 ? (l.array() - mean).square().sum() / static_cast<double>(m - 1) : 0.0;
    return {mean, std::sqrt(var / static_cast<double>(m))};
}

inline RiskEstimate bayes_risk_proxy(const SyntheticTask& task, const Dataset& sample) {
    Vector t(sample.size());
    for (Eigen::Index i = 0; i < sample.size(); ++i) t[i] = task.bayes_predictor(sample.x.row(i).transpose());
    return mc_risk(t, sample, task.loss());
}

struct PartitionParams {
    int b_target = 4;
    double tau = 0.25;
    int min_region_size = 10;
};

struct SchemeParams {
    WeightKind kind = WeightKind::NormalizedIndicator;
    double bandwidth = 1.0;
};

/// Seed of the i-th derived stream (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kEvalStream = 0xE7A1;

struct TrendRow {
    int n = 0;
    std::size_t regions = 0;
    std::vector<int> n_b;
    std::vector<double> lambda_b;
    double lambda_global = 0.0;
    RiskEstimate risk;
    RiskEstimate global_risk;
    double bayes_proxy = 0.0;
};

struct TrendReport {
    SyntheticTask task;
    LambdaSchedule schedule;
    int mc_samples = 0;
    std::vector<TrendRow> rows;
};

/// For each n: regionalize, fit the composed model with lambda_b = schedule(n_b), fit the global model
/// with lambda = schedule(n), estimate both risks on one fresh evaluation sample.
inline TrendReport consistency_trend(const SyntheticTask& task, std::span<const int> n_ladder,
                                     const LambdaSchedule& schedule, const PartitionParams& pp, const SchemeParams& sp,
                                     const Kernel& kernel, int mc_samples = 100000, const TrainConfig& solver = {}) {
    schedule.validate();
    task.validate();
    if (n_ladder.empty()) throw InputError("consistency_trend: empty n ladder");
    for (std::size_t i = 1; i < n_ladder.size(); ++i) {
        if (n_ladder[i] <= n_ladder[i - 1]) throw InputError("consistency_trend: n ladder must increase");
    }
    TrendReport rep{task, schedule, mc_samples, {}};
    const SmoothLoss loss = task.loss();
    const Dataset eval = generate(task, mc_samples, derive_seed(task.seed, kEvalStream));
    const double bayes = bayes_risk_proxy(task, eval).mean;

    for (int n : n_ladder) {
        const Dataset train_set = generate(task, n, derive_seed(task.seed, static_cast<std::uint64_t>(n)));
        const RegionPartition part =
            regionalize(train_set.x, pp.b_target, pp.tau, pp.min_region_size, derive_seed(task.seed, 1));
        WeightScheme scheme{sp.kind, sp.bandwidth, part};
        TrendRow row;
        row.n = n;
        row.regions = part.size();
        std::vector<LocalConfig> cfgs;
        for (const auto& r : part.regions) {
            const auto sample = restrict(train_set, part, r.id);
            const int nb = sample ? static_cast<int>(sample->size()) : 0;
            row.n_b.push_back(nb);
            const double lam = schedule(std::max(1, nb));
            row.lambda_b.push_back(lam);
            cfgs.push_back({kernel, lam});
        }
        const ComposedModel model = fit_composed(train_set, scheme, cfgs, loss, solver);
        row.risk = mc_risk(predict_composed(model, eval.x), eval, loss);

        row.lambda_global = schedule(n);
        TrainConfig gcfg = solver;
        gcfg.lambda = row.lambda_global;
        const LocalModel global = train(WeightedSample::uniform(train_set.x, train_set.y), kernel, loss, gcfg);
        Vector gpred(eval.size());
        const auto ge = global.expansion();
        parallel_for(static_cast<std::size_t>(eval.size()),
                     [&](std::size_t i) { gpred[static_cast<Eigen::Index>(i)] = ge(eval.x.row(static_cast<Eigen::Index>(i)).transpose()); });
        row.global_risk = mc_risk(gpred, eval, loss);
        row.bayes_proxy = bayes;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

struct TradeoffRow {
    double lambda = 0.0;
    RiskEstimate risk;
    double if_bound_rough = 0.0;
};

/// One training sample and partition; every region uses the same lambda from the grid.
inline std::vector<TradeoffRow> tradeoff_sweep(const SyntheticTask& task, int n, std::span<const double> lambda_grid,
                                               const PartitionParams& pp, const SchemeParams& sp, const Kernel& kernel,
                                               int mc_samples = 100000, const TrainConfig& solver = {}) {
    task.validate();
    if (lambda_grid.empty()) throw InputError("tradeoff_sweep: empty lambda grid");
    for (double l : lambda_grid) {
        if (!(l > 0.0)) throw InputError("tradeoff_sweep: lambda values must be positive");
    }
    const SmoothLoss loss = task.loss();
    const Dataset train_set = generate(task, n, derive_seed(task.seed, static_cast<std::uint64_t>(n)));
    const Dataset eval = generate(task, mc_samples, derive_seed(task.seed, kEvalStream));
    const RegionPartition part = regionalize(train_set.x, pp.b_target, pp.tau, pp.min_region_size, derive_seed(task.seed, 1));
    const WeightScheme scheme{sp.kind, sp.bandwidth, part};
    const Points probes = make_probes(train_set.x);
    std::vector<TradeoffRow> rows;
    for (double lam : lambda_grid) {
        const LocalConfig cfg[] = {{kernel, lam}};
        const ComposedModel model = fit_composed(train_set, scheme, cfg, loss, solver);
        rows.push_back({lam, mc_risk(predict_composed(model, eval.x), eval, loss), if_bound(model, probes).if_bound_rough});
    }
    return rows;
}

}  // namespace locsvm
