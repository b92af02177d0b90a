// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "locsvm/locsvm.hpp"
#include "oracles/oracles.hpp"

using namespace locsvm;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// Every trained model seen by the suite, checked against the norm inequalities in criterion 7.
struct ModelLog {
    std::vector<std::pair<LocalModel, Points>> models;
    void add(const LocalModel& m, const Points& probes) {
        if (m.size() > 0) models.emplace_back(m, probes);
    }
    void add(const ComposedModel& c, const Points& probes) {
        for (const auto& m : c.locals) add(m, probes);
    }
};

ModelLog g_log;

SyntheticTask sine_task() {
    SyntheticTask t;
    t.kind = TaskKind::SineRegression;
    t.noise = 0.1;
    t.dim = 2;
    t.seed = kSeed;
    return t;
}

// Fixture of criteria 2-5 and 10: the same draw and partition tradeoff_sweep uses.
struct Fixture {
    SyntheticTask task = sine_task();
    int n = 500;
    PartitionParams pp{4, 0.25, 10};
    Dataset data;
    WeightScheme scheme;
    std::shared_ptr<const ComposedModel> model;
    Points probes;
    std::vector<DiracPoint> zs;
    std::vector<InfluenceEstimate> estimates;
    BoundReport bounds;

    Fixture() {
        data = generate(task, n, derive_seed(task.seed, static_cast<std::uint64_t>(n)));
        scheme = {WeightKind::NormalizedIndicator, 1.0,
                  regionalize(data.x, pp.b_target, pp.tau, pp.min_region_size, derive_seed(task.seed, 1))};
        const LocalConfig cfg[] = {{Kernel::gaussian_rbf(1.0, 2), 0.5}};
        model = std::make_shared<const ComposedModel>(fit_composed(data, scheme, cfg, task.loss()));
        probes = make_probes(data.x, 512);
        zs = dirac_grid(data, task.loss(), 5);
        bounds = if_bound(*model, probes);
    }

    void run_estimates() {
        if (!estimates.empty()) return;
        for (const auto& z : zs) {
            estimates.push_back(finite_diff_if(data, model, ContaminationSpec{z}, probes));
            for (const auto& r : estimates.back().rungs) {
                for (const auto& [id, m] : r.contaminated) g_log.add(m, probes);
            }
        }
    }
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

Outcome criterion1() {
    const SyntheticTask task = sine_task();
    const Dataset d = generate(task, 240, derive_seed(task.seed, 240));
    const Points probes = make_probes(d.x, 512);
    const double lambdas[] = {0.1, 0.5, 2.0};
    double worst = 0.0;
    int checked = 0;
    for (int b : {1, 2, 4}) {
        const WeightScheme scheme{WeightKind::NormalizedIndicator, 1.0, regionalize(d.x, b, 0.25, 10, kSeed + b)};
        if (scheme.size() != static_cast<std::size_t>(b)) return {false, "partition lost regions"};
        std::vector<std::vector<LocalConfig>> configs;
        for (double l : lambdas) configs.push_back({{Kernel::gaussian_rbf(1.0, 2), l}});
        std::vector<LocalConfig> mixed;
        for (int r = 0; r < b; ++r) mixed.push_back({Kernel::gaussian_rbf(1.0, 2), lambdas[r % 3]});
        configs.push_back(mixed);
        for (const auto& cfg : configs) {
            for (const auto& loss : {SmoothLoss::regression(), SmoothLoss::classification()}) {
                Dataset dd = d;
                if (loss.is_classification()) {
                    for (auto& y : dd.y) y = y > 0 ? 1.0 : -1.0;
                }
                const ComposedModel m = fit_composed(dd, scheme, cfg, loss);
                g_log.add(m, probes);
                double expected = 0.0;
                for (int r = 0; r < b; ++r) expected += 1.0 / config_for(cfg, static_cast<std::size_t>(r)).lambda;
                expected *= 2.0;
                const double got = if_bound(m, probes).if_bound_rough;
                worst = std::max(worst, std::abs(got - expected) / expected);
                ++checked;
            }
        }
    }
    return {worst <= 4.0 * std::numeric_limits<double>::epsilon(),
            fmt("%.0f configurations, max relative deviation %.3g", checked, worst)};
}

Outcome criterion2() {
    Fixture& f = fixture();
    f.run_estimates();
    const double bound = f.bounds.if_bound_rough;
    double worst_sup = 0.0, worst_h = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.zs.size(); ++i) {
        const InfluenceEstimate& est = f.estimates[i];
        if (est.eps_used() != 1.25e-3) return {false, "unexpected final eps"};
        worst_sup = std::max(worst_sup, est.sup_norm_estimate());
        const TvRefinedBound tv = tv_refined_if_bound(f.bounds, *f.model, f.data, f.zs[i]);
        for (const auto& t : f.bounds.terms) {
            const double limit = tv.tv.at(t.id) * SmoothLoss::lipschitz_constant() / t.lambda + 1e-3;
            worst_h = std::max(worst_h, est.h_norms().at(t.id) - limit);
        }
    }
    return {worst_sup <= bound && worst_h <= 0.0,
            fmt("max IF sup %.4g <= bound %.4g; max h-norm excess %.3g", worst_sup, bound, worst_h)};
}

Outcome criterion3() {
    Fixture& f = fixture();
    f.run_estimates();
    double worst = 0.0;
    for (const auto& est : f.estimates) {
        worst = std::max(worst, decomposition_check(est));
        worst = std::max(worst, decomposition_check(est, f.probes.bottomRows(512)));
    }
    return {worst <= 1e-10, fmt("max residual %.3g over 512 probes x 25 points", worst)};
}

Outcome criterion4() {
    Fixture& f = fixture();
    const auto candidates = adversarial_candidates(f.data, f.model->loss);
    const double eps[] = {0.1};
    const MaxbiasReport rep = maxbias_probe(f.data, *f.model, eps, candidates, f.probes);
    const double expected_bound = maxbias_bound(f.bounds, eps);
    const double zero[] = {0.0};
    const MaxbiasReport none = maxbias_probe(f.data, *f.model, zero, candidates, f.probes);
    for (const auto& c : candidates) {
        g_log.add(contaminated_composed(f.data, *f.model, eps, c), f.probes);
    }
    const bool ok = rep.empirical_max <= rep.bound && rep.bound == expected_bound && none.empirical_max == 0.0 &&
                    none.bound == 0.0;
    return {ok, fmt("maxbias %.4g <= bound %.4g; eps = 0 gives %.3g", rep.empirical_max, rep.bound,
                    none.empirical_max)};
}

Outcome criterion5() {
    Fixture& f = fixture();
    f.run_estimates();
    int converging = 0;
    double worst = 0.0;
    for (const auto& est : f.estimates) {
        if (est.ladder_converging(0.9)) ++converging;
        for (double r : est.ladder_ratios()) worst = std::max(worst, r);
    }
    return {converging >= 20, fmt("%.0f of 25 points contract (largest ratio %.3g)", converging, worst)};
}

Outcome criterion6() {
    std::mt19937_64 rng(kSeed + 6);
    std::uniform_real_distribution<double> u(-2.0, 2.0), g(0.3, 2.0), l(0.01, 2.0);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const int n = 2 + static_cast<int>(rng() % 49);
        const bool cls = t % 2 == 0;
        Points x(n, 2);
        Vector y(n);
        for (int i = 0; i < n; ++i) {
            x.row(i) << u(rng), u(rng);
            y[i] = cls ? (u(rng) > 0 ? 1.0 : -1.0) : 2.0 * u(rng);
        }
        TrainConfig cfg;
        cfg.lambda = l(rng);
        const Kernel k = Kernel::gaussian_rbf(g(rng), 2);
        const auto loss = cls ? SmoothLoss::classification() : SmoothLoss::regression();
        const auto rep = shifted_unshifted_identity_check(WeightedSample::uniform(x, y), k, loss, cfg);
        worst = std::max(worst, rep.max_abs_difference);
        LocalModel m = train(WeightedSample::uniform(x, y), k, loss, cfg);
        g_log.add(m, make_probes(x, 256));
    }
    return {worst <= 1e-8, fmt("max |alpha_L - alpha_L*| %.3g over 50 instances", worst)};
}

Outcome criterion8() {
    std::mt19937_64 rng(kSeed + 8);
    std::uniform_real_distribution<double> u(-2.0, 2.0), g(0.5, 2.0), l(0.05, 2.0), wd(0.1, 1.0);
    double worst_obj = 0.0, worst_grad = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int n = 1 + static_cast<int>(rng() % 6);
        const bool cls = t % 2 == 0;
        Points x(n, 2);
        Vector y(n), w(n);
        for (int i = 0; i < n; ++i) {
            x.row(i) << u(rng), u(rng);
            y[i] = cls ? (u(rng) > 0 ? 1.0 : -1.0) : 2.0 * u(rng);
            w[i] = wd(rng);
        }
        w /= w.sum();
        const WeightedSample s{x, y, w};
        TrainConfig cfg;
        cfg.lambda = l(rng);
        const double gamma = g(rng);
        const Kernel k = Kernel::gaussian_rbf(gamma, 2);
        const auto loss = cls ? SmoothLoss::classification() : SmoothLoss::regression();
        const LocalModel m = train(s, k, loss, cfg);
        g_log.add(m, make_probes(x, 64));
        // objective written out from the definitions
        const auto f = [&](const Eigen::VectorXd& a) {
            double risk = 0.0, reg = 0.0;
            for (int i = 0; i < n; ++i) {
                double fi = 0.0;
                for (int j = 0; j < n; ++j) fi += a[j] * std::exp(-(x.row(i) - x.row(j)).squaredNorm() / (gamma * gamma));
                double li, l0;
                if (cls) {
                    li = std::log1p(std::exp(-y[i] * fi));
                    l0 = std::log(2.0);
                } else {
                    const double e = std::abs(y[i] - fi), e0 = std::abs(y[i]);
                    li = e + 2.0 * std::log1p(std::exp(-e));
                    l0 = e0 + 2.0 * std::log1p(std::exp(-e0));
                }
                risk += w[i] * (li - l0);
                reg += a[i] * fi;
            }
            return risk + cfg.lambda * reg;
        };
        const double brute = oracle::nelder_mead(f, Eigen::VectorXd::Zero(n), 0.5);
        worst_obj = std::max(worst_obj, std::abs(f(m.coefficients) - brute));
        worst_grad = std::max(worst_grad,
                              objective_gradient(m.coefficients, s, k, loss, cfg).lpNorm<Eigen::Infinity>());
    }
    return {worst_obj <= 1e-6 && worst_grad <= 1e-10,
            fmt("max objective gap %.3g, max gradient %.3g over 100 instances", worst_obj, worst_grad)};
}

Outcome criterion9() {
    const SyntheticTask task = sine_task();
    const int ladder[] = {100, 200, 400, 800, 1600};
    const TrendReport rep =
        consistency_trend(task, ladder, LambdaSchedule{1.0, 0.25}, {4, 0.25, 10}, {}, Kernel::gaussian_rbf(1.0, 2), 100000);
    const auto& first = rep.rows.front();
    const auto& last = rep.rows.back();
    const bool ok = last.risk.mean < first.risk.mean && last.risk.mean <= 1.25 * last.global_risk.mean;
    return {ok, fmt("risk(100) %.5f, risk(1600) %.5f, global(1600) %.5f", first.risk.mean, last.risk.mean,
                    last.global_risk.mean)};
}

Outcome criterion10() {
    const Fixture& f = fixture();
    const double grid[] = {2.0, 1.0, 0.5, 0.25, 0.125};
    const auto rows = tradeoff_sweep(f.task, f.n, grid, f.pp, {}, Kernel::gaussian_rbf(1.0, 2), 100000);
    bool doubling = true;
    for (std::size_t i = 1; i < rows.size(); ++i) doubling = doubling && rows[i].if_bound_rough == 2.0 * rows[i - 1].if_bound_rough;
    const bool ok = doubling && rows.back().risk.mean <= rows.front().risk.mean;
    return {ok, fmt("bound doubles exactly: %.0f; risk(lambda=0.125) %.5f vs risk(lambda=2) %.5f", doubling ? 1.0 : 0.0,
                    rows.back().risk.mean, rows.front().risk.mean)};
}

Outcome criterion11() {
    std::vector<std::pair<RegionPartition, Dataset>> partitions;
    const SyntheticTask task = sine_task();
    for (int n : {240, 500, 1600}) {
        const Dataset d = generate(task, n, derive_seed(task.seed, static_cast<std::uint64_t>(n)));
        for (int b : {1, 2, 4}) partitions.emplace_back(regionalize(d.x, b, 0.25, 10, derive_seed(task.seed, 1)), d);
    }
    SyntheticTask moons;
    moons.kind = TaskKind::TwoMoonsClassification;
    moons.noise = 0.2;
    moons.seed = kSeed;
    const Dataset md = generate(moons, 400);
    partitions.emplace_back(regionalize(md.x, 6, 0.0, 10, 3), md);

    std::mt19937_64 rng(kSeed + 11);
    double worst_sum = 0.0;
    std::size_t w2_fail = 0, cover_fail = 0, probes_covered = 0;
    for (const auto& [part, d] : partitions) {
        cover_fail += uncovered_points(part, d.x).size();
        const Vector lo = d.x.colwise().minCoeff().transpose(), hi = d.x.colwise().maxCoeff().transpose();
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (const auto kind : {WeightKind::NormalizedIndicator, WeightKind::SmoothBump}) {
            const WeightScheme scheme{kind, 1.0, part};
            for (int i = 0; i < 10000; ++i) {
                Vector x(d.dim());
                for (Eigen::Index j = 0; j < d.dim(); ++j) x[j] = lo[j] + u(rng) * (hi[j] - lo[j]);
                if (!part.covers(x)) continue;
                ++probes_covered;
                const Vector w = weights_at(scheme, x);
                worst_sum = std::max(worst_sum, std::abs(w.sum() - 1.0));
                for (const auto& r : part.regions) {
                    const bool inside = r.contains(x);
                    if (inside != (w[r.id - 1] != 0.0) || w[r.id - 1] < 0.0) ++w2_fail;
                }
            }
        }
    }
    const bool ok = worst_sum <= 1e-12 && w2_fail == 0 && cover_fail == 0;
    return {ok, fmt("max |sum w - 1| %.3g; support mismatches %.0f; uncovered training points %.0f", worst_sum,
                    static_cast<double>(w2_fail), static_cast<double>(cover_fail))};
}

Outcome criterion7() {
    double worst_prop = -std::numeric_limits<double>::infinity(), worst_h = worst_prop;
    for (const auto& [m, probes] : g_log.models) {
        const double ks = 1.0;  // Gaussian kernels throughout
        const double hn = h_norm(m);
        worst_prop = std::max(worst_prop, predict(m, probes).lpNorm<Eigen::Infinity>() - (hn * ks + 1e-12));
        worst_h = std::max(worst_h, hn - (h_norm_bound(m, ks) + 1e-9));
    }
    return {worst_prop <= 0.0 && worst_h <= 0.0 && !g_log.models.empty(),
            fmt("%.0f models; max Prop. 1 excess %.3g; max H-norm excess %.3g", static_cast<double>(g_log.models.size()),
                worst_prop, worst_h)};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"1  closed-form bound 2 sum 1/lambda_b", criterion1},
        {"2  influence estimate within bound", criterion2},
        {"3  decomposition residual", criterion3},
        {"4  maxbias within bound", criterion4},
        {"5  eps-ladder contraction", criterion5},
        {"6  shifted/unshifted identity", criterion6},
        {"8  Newton vs brute force", criterion8},
        {"9  consistency trend", criterion9},
        {"10 regularization trade-off", criterion10},
        {"11 weight and cover invariants", criterion11},
        {"7  sup-norm and H-norm bounds", criterion7},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s  %-40s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria failed\n", failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
