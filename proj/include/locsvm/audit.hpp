#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "locsvm/robustness.hpp"

namespace locsvm {

struct AuditOptions {
    std::vector<double> eps_ladder{1e-2, 5e-3, 2.5e-3, 1.25e-3};
    int probe_count = 512;
    /// Uniform maxbias contamination level; negative disables the maxbias probe.
    double maxbias_eps = 0.1;
    double max_ladder_ratio = 0.9;
    /// Absolute slack on the per-region H-norm check.
    double h_norm_slack = 1e-3;
    TrainConfig solver;
};

struct RungSummary {
    double eps = 0.0;
    double sup = 0.0;
    std::map<int, double> h_norms;
};

/// Audit of one Dirac contamination point.
struct PointAudit {
    DiracPoint z;
    std::vector<int> touched_regions;
    double if_sup = 0.0;
    double richardson_sup = 0.0;
    double second_order = 0.0;
    /// 10 (grad_tol / eps + eps C2).
    double slack = 0.0;
    double if_bound_tv = 0.0;
    std::map<int, double> tv;
    std::vector<RungSummary> ladder;
    std::vector<double> ladder_ratios;
    bool ladder_converging = true;
    double decomposition_residual = 0.0;
    bool if_ok = true;
    bool h_norm_ok = true;
};

struct AuditReport {
    BoundReport bounds;
    double maxbias_eps = 0.0;
    double maxbias_bound = 0.0;
    std::optional<MaxbiasReport> maxbias;
    std::vector<PointAudit> points;
    double if_sup = 0.0;
    double if_bound_tv = 0.0;
    double decomposition_residual = 0.0;
    std::size_t coverage_violations = 0;
    std::vector<std::string> warnings;

    [[nodiscard]] bool if_satisfied() const {
        return std::all_of(points.begin(), points.end(), [](const PointAudit& p) { return p.if_ok && p.h_norm_ok; });
    }
    [[nodiscard]] bool maxbias_satisfied() const { return !maxbias || maxbias->satisfied(); }
    [[nodiscard]] bool satisfied() const { return if_satisfied() && maxbias_satisfied(); }
};

/// Full robustness audit: closed-form bounds, influence estimates for each z, maxbias probe.
inline AuditReport audit(const Dataset& data, const std::shared_ptr<const ComposedModel>& model,
                         std::span<const DiracPoint> zs, const AuditOptions& opts) {
    const Points probes = make_probes(data.x, opts.probe_count);
    AuditReport rep;
    rep.bounds = if_bound(*model, probes);
    for (const auto& t : rep.bounds.terms) {
        if (!t.kernel_sup_exact) {
            rep.warnings.push_back("region " + std::to_string(t.id) +
                                   ": kernel sup-norm is an empirical lower bound of |k|, hence the bound may be "
                                   "underestimated");
        }
    }
    rep.coverage_violations = uncovered_points(model->scheme.partition, probes).size();
    if (rep.coverage_violations > 0) {
        rep.warnings.push_back(std::to_string(rep.coverage_violations) +
                               " probes lie outside every region and use the nearest region's predictor");
    }

    rep.points.resize(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) {
        const DiracPoint& z = zs[i];
        PointAudit& pa = rep.points[i];
        pa.z = z;
        const InfluenceEstimate est = finite_diff_if(data, model, ContaminationSpec{z, opts.eps_ladder}, probes, opts.solver);
        pa.touched_regions = est.touched_regions;
        pa.if_sup = est.sup_norm_estimate();
        pa.richardson_sup = est.richardson_sup();
        pa.second_order = est.second_order_constant();
        pa.slack = 10.0 * (opts.solver.grad_tol / est.eps_used() + est.eps_used() * pa.second_order);
        const TvRefinedBound tvb = tv_refined_if_bound(rep.bounds, *model, data, z);
        pa.if_bound_tv = tvb.value;
        pa.tv = tvb.tv;
        for (const auto& r : est.rungs) pa.ladder.push_back({r.eps, r.sup, r.h_norms});
        pa.ladder_ratios = est.ladder_ratios();
        pa.ladder_converging = est.ladder_converging(opts.max_ladder_ratio);
        pa.decomposition_residual = decomposition_check(est);
        pa.if_ok = pa.if_sup <= rep.bounds.if_bound_rough + pa.slack;
        for (const auto& t : rep.bounds.terms) {
            const double limit = t.kernel_sup * rep.bounds.lipschitz * pa.tv.at(t.id) / t.lambda;
            if (est.h_norms().at(t.id) > limit + opts.h_norm_slack) pa.h_norm_ok = false;
        }
        if (!pa.ladder_converging) {
            rep.warnings.push_back("z #" + std::to_string(i) + ": eps ladder residuals do not contract");
        }
        rep.if_sup = std::max(rep.if_sup, pa.if_sup);
        rep.if_bound_tv = std::max(rep.if_bound_tv, pa.if_bound_tv);
        rep.decomposition_residual = std::max(rep.decomposition_residual, pa.decomposition_residual);
    }

    if (opts.maxbias_eps >= 0.0) {
        rep.maxbias_eps = opts.maxbias_eps;
        const double eps[] = {opts.maxbias_eps};
        rep.maxbias_bound = maxbias_bound(rep.bounds, eps);
        const auto candidates = adversarial_candidates(data, model->loss);
        rep.maxbias = maxbias_probe(data, *model, eps, candidates, probes, opts.solver);
    }
    return rep;
}

}  // namespace locsvm
