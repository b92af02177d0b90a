// Fits a four-region model on noisy sine data and audits the influence of one contaminating point.
#include <cstdio>
#include <memory>

#include "locsvm/locsvm.hpp"

int main() {
    using namespace locsvm;
    const SyntheticTask task{TaskKind::SineRegression, 0.2, 2, 7, {}};
    const Dataset data = generate(task, 400);
    const RegionPartition part = regionalize(data.x, 4, 0.25, 20, 1);
    const WeightScheme scheme{WeightKind::NormalizedIndicator, 1.0, part};
    const LocalConfig cfg[] = {{Kernel::gaussian_rbf(1.0, 2), 0.5}};
    auto model = std::make_shared<const ComposedModel>(fit_composed(data, scheme, cfg, task.loss()));

    const Points probes = make_probes(data.x);
    const BoundReport bounds = if_bound(*model, probes);
    const DiracPoint z{Vector::Zero(2), 8.0};
    const InfluenceEstimate est = finite_diff_if(data, model, ContaminationSpec{z}, probes);

    std::printf("regions: %zu\n", model->size());
    std::printf("sup |IF| estimate: %.6f (eps = %g)\n", est.sup_norm_estimate(), est.eps_used());
    std::printf("closed-form bound: %.6f\n", bounds.if_bound_rough);
    std::printf("decomposition residual: %.3g\n", decomposition_check(est));
    return est.sup_norm_estimate() <= bounds.if_bound_rough ? 0 : 1;
}
