#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "locsvm/composer.hpp"
#include "locsvm/parallel.hpp"

namespace locsvm {

/// Point mass at z = (x, y).
struct DiracPoint {
    Vector x;
    double y = 0.0;
};

/// Contamination direction: a Dirac delta_z or a distribution Q.
using Contamination = std::variant<DiracPoint, WeightedSample>;

struct ContaminationSpec {
    Contamination kind;
    std::vector<double> eps_ladder{1e-2, 5e-3, 2.5e-3, 1.25e-3};
};

inline void check_eps(double eps) {
    if (!(eps > 0.0 && eps < 0.5)) {
        throw InputError("contamination level must lie in (0, 1/2), got " + std::to_string(eps));
    }
}

inline void validate(const ContaminationSpec& spec) {
    if (spec.eps_ladder.empty()) throw InputError("eps ladder is empty");
    for (std::size_t i = 0; i < spec.eps_ladder.size(); ++i) {
        check_eps(spec.eps_ladder[i]);
        if (i > 0 && !(spec.eps_ladder[i] < spec.eps_ladder[i - 1])) {
            throw InputError("eps ladder must be strictly decreasing");
        }
    }
}

/// Q_b: the part of Q inside the region, renormalized; nullopt when Q puts no mass there.
inline std::optional<WeightedSample> region_part(const WeightedSample& q, const RegionPredicate& region) {
    std::vector<Eigen::Index> idx;
    double mass = 0.0;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        if (q.w[i] > 0.0 && region.contains(q.x.row(i).transpose())) {
            idx.push_back(i);
            mass += q.w[i];
        }
    }
    if (idx.empty()) return std::nullopt;
    WeightedSample out{Points(static_cast<Eigen::Index>(idx.size()), q.dim()),
                       Vector(static_cast<Eigen::Index>(idx.size())), Vector(static_cast<Eigen::Index>(idx.size()))};
    for (std::size_t j = 0; j < idx.size(); ++j) {
        const auto r = static_cast<Eigen::Index>(j);
        out.x.row(r) = q.x.row(idx[j]);
        out.y[r] = q.y[idx[j]];
        out.w[r] = q.w[idx[j]] / mass;
    }
    return out;
}

/// Whether the contamination changes the local problem of `region`.
inline bool touches_region(const Contamination& c, const RegionPredicate& region) {
    if (const auto* z = std::get_if<DiracPoint>(&c)) return region.contains(z->x);
    return region_part(std::get<WeightedSample>(c), region).has_value();
}

/// (1 - eps) P_b + eps delta_z if z lies in the region, (1 - eps) P_b + eps Q_b if Q_b is non-null,
/// P_b otherwise. Contamination atoms are appended after the original points.
inline WeightedSample contaminate_region(const WeightedSample& sample_b, const Contamination& c, double eps,
                                         const RegionPredicate& region) {
    check_eps(eps);
    validate(sample_b);
    WeightedSample atoms;
    if (const auto* z = std::get_if<DiracPoint>(&c)) {
        if (z->x.size() != sample_b.dim()) throw InputError("contaminate_region: dimension mismatch");
        if (!region.contains(z->x)) return sample_b;
        atoms = WeightedSample{Points(1, sample_b.dim()), Vector::Constant(1, z->y), Vector::Ones(1)};
        atoms.x.row(0) = z->x.transpose();
    } else {
        const auto& q = std::get<WeightedSample>(c);
        if (q.dim() != sample_b.dim()) throw InputError("contaminate_region: dimension mismatch");
        auto qb = region_part(q, region);
        if (!qb) return sample_b;
        atoms = std::move(*qb);
    }
    const auto n = sample_b.size();
    const auto m = atoms.size();
    WeightedSample out{Points(n + m, sample_b.dim()), Vector(n + m), Vector(n + m)};
    out.x.topRows(n) = sample_b.x;
    out.x.bottomRows(m) = atoms.x;
    out.y.head(n) = sample_b.y;
    out.y.tail(m) = atoms.y;
    out.w.head(n) = (1.0 - eps) * sample_b.w;
    out.w.tail(m) = eps * atoms.w;
    return out;
}

namespace detail {

/// Trains the local problem of region `id` under contamination, warm-started from the base
/// coefficients padded with zeros.
inline LocalModel train_contaminated(const Dataset& data, const ComposedModel& base, int id, const Contamination& c,
                                     double eps, const TrainConfig& solver) {
    const auto& region = base.scheme.partition.region(id);
    const auto sample = restrict(data, base.scheme.partition, id);
    if (!sample) throw InputError("region " + std::to_string(id) + " carries no data");
    const LocalModel& f = base.local(id);
    if (f.size() != sample->size()) {
        throw InputError("model region " + std::to_string(id) + " has " + std::to_string(f.size()) +
                         " anchors but the data has " + std::to_string(sample->size()) + " points there");
    }
    const WeightedSample mixed = contaminate_region(*sample, c, eps, region);
    TrainConfig cfg = solver;
    cfg.lambda = f.lambda;
    TrainOptions opts;
    opts.region_id = id;
    Vector warm = Vector::Zero(mixed.size());
    warm.head(f.size()) = f.coefficients;
    opts.warm_start = std::move(warm);
    return train(mixed, f.kernel, base.loss, cfg, opts);
}

/// (f_tilde - f) as an expansion over the contaminated anchors, divided by eps.
inline KernelExpansion difference_quotient(const LocalModel& base, const LocalModel& contaminated, double eps) {
    Vector beta = contaminated.coefficients;
    beta.head(base.size()) -= base.coefficients;
    beta /= eps;
    return {contaminated.kernel, contaminated.anchor_points, std::move(beta)};
}

}  // namespace detail

/// One rung of the eps ladder.
struct IfRung {
    double eps = 0.0;
    /// Contaminated local models, keyed by region id; only regions the contamination touches.
    std::map<int, LocalModel> contaminated;
    /// (probes x B) local quotients (f_tilde_b - f_b) / eps; zero columns for untouched regions.
    Matrix local_values;
    /// (f_tilde_comp - f_comp) / eps at the probes.
    Vector composed_values;
    double sup = 0.0;
    /// H_b-norm of each local quotient, keyed by region id (0 for untouched regions).
    std::map<int, double> h_norms;
};

/// Difference-quotient estimate of the local and composed influence functions.
struct InfluenceEstimate {
    std::shared_ptr<const ComposedModel> base;
    Contamination direction;
    Points probes;
    /// (probes x B) weights w_b at the probes.
    Matrix weights;
    std::vector<int> touched_regions;
    std::vector<IfRung> rungs;

    [[nodiscard]] const IfRung& final_rung() const { return rungs.back(); }
    [[nodiscard]] double eps_used() const { return final_rung().eps; }
    [[nodiscard]] double sup_norm_estimate() const { return final_rung().sup; }
    [[nodiscard]] const std::map<int, double>& h_norms() const { return final_rung().h_norms; }

    /// Local quotient of region `id` at an arbitrary x.
    [[nodiscard]] double local(int id, const PointRef& x, std::size_t rung) const {
        const IfRung& r = rungs.at(rung);
        const auto it = r.contaminated.find(id);
        if (it == r.contaminated.end()) return 0.0;
        const LocalModel& f = base->local(id);
        return (predict(it->second, x) - predict(f, x)) / r.eps;
    }
    [[nodiscard]] double local(int id, const PointRef& x) const { return local(id, x, rungs.size() - 1); }

    /// Composed quotient at x, from the contaminated and base composed predictions.
    [[nodiscard]] double composed(const PointRef& x, std::size_t rung) const {
        const IfRung& r = rungs.at(rung);
        const Vector w = weights_with_fallback(base->scheme, x);
        double tilde = 0.0;
        double plain = 0.0;
        for (Eigen::Index b = 0; b < w.size(); ++b) {
            if (w[b] == 0.0) continue;
            const int id = static_cast<int>(b) + 1;
            const double fb = predict(base->local(id), x);
            const auto it = r.contaminated.find(id);
            tilde += w[b] * (it == r.contaminated.end() ? fb : predict(it->second, x));
            plain += w[b] * fb;
        }
        return (tilde - plain) / r.eps;
    }
    [[nodiscard]] double composed(const PointRef& x) const { return composed(x, rungs.size() - 1); }

    /// r_k = sup over probes |q(eps_k) - q(eps_{k+1})|.
    [[nodiscard]] std::vector<double> ladder_residuals() const {
        std::vector<double> out;
        for (std::size_t k = 0; k + 1 < rungs.size(); ++k) {
            out.push_back((rungs[k].composed_values - rungs[k + 1].composed_values).lpNorm<Eigen::Infinity>());
        }
        return out;
    }

    /// r_{k+1} / r_k; 0 when both vanish (identically zero quotient).
    [[nodiscard]] std::vector<double> ladder_ratios() const {
        const auto r = ladder_residuals();
        std::vector<double> out;
        for (std::size_t k = 0; k + 1 < r.size(); ++k) {
            if (r[k] == 0.0) {
                out.push_back(r[k + 1] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
            } else {
                out.push_back(r[k + 1] / r[k]);
            }
        }
        return out;
    }

    [[nodiscard]] bool ladder_converging(double max_ratio = 0.9) const {
        const auto ratios = ladder_ratios();
        return std::all_of(ratios.begin(), ratios.end(), [&](double q) { return q <= max_ratio; });
    }

    /// Second-order constant C2 ~ |dq/deps| from the last two rungs.
    [[nodiscard]] double second_order_constant() const {
        if (rungs.size() < 2) return 0.0;
        const auto& a = rungs[rungs.size() - 2];
        const auto& b = rungs.back();
        return (a.composed_values - b.composed_values).lpNorm<Eigen::Infinity>() / (a.eps - b.eps);
    }

    /// sup |2 q(eps_last) - q(eps_prev)|; diagnostic only.
    [[nodiscard]] double richardson_sup() const {
        if (rungs.size() < 2) return sup_norm_estimate();
        return (2.0 * rungs.back().composed_values - rungs[rungs.size() - 2].composed_values).lpNorm<Eigen::Infinity>();
    }
};

/// Estimates IF_b and IF_comp by difference quotients along the eps ladder. The base model must have
/// been fit on `data` with the same partition.
inline InfluenceEstimate finite_diff_if(const Dataset& data, std::shared_ptr<const ComposedModel> base,
                                        const ContaminationSpec& spec, const Points& probes,
                                        const TrainConfig& solver = {}) {
    validate(spec);
    if (spec.eps_ladder.size() < 2) throw InputError("finite_diff_if: eps ladder needs at least 2 values");
    if (probes.rows() == 0) throw InputError("finite_diff_if: no probes");

    InfluenceEstimate est;
    est.base = base;
    est.direction = spec.kind;
    est.probes = probes;
    est.weights = weight_matrix(base->scheme, probes);
    const Matrix base_local = local_predictions(*base, probes, est.weights);
    const Vector base_composed = est.weights.cwiseProduct(base_local).rowwise().sum();
    const auto nb = static_cast<Eigen::Index>(base->size());

    for (const auto& region : base->scheme.partition.regions) {
        if (!base->is_null_region(region.id) && touches_region(spec.kind, region)) {
            est.touched_regions.push_back(region.id);
        }
    }

    est.rungs.resize(spec.eps_ladder.size());
    const std::size_t jobs = spec.eps_ladder.size() * est.touched_regions.size();
    std::vector<LocalModel> trained(jobs);
    parallel_for(jobs, [&](std::size_t j) {
        const double eps = spec.eps_ladder[j / est.touched_regions.size()];
        const int id = est.touched_regions[j % est.touched_regions.size()];
        trained[j] = detail::train_contaminated(data, *base, id, spec.kind, eps, solver);
    });

    for (std::size_t k = 0; k < spec.eps_ladder.size(); ++k) {
        IfRung& rung = est.rungs[k];
        rung.eps = spec.eps_ladder[k];
        rung.local_values = Matrix::Zero(probes.rows(), nb);
        Matrix tilde_local = base_local;
        for (const auto& region : base->scheme.partition.regions) rung.h_norms[region.id] = 0.0;
        for (std::size_t t = 0; t < est.touched_regions.size(); ++t) {
            const int id = est.touched_regions[t];
            const auto col = static_cast<Eigen::Index>(id - 1);
            LocalModel& m = trained[k * est.touched_regions.size() + t];
            const LocalModel& f = base->local(id);
            const KernelExpansion q = detail::difference_quotient(f, m, rung.eps);
            rung.h_norms[id] = q.h_norm();
            const auto e = m.expansion();
            for (Eigen::Index i = 0; i < probes.rows(); ++i) {
                if (est.weights(i, col) == 0.0) continue;
                const auto x = probes.row(i).transpose();
                tilde_local(i, col) = e(x);
                rung.local_values(i, col) = q(x);
            }
            rung.contaminated.emplace(id, std::move(m));
        }
        const Vector tilde_composed = est.weights.cwiseProduct(tilde_local).rowwise().sum();
        rung.composed_values = (tilde_composed - base_composed) / rung.eps;
        rung.sup = rung.composed_values.lpNorm<Eigen::Infinity>();
    }
    return est;
}

/// max over probes |IF_comp(x) - sum_b w_b(x) IF_b(x)|.
inline double decomposition_check(const InfluenceEstimate& est) {
    const IfRung& r = est.final_rung();
    const Vector recombined = est.weights.cwiseProduct(r.local_values).rowwise().sum();
    return (r.composed_values - recombined).lpNorm<Eigen::Infinity>();
}

/// Same check at arbitrary points through the pointwise accessors.
inline double decomposition_check(const InfluenceEstimate& est, const Points& probes) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < probes.rows(); ++i) {
        const auto x = probes.row(i).transpose();
        const Vector w = weights_with_fallback(est.base->scheme, x);
        double s = 0.0;
        for (Eigen::Index b = 0; b < w.size(); ++b) {
            if (w[b] != 0.0) s += w[b] * est.local(static_cast<int>(b) + 1, x);
        }
        worst = std::max(worst, std::abs(est.composed(x) - s));
    }
    return worst;
}

/// One summand of the influence / maxbias bounds.
struct RegionTerm {
    int id = 0;
    double weight_sup = 1.0;
    double lambda = 1.0;
    double kernel_sup = 1.0;
    /// False when kernel_sup is an empirical lower bound of the true sup.
    bool kernel_sup_exact = true;

    /// |w_b| |k_b|^2 / lambda_b.
    [[nodiscard]] double value() const { return weight_sup * kernel_sup * kernel_sup / lambda; }
};

struct BoundReport {
    double lipschitz = 1.0;
    std::vector<RegionTerm> terms;
    /// 2 |L|_1 sum_b |w_b| |k_b|^2 / lambda_b.
    double if_bound_rough = 0.0;

    [[nodiscard]] bool all_exact() const {
        return std::all_of(terms.begin(), terms.end(), [](const RegionTerm& t) { return t.kernel_sup_exact; });
    }
};

inline double if_bound_from_terms(double lipschitz, std::span<const RegionTerm> terms) {
    double s = 0.0;
    for (const auto& t : terms) s += t.value();
    return 2.0 * lipschitz * s;
}

/// Closed-form upper bound of sup |IF_comp| with itemized region terms. Weight and (non-RBF) kernel
/// sup-norms are taken over the probes.
inline BoundReport if_bound(const ComposedModel& model, const Points& probes) {
    BoundReport rep;
    rep.lipschitz = SmoothLoss::lipschitz_constant();
    for (const auto& region : model.scheme.partition.regions) {
        const LocalModel& f = model.local(region.id);
        const KernelSupNorm ks = sup_norm_on_region(f.kernel, region, probes);
        rep.terms.push_back(RegionTerm{region.id, weight_sup_norm(model.scheme, region.id, probes), f.lambda,
                                       ks.value, !ks.is_lower_bound()});
    }
    rep.if_bound_rough = if_bound_from_terms(rep.lipschitz, rep.terms);
    return rep;
}

/// 2 |L|_1 sum_b |w_b| (eps_b / lambda_b) |k_b|^2. `eps` holds one shared level or one per region.
inline double maxbias_bound(const BoundReport& rep, std::span<const double> eps) {
    if (eps.size() != 1 && eps.size() != rep.terms.size()) throw InputError("maxbias_bound: eps size mismatch");
    double s = 0.0;
    for (std::size_t b = 0; b < rep.terms.size(); ++b) {
        const double e = eps.size() == 1 ? eps[0] : eps[b];
        s += e * rep.terms[b].value();
    }
    return 2.0 * rep.lipschitz * s;
}

/// |D_b - delta_z|_TV = 2 (1 - D_b({z})) for a discrete D_b.
inline double tv_distance_to_dirac(const WeightedSample& sample, const DiracPoint& z) {
    double atom = 0.0;
    for (Eigen::Index i = 0; i < sample.size(); ++i) {
        if (sample.y[i] == z.y && sample.x.row(i).transpose() == z.x) atom += sample.w[i];
    }
    return 2.0 * (1.0 - std::min(1.0, atom));
}

struct TvRefinedBound {
    double value = 0.0;
    /// TV_b per region id; regions not containing z carry 0 (their local influence vanishes).
    std::map<int, double> tv;
};

/// sum over regions containing z of |w_b| |k_b|^2 / lambda_b |L|_1 TV_b. Never exceeds the rough bound.
inline TvRefinedBound tv_refined_if_bound(const BoundReport& rep, const ComposedModel& model, const Dataset& data,
                                          const DiracPoint& z) {
    TvRefinedBound out;
    double s = 0.0;
    for (const auto& t : rep.terms) {
        const auto& region = model.scheme.partition.region(t.id);
        double tv = 0.0;
        if (region.contains(z.x)) {
            if (const auto sample = restrict(data, model.scheme.partition, t.id)) tv = tv_distance_to_dirac(*sample, z);
        }
        out.tv[t.id] = tv;
        s += t.value() * tv;
    }
    out.value = rep.lipschitz * s;
    return out;
}

struct MaxbiasReport {
    double bound = 0.0;
    /// sup over probes of |f_comp(Q) - f_comp(P)| per candidate.
    std::vector<double> candidate_sup;
    double empirical_max = 0.0;
    [[nodiscard]] bool satisfied() const { return empirical_max <= bound; }
};

/// Composed predictor under full contamination (1 - eps_b) P_b + eps_b Q_b in each region.
inline ComposedModel contaminated_composed(const Dataset& data, const ComposedModel& base, std::span<const double> eps,
                                           const Contamination& q, const TrainConfig& solver = {}) {
    ComposedModel out = base;
    for (const auto& region : base.scheme.partition.regions) {
        const double e = eps.size() == 1 ? eps[0] : eps[static_cast<std::size_t>(region.id - 1)];
        if (e == 0.0 || base.is_null_region(region.id) || !touches_region(q, region)) continue;
        out.locals[static_cast<std::size_t>(region.id - 1)] =
            detail::train_contaminated(data, base, region.id, q, e, solver);
    }
    return out;
}

/// Empirical maxbias over a finite candidate family, compared with the closed-form bound.
inline MaxbiasReport maxbias_probe(const Dataset& data, const ComposedModel& base, std::span<const double> eps,
                                   std::span<const Contamination> candidates, const Points& probes,
                                   const TrainConfig& solver = {}) {
    if (eps.size() != 1 && eps.size() != base.size()) throw InputError("maxbias_probe: eps size mismatch");
    for (double e : eps) {
        if (!(e >= 0.0 && e < 0.5)) throw InputError("maxbias eps must lie in [0, 1/2), got " + std::to_string(e));
    }
    MaxbiasReport rep;
    rep.bound = maxbias_bound(if_bound(base, probes), eps);
    const Vector f0 = predict_composed(base, probes);
    rep.candidate_sup.assign(candidates.size(), 0.0);
    parallel_for(candidates.size(), [&](std::size_t c) {
        const ComposedModel q = contaminated_composed(data, base, eps, candidates[c], solver);
        rep.candidate_sup[c] = (predict_composed(q, probes) - f0).lpNorm<Eigen::Infinity>();
    });
    for (double s : rep.candidate_sup) rep.empirical_max = std::max(rep.empirical_max, s);
    return rep;
}

/// Label range used to build extreme labels.
inline std::pair<double, double> extreme_labels(const Dataset& data, const SmoothLoss& loss) {
    if (loss.is_classification()) return {-1.0, 1.0};
    const double lo = data.y.minCoeff();
    const double hi = data.y.maxCoeff();
    const double range = hi - lo;
    return {lo - 3.0 * range, hi + 3.0 * range};
}

/// Diracs at the bounding-box corners and center, each with both extreme labels, plus the
/// label-flipped empirical measure. More than 6 inputs use the 2d axis extremes instead of corners.
inline std::vector<Contamination> adversarial_candidates(const Dataset& data, const SmoothLoss& loss) {
    const Vector lo = data.x.colwise().minCoeff().transpose();
    const Vector hi = data.x.colwise().maxCoeff().transpose();
    const auto d = data.dim();
    std::vector<Vector> sites;
    if (d <= 6) {
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
            Vector v(d);
            for (Eigen::Index j = 0; j < d; ++j) v[j] = ((mask >> j) & 1U) != 0 ? hi[j] : lo[j];
            sites.push_back(v);
        }
    } else {
        const Vector mid = 0.5 * (lo + hi);
        for (Eigen::Index j = 0; j < d; ++j) {
            Vector a = mid, b = mid;
            a[j] = lo[j];
            b[j] = hi[j];
            sites.push_back(a);
            sites.push_back(b);
        }
    }
    sites.push_back(0.5 * (lo + hi));
    const auto [ylo, yhi] = extreme_labels(data, loss);
    std::vector<Contamination> out;
    for (const auto& s : sites) {
        out.emplace_back(DiracPoint{s, ylo});
        out.emplace_back(DiracPoint{s, yhi});
    }
    Vector flipped = data.y;
    if (loss.is_classification()) {
        flipped = -data.y;
    } else {
        flipped = Vector::Constant(data.size(), data.y.minCoeff() + data.y.maxCoeff()) - data.y;
    }
    out.emplace_back(WeightedSample::uniform(data.x, std::move(flipped)));
    return out;
}

/// Halton point i (1-based) in [0,1)^d.
inline Vector halton(std::uint64_t index, Eigen::Index dim) {
    static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
    if (dim > static_cast<Eigen::Index>(std::size(primes))) throw InputError("halton: dimension above 20");
    Vector v(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        const auto base = static_cast<std::uint64_t>(primes[j]);
        double f = 1.0, r = 0.0;
        for (std::uint64_t i = index; i > 0; i /= base) {
            f /= static_cast<double>(base);
            r += f * static_cast<double>(i % base);
        }
        v[j] = r;
    }
    return v;
}

/// Training inputs followed by `count` Halton points scaled to the data bounding box.
inline Points make_probes(const Points& x, int count = 512) {
    const Vector lo = x.colwise().minCoeff().transpose();
    const Vector hi = x.colwise().maxCoeff().transpose();
    Points p(x.rows() + count, x.cols());
    p.topRows(x.rows()) = x;
    for (int i = 0; i < count; ++i) {
        const Vector u = halton(static_cast<std::uint64_t>(i) + 1, x.cols());
        p.row(x.rows() + i) = (lo + u.cwiseProduct(hi - lo)).transpose();
    }
    return p;
}

/// Diracs on a per_dim^d grid over the data bounding box; labels alternate between the two
/// extremes in checkerboard order.
inline std::vector<DiracPoint> dirac_grid(const Dataset& data, const SmoothLoss& loss, int per_dim) {
    if (per_dim < 1) throw InputError("dirac_grid: per_dim must be positive");
    const Vector lo = data.x.colwise().minCoeff().transpose();
    const Vector hi = data.x.colwise().maxCoeff().transpose();
    const auto d = data.dim();
    const auto [ylo, yhi] = extreme_labels(data, loss);
    std::size_t total = 1;
    for (Eigen::Index j = 0; j < d; ++j) total *= static_cast<std::size_t>(per_dim);
    std::vector<DiracPoint> out;
    out.reserve(total);
    for (std::size_t k = 0; k < total; ++k) {
        Vector v(d);
        std::size_t rest = k, parity = 0;
        for (Eigen::Index j = 0; j < d; ++j) {
            const auto step = rest % static_cast<std::size_t>(per_dim);
            rest /= static_cast<std::size_t>(per_dim);
            parity += step;
            const double u = per_dim == 1 ? 0.5 : static_cast<double>(step) / (per_dim - 1);
            v[j] = per_dim > 1 && step + 1 == static_cast<std::size_t>(per_dim) ? hi[j] : lo[j] + u * (hi[j] - lo[j]);
        }
        out.push_back(DiracPoint{v, parity % 2 == 0 ? yhi : ylo});
    }
    return out;
}

}  // namespace locsvm
