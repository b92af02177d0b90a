#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "locsvm/region.hpp"
#include "locsvm/rng.hpp"
#include "locsvm/types.hpp"

namespace locsvm {

/// Possibly overlapping closed balls covering the training inputs.
///
/// Closed balls in R^d are separable and complete, so only the cover and minimum-size conditions
/// need checking at runtime.
struct RegionPartition {
    std::vector<RegionPredicate> regions;
    double overlap_factor = 0.0;
    int min_region_size = 1;

    [[nodiscard]] std::size_t size() const { return regions.size(); }
    [[nodiscard]] const RegionPredicate& region(int id) const { return regions.at(static_cast<std::size_t>(id - 1)); }

    /// Ids of all regions containing x, ascending.
    [[nodiscard]] std::vector<int> containing(const PointRef& x) const {
        std::vector<int> ids;
        for (const auto& r : regions) {
            if (r.contains(x)) ids.push_back(r.id);
        }
        return ids;
    }

    [[nodiscard]] bool covers(const PointRef& x) const {
        return std::any_of(regions.begin(), regions.end(), [&](const RegionPredicate& r) { return r.contains(x); });
    }

    /// Region whose boundary is closest to x; lowest id wins ties.
    [[nodiscard]] int nearest(const PointRef& x) const {
        int best = regions.front().id;
        double gap = std::numeric_limits<double>::infinity();
        for (const auto& r : regions) {
            const double g = r.boundary_gap(x);
            if (g < gap) {
                gap = g;
                best = r.id;
            }
        }
        return best;
    }
};

namespace detail {

inline int nearest_center(const Points& centers, const std::vector<bool>& alive, const PointRef& x) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
        if (!alive[static_cast<std::size_t>(c)]) continue;
        const double d = (x - centers.row(c).transpose()).squaredNorm();
        if (d < bd) {  // strict: lowest index wins ties
            bd = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

inline Points kmeans_plus_plus(const Points& pts, int k, Rng& rng) {
    const auto n = pts.rows();
    Points centers(k, pts.cols());
    centers.row(0) = pts.row(static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n))));
    Vector d2(n);
    for (Eigen::Index i = 0; i < n; ++i) d2[i] = (pts.row(i) - centers.row(0)).squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = d2.sum();
        Eigen::Index pick = 0;
        if (total > 0.0) {
            const double u = rng.uniform() * total;
            double acc = 0.0;
            pick = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += d2[i];
                if (u < acc) {
                    pick = i;
                    break;
                }
            }
        }
        centers.row(c) = pts.row(pick);
        for (Eigen::Index i = 0; i < n; ++i) d2[i] = std::min(d2[i], (pts.row(i) - centers.row(c)).squaredNorm());
    }
    return centers;
}

}  // namespace detail

/// k-means (k-means++ seeding, at most 100 Lloyd iterations) followed by merging of undersized
/// clusters into their points' nearest surviving centers. Region b is the ball around c_b with
/// radius (1 + tau) times the largest distance to an assigned point.
inline RegionPartition regionalize(const Points& points, int b_target, double tau, int min_region_size,
                                   std::uint64_t seed) {
    if (b_target < 1) throw InputError("regionalize: B_target must be positive");
    if (min_region_size < 1) throw InputError("regionalize: min_region_size must be positive");
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw InputError("regionalize: tau must be nonnegative");
    const auto n = points.rows();
    if (n < static_cast<Eigen::Index>(b_target) * min_region_size) {
        throw InputError("regionalize: " + std::to_string(n) + " points cannot fill " + std::to_string(b_target) +
                         " regions of size " + std::to_string(min_region_size));
    }

    Rng rng(seed);
    Points centers = detail::kmeans_plus_plus(points, b_target, rng);
    std::vector<bool> alive(static_cast<std::size_t>(b_target), true);
    std::vector<int> assign(static_cast<std::size_t>(n), -1);

    constexpr int max_lloyd = 100;
    for (int it = 0; it < max_lloyd; ++it) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            const int c = detail::nearest_center(centers, alive, points.row(i).transpose());
            if (c != assign[static_cast<std::size_t>(i)]) {
                assign[static_cast<std::size_t>(i)] = c;
                changed = true;
            }
        }
        if (!changed && it > 0) break;
        Points sums = Points::Zero(b_target, points.cols());
        std::vector<int> counts(static_cast<std::size_t>(b_target), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(assign[static_cast<std::size_t>(i)]);
            sums.row(static_cast<Eigen::Index>(c)) += points.row(i);
            ++counts[c];
        }
        for (int c = 0; c < b_target; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
            }
        }
    }

    // merge undersized clusters, smallest first
    for (;;) {
        std::vector<int> counts(static_cast<std::size_t>(b_target), 0);
        for (int a : assign) ++counts[static_cast<std::size_t>(a)];
        int victim = -1;
        int alive_count = 0;
        for (int c = 0; c < b_target; ++c) {
            if (!alive[static_cast<std::size_t>(c)]) continue;
            ++alive_count;
            if (counts[static_cast<std::size_t>(c)] < min_region_size &&
                (victim < 0 || counts[static_cast<std::size_t>(c)] < counts[static_cast<std::size_t>(victim)])) {
                victim = c;
            }
        }
        if (victim < 0 || alive_count == 1) break;
        alive[static_cast<std::size_t>(victim)] = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (assign[static_cast<std::size_t>(i)] == victim) {
                assign[static_cast<std::size_t>(i)] = detail::nearest_center(centers, alive, points.row(i).transpose());
            }
        }
    }

    RegionPartition part;
    part.overlap_factor = tau;
    part.min_region_size = min_region_size;
    int next_id = 1;
    for (int c = 0; c < b_target; ++c) {
        if (!alive[static_cast<std::size_t>(c)]) continue;
        double r = 0.0;
        bool any = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (assign[static_cast<std::size_t>(i)] != c) continue;
            any = true;
            r = std::max(r, distance(points.row(i).transpose(), centers.row(c).transpose()));
        }
        if (!any) continue;
        part.regions.push_back(RegionPredicate{centers.row(c).transpose(), (1.0 + tau) * r, next_id++});
    }
    return part;
}

enum class WeightKind { NormalizedIndicator, SmoothBump };

/// Pointwise convex combination weights: sum_b w_b(x) = 1 on covered x, w_b = 0 outside region b.
struct WeightScheme {
    WeightKind kind = WeightKind::NormalizedIndicator;
    /// SmoothBump only.
    double bandwidth = 1.0;
    RegionPartition partition;

    [[nodiscard]] std::size_t size() const { return partition.size(); }
};

inline std::string_view weight_kind_name(WeightKind k) {
    return k == WeightKind::NormalizedIndicator ? "normalized-indicator" : "smooth-bump";
}

inline WeightKind parse_weight_kind(std::string_view s) {
    if (s == "normalized-indicator") return WeightKind::NormalizedIndicator;
    if (s == "smooth-bump") return WeightKind::SmoothBump;
    throw InputError("unknown weight scheme '" + std::string(s) + "'");
}

/// Weights of all B regions at x; throws CoverageError when x lies in no region.
inline Vector weights_at(const WeightScheme& scheme, const PointRef& x) {
    const auto& regions = scheme.partition.regions;
    Vector w = Vector::Zero(static_cast<Eigen::Index>(regions.size()));
    std::vector<std::size_t> in;
    for (std::size_t b = 0; b < regions.size(); ++b) {
        if (regions[b].contains(x)) in.push_back(b);
    }
    if (in.empty()) throw CoverageError("weights_at: point lies in no region");
    if (scheme.kind == WeightKind::NormalizedIndicator) {
        const double v = 1.0 / static_cast<double>(in.size());
        for (auto b : in) w[static_cast<Eigen::Index>(b)] = v;
        return w;
    }
    if (!(scheme.bandwidth > 0.0)) throw InputError("smooth-bump: bandwidth must be positive");
    const double h2 = scheme.bandwidth * scheme.bandwidth;
    double dmin = std::numeric_limits<double>::infinity();
    for (auto b : in) dmin = std::min(dmin, (x - regions[b].center).squaredNorm());
    double total = 0.0;
    for (auto b : in) {
        const double v = std::exp(-((x - regions[b].center).squaredNorm() - dmin) / h2);
        w[static_cast<Eigen::Index>(b)] = v;
        total += v;
    }
    return w / total;
}

/// Weights with the nearest-region fallback for uncovered points (unit vector on that region).
inline Vector weights_with_fallback(const WeightScheme& scheme, const PointRef& x, bool* covered = nullptr) {
    if (scheme.partition.covers(x)) {
        if (covered) *covered = true;
        return weights_at(scheme, x);
    }
    if (covered) *covered = false;
    Vector w = Vector::Zero(static_cast<Eigen::Index>(scheme.size()));
    w[scheme.partition.nearest(x) - 1] = 1.0;
    return w;
}

/// sup of w_b over region `id`, estimated on probes. Exactly 1 as soon as one probe lies in region
/// `id` alone; 1 (the a-priori bound) when no probe hits the region.
inline double weight_sup_norm(const WeightScheme& scheme, int id, const Points& probes) {
    const auto& region = scheme.partition.region(id);
    double best = 0.0;
    bool any = false;
    for (Eigen::Index i = 0; i < probes.rows(); ++i) {
        const auto x = probes.row(i).transpose();
        if (!region.contains(x)) continue;
        any = true;
        const auto ids = scheme.partition.containing(x);
        if (ids.size() == 1) return 1.0;
        best = std::max(best, weights_at(scheme, x)[id - 1]);
    }
    return any ? best : 1.0;
}

/// D_{n,b}: the points of `data` inside region `id` with weights 1/n_b; nullopt when n_b = 0.
inline std::optional<WeightedSample> restrict(const Dataset& data, const RegionPartition& partition, int id) {
    check_dataset(data);
    const auto& region = partition.region(id);
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        if (region.contains(data.x.row(i).transpose())) idx.push_back(i);
    }
    if (idx.empty()) return std::nullopt;
    Points x(static_cast<Eigen::Index>(idx.size()), data.dim());
    Vector y(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) {
        x.row(static_cast<Eigen::Index>(j)) = data.x.row(idx[j]);
        y[static_cast<Eigen::Index>(j)] = data.y[idx[j]];
    }
    return WeightedSample::uniform(std::move(x), std::move(y));
}

/// Training points in no region; empty after a successful regionalize.
inline std::vector<Eigen::Index> uncovered_points(const RegionPartition& partition, const Points& points) {
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        if (!partition.covers(points.row(i).transpose())) out.push_back(i);
    }
    return out;
}

}  // namespace locsvm
