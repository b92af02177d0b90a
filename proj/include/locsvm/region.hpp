#pragma once

#include "locsvm/types.hpp"

namespace locsvm {

/// Euclidean distance; membership tests and radius construction both go through here so that a
/// point at exactly the radius is classified consistently.
inline double distance(const PointRef& a, const PointRef& b) { return (a - b).norm(); }

/// Closed ball {x : |x - center| <= radius}. Ids run 1..B.
struct RegionPredicate {
    Vector center;
    double radius = 0.0;
    int id = 1;

    [[nodiscard]] bool contains(const PointRef& x) const {
        if (x.size() != center.size()) throw InputError("region: dimension mismatch");
        return distance(x, center) <= radius;
    }

    /// Signed gap to the boundary; negative inside.
    [[nodiscard]] double boundary_gap(const PointRef& x) const {
        return distance(x, center) - radius;
    }
};

}  // namespace locsvm
