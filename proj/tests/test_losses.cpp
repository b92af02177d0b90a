#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "locsvm/losses.hpp"

using namespace locsvm;

namespace {

// Direct textbook formulas, used as the reference away from overflow.
double naive_classification(double y, double t) { return std::log(1.0 + std::exp(-y * t)); }
double naive_regression(double y, double t) {
    const double e = std::exp(y - t);
    return -std::log(4.0 * e / ((1.0 + e) * (1.0 + e)));
}

struct Draw {
    double y, t, s;
};

std::vector<Draw> draws(const SmoothLoss& loss, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-8.0, 8.0);
    std::vector<Draw> out;
    for (int i = 0; i < n; ++i) {
        const double y = loss.is_classification() ? (u(rng) > 0 ? 1.0 : -1.0) : u(rng);
        out.push_back({y, u(rng), u(rng)});
    }
    return out;
}

const SmoothLoss kLosses[] = {SmoothLoss::classification(), SmoothLoss::regression()};

}  // namespace

TEST(LossValue, ClassificationAtZero) {
    EXPECT_NEAR(SmoothLoss::classification().value(1.0, 0.0), std::numbers::ln2, 1e-16);
}

TEST(LossValue, RegressionMinimumIsZero) {
    const auto l = SmoothLoss::regression();
    EXPECT_EQ(l.value(0.7, 0.7), 0.0);
    EXPECT_EQ(l.value(-3.0, -3.0), 0.0);
}

TEST(LossValue, ClassificationTailIsStable) {
    // ln1p(exp(-35))
    EXPECT_NEAR(SmoothLoss::classification().value(1.0, 35.0), 6.305116760146989e-16, 1e-28);
}

TEST(LossValue, MatchesNaiveFormulas) {
    for (const auto& d : draws(SmoothLoss::classification(), 200, 1)) {
        EXPECT_NEAR(SmoothLoss::classification().value(d.y, d.t), naive_classification(d.y, d.t), 1e-12);
    }
    for (const auto& d : draws(SmoothLoss::regression(), 200, 2)) {
        EXPECT_NEAR(SmoothLoss::regression().value(d.y, d.t), naive_regression(d.y, d.t), 1e-12);
    }
}

TEST(LossValue, NoOverflowAt700) {
    for (const auto& l : kLosses) {
        for (double t : {-700.0, 700.0}) {
            const double v = l.value(1.0, t);
            EXPECT_TRUE(std::isfinite(v));
            EXPECT_GE(v, 0.0);
            EXPECT_TRUE(std::isfinite(l.dt(1.0, t)));
            EXPECT_TRUE(std::isfinite(l.dtt(1.0, t)));
        }
    }
    // Regression grows like |y - t| - ln 4 in the tail.
    EXPECT_NEAR(SmoothLoss::regression().value(0.0, 700.0), 700.0 - std::log(4.0), 1e-9);
}

TEST(LossValue, InvalidClassificationLabel) {
    EXPECT_THROW(SmoothLoss::classification().value(0.5, 0.0), InputError);
    EXPECT_THROW(SmoothLoss::classification().dt(0.0, 0.0), InputError);
    EXPECT_THROW(SmoothLoss::regression().value(std::nan(""), 0.0), InputError);
    EXPECT_THROW(parse_loss("hinge"), InputError);
}

TEST(ShiftedLoss, VanishesAtZero) {
    for (const auto& l : kLosses) {
        for (const auto& d : draws(l, 50, 3)) EXPECT_EQ(l.shifted_value(d.y, 0.0), 0.0);
    }
}

TEST(ShiftedLoss, ClassificationAtOne) {
    EXPECT_NEAR(SmoothLoss::classification().shifted_value(1.0, 1.0), std::log1p(std::exp(-1.0)) - std::log(2.0),
                1e-15);
    EXPECT_NEAR(SmoothLoss::classification().shifted_value(1.0, 1.0), -0.37988549304172244, 1e-15);
}

TEST(ShiftedLoss, RegressionBruteForce) {
    const double expected = naive_regression(0.0, 1.0) - naive_regression(0.0, 0.0);
    EXPECT_NEAR(SmoothLoss::regression().shifted_value(0.0, 1.0), expected, 1e-14);
}

TEST(ShiftedLoss, IdentityHoldsToRounding) {
    for (const auto& l : kLosses) {
        for (const auto& d : draws(l, 500, 4)) {
            EXPECT_NEAR(l.shifted_value(d.y, d.t) - l.value(d.y, d.t) + l.value(d.y, 0.0), 0.0, 1e-14);
        }
    }
}

TEST(ShiftedLoss, ViewSharesDerivativesAndConstant) {
    for (const auto& l : kLosses) {
        const ShiftedLossView v{l};
        EXPECT_EQ(v.lipschitz_constant(), l.lipschitz_constant());
        for (const auto& d : draws(l, 50, 5)) {
            EXPECT_EQ(v.dt(d.y, d.t), l.dt(d.y, d.t));
            EXPECT_EQ(v.dtt(d.y, d.t), l.dtt(d.y, d.t));
            EXPECT_EQ(v.value(d.y, d.t), l.shifted_value(d.y, d.t));
        }
    }
}

TEST(LossDerivative, ClassificationAtZero) {
    EXPECT_DOUBLE_EQ(SmoothLoss::classification().dt(1.0, 0.0), -0.5);
    EXPECT_DOUBLE_EQ(SmoothLoss::classification().dtt(1.0, 0.0), 0.25);
}

TEST(LossDerivative, RegressionZeroAtMinimum) {
    EXPECT_EQ(SmoothLoss::regression().dt(1.3, 1.3), 0.0);
    EXPECT_DOUBLE_EQ(SmoothLoss::regression().dtt(1.3, 1.3), 0.5);
}

// Central differences with h = 1e-6 against the analytic derivatives.
TEST(LossDerivative, GradientCheck) {
    const double h = 1e-6;
    for (const auto& l : kLosses) {
        for (const auto& d : draws(l, 1000, 6)) {
            const double fd1 = (l.value(d.y, d.t + h) - l.value(d.y, d.t - h)) / (2 * h);
            const double dt = l.dt(d.y, d.t);
            EXPECT_LE(std::abs(dt - fd1), 1e-6 * (1.0 + std::abs(dt)));
            const double fd2 = (l.dt(d.y, d.t + h) - l.dt(d.y, d.t - h)) / (2 * h);
            const double dtt = l.dtt(d.y, d.t);
            EXPECT_LE(std::abs(dtt - fd2), 1e-6 * (1.0 + std::abs(dtt)));
        }
    }
}

TEST(LossProperties, ConvexityAndLipschitz) {
    for (const auto& l : kLosses) {
        for (const auto& d : draws(l, 2000, 7)) {
            const double mid = l.value(d.y, 0.5 * (d.t + d.s));
            EXPECT_LE(mid, 0.5 * (l.value(d.y, d.t) + l.value(d.y, d.s)) + 1e-12);
            EXPECT_LE(std::abs(l.value(d.y, d.t) - l.value(d.y, d.s)), l.lipschitz_constant() * std::abs(d.t - d.s) + 1e-12);
            EXPECT_LE(std::abs(l.dt(d.y, d.t)), l.lipschitz_constant());
            EXPECT_GE(l.dtt(d.y, d.t), 0.0);
        }
    }
}

// Dense grid oracle for |L|_1 = sup |L'| and sup L''.
TEST(LossConstants, GridOracle) {
    for (const auto& l : kLosses) {
        double sup_dt = 0.0, sup_dtt = 0.0;
        const std::vector<double> ys = l.is_classification() ? std::vector<double>{-1.0, 1.0}
                                                              : std::vector<double>{-5.0, -1.0, 0.0, 2.5};
        for (double y : ys) {
            for (double t = -60.0; t <= 60.0; t += 1e-3) {
                sup_dt = std::max(sup_dt, std::abs(l.dt(y, t)));
                sup_dtt = std::max(sup_dtt, l.dtt(y, t));
            }
        }
        EXPECT_NEAR(sup_dt, 1.0, 1e-12);
        EXPECT_LE(sup_dt, l.lipschitz_constant());
        EXPECT_NEAR(sup_dtt, l.curvature_bound(), 1e-6);
        EXPECT_LE(sup_dtt, l.curvature_bound());
    }
}
