#include "drslip/geometry.hpp"

#include <gtest/gtest.h>

#include "drslip/bezier.hpp"
#include "drslip/error.hpp"
#include "drslip/stats.hpp"

namespace drslip {
namespace {

const std::vector<Vec2> kSquare{{0, 0}, {1, 0}, {1, 1}, {0, 1}};

TEST(ConvexHull, CounterClockwiseAndDropsInteriorPoints) {
    const auto h = convex_hull({{1, 1}, {0, 0}, {0.5, 0.5}, {1, 0}, {0, 1}, {0.5, 0.0}});
    ASSERT_EQ(h.size(), 4u);
    EXPECT_GT(polygon_area(h), 0.0);
    EXPECT_DOUBLE_EQ(polygon_area(h), 1.0);
}

TEST(ConvexHull, CollinearInputIsDegenerate) {
    const auto h = convex_hull({{0, 0}, {1, 1}, {2, 2}});
    EXPECT_TRUE(polygon_degenerate(h));
    EXPECT_TRUE(polygon_degenerate(convex_hull({{0, 0}, {0, 0}, {0, 0}})));
}

TEST(Centroid, TriangleIsVertexMean) {
    const std::vector<Vec2> tri = convex_hull({{-0.2, -0.15}, {0.2, 0.15}, {-0.2, 0.15}});
    const Vec2 c = polygon_centroid(tri);
    EXPECT_NEAR(c.x, -0.2 / 3.0, 1e-15);
    EXPECT_NEAR(c.y, 0.15 / 3.0, 1e-15);
}

TEST(SignedDistance, InsideIsMinusNearestEdge) {
    EXPECT_NEAR(polygon_signed_distance(kSquare, {0.5, 0.5}), -0.5, 1e-15);
    EXPECT_NEAR(polygon_signed_distance(kSquare, {0.9, 0.5}), -0.1, 1e-15);
    EXPECT_NEAR(polygon_signed_distance(kSquare, {1.0, 0.5}), 0.0, 1e-15);
}

TEST(SignedDistance, OutsideIsEuclidean) {
    EXPECT_NEAR(polygon_signed_distance(kSquare, {1.5, 0.5}), 0.5, 1e-15);
    EXPECT_NEAR(polygon_signed_distance(kSquare, {2.0, 2.0}), std::sqrt(2.0), 1e-15);
    EXPECT_FALSE(polygon_contains(kSquare, {1.1, 0.5}));
    EXPECT_TRUE(polygon_contains(kSquare, {1.1, 0.5}, 0.2));
}

TEST(SignedDistance, AgreesWithBruteForceEdgeDistance) {
    SplitMix64 rng(11);
    const auto tri = convex_hull({{0.2, 0.15}, {-0.2, -0.15}, {0.3, -0.15}});
    for (int i = 0; i < 500; ++i) {
        const Vec2 q{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
        double d = 1e300;
        for (std::size_t k = 0; k < tri.size(); ++k) d = std::min(d, segment_distance(tri[k], tri[(k + 1) % 3], q));
        const double s = polygon_signed_distance(tri, q);
        EXPECT_NEAR(std::abs(s), d, 1e-14);
        // Inside iff every edge has q on its left.
        bool inside = true;
        for (std::size_t k = 0; k < tri.size(); ++k) inside &= cross(tri[k], tri[(k + 1) % 3], q) >= 0.0;
        EXPECT_EQ(s <= 0.0, inside);
    }
}

TEST(Bezier, EndpointsApexAndZeroEndVelocity) {
    const double h = 0.05;
    const BezierCurve c = swing_curve({0.2, -0.15}, {0.3, -0.15}, h);
    EXPECT_EQ(c(0.0), (Vec3{0.2, -0.15, 0.0}));
    const Vec3 end = c(1.0);
    EXPECT_NEAR(end.x, 0.3, 1e-15);
    EXPECT_NEAR(end.z, 0.0, 1e-15);
    EXPECT_NEAR(c(0.5).z, h, 1e-15);
    EXPECT_NEAR(c(0.5).x, 0.25, 1e-15);
    for (double s : {0.0, 1.0}) {
        const Vec3 d = c.derivative(s);
        EXPECT_NEAR(std::hypot(d.x, d.y, d.z), 0.0, 1e-14);
    }
    // The apex is the maximum height along the curve.
    for (int i = 0; i <= 100; ++i) EXPECT_LE(c(i / 100.0).z, h + 1e-15);
}

TEST(Bezier, DerivativeMatchesFiniteDifference) {
    const BezierCurve c = swing_curve({0.0, 0.0}, {0.15, 0.02}, 0.04);
    for (double s : {0.1, 0.33, 0.7}) {
        const double e = 1e-6;
        const Vec3 fd = (1.0 / (2 * e)) * (c(s + e) - c(s - e));
        const Vec3 d = c.derivative(s);
        EXPECT_NEAR(d.x, fd.x, 1e-8);
        EXPECT_NEAR(d.y, fd.y, 1e-8);
        EXPECT_NEAR(d.z, fd.z, 1e-8);
    }
}

TEST(Bezier, RejectsNonPositiveHeight) { EXPECT_THROW(swing_curve({0, 0}, {1, 0}, 0.0), ConfigError); }

}  // namespace
}  // namespace drslip
