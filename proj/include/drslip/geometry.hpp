#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace drslip {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) = default;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double k, Vec3 a) { return {k * a.x, k * a.y, k * a.z}; }
    friend bool operator==(Vec3 a, Vec3 b) = default;
};

inline double cross(Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

/// Convex hull in counter-clockwise order (Andrew's monotone chain);
/// collinear points are dropped.
inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Vec2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const Vec2& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

/// Signed area, positive for counter-clockwise vertex order.
inline double polygon_area(const std::vector<Vec2>& poly) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2 p = poly[i], q = poly[(i + 1) % poly.size()];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
}

/// Area centroid.
inline Vec2 polygon_centroid(const std::vector<Vec2>& poly) {
    double cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2 p = poly[i], q = poly[(i + 1) % poly.size()];
        const double w = p.x * q.y - q.x * p.y;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    const double a6 = 6.0 * polygon_area(poly);
    return {cx / a6, cy / a6};
}

/// Distance from q to the segment [a, b].
inline double segment_distance(Vec2 a, Vec2 b, Vec2 q) {
    const Vec2 e = b - a, w = q - a;
    const double len2 = e.x * e.x + e.y * e.y;
    const double s = len2 > 0.0 ? std::clamp((w.x * e.x + w.y * e.y) / len2, 0.0, 1.0) : 0.0;
    return std::hypot(w.x - s * e.x, w.y - s * e.y);
}

/// Signed distance from q to a CCW convex polygon: Euclidean distance
/// outside (continuously differentiable there), minus the distance to the
/// nearest edge line inside.
inline double polygon_signed_distance(const std::vector<Vec2>& poly, Vec2 q) {
    double d = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2 p = poly[i], e = poly[(i + 1) % poly.size()] - p;
        const double len = std::hypot(e.x, e.y);
        d = std::max(d, (e.y * (q.x - p.x) - e.x * (q.y - p.y)) / len);
    }
    if (d <= 0.0) return d;
    double out = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) out = std::min(out, segment_distance(poly[i], poly[(i + 1) % poly.size()], q));
    return out;
}

inline bool polygon_contains(const std::vector<Vec2>& poly, Vec2 q, double inflate = 0.0) {
    return polygon_signed_distance(poly, q) <= inflate;
}

/// Fewer than three hull vertices or an area below min_area.
inline bool polygon_degenerate(const std::vector<Vec2>& poly, double min_area = 1e-8) {
    return poly.size() < 3 || !(polygon_area(poly) > min_area);
}

}  // namespace drslip
