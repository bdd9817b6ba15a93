#pragma once

#include <array>
#include <cmath>
#include <limits>

namespace skid {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double k) const { return {x * k, y * k}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
};

inline Vec2 unit_from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }

struct Segment {
    Vec2 a;
    Vec2 b;
};

constexpr double kNoHit = std::numeric_limits<double>::infinity();

// Distance along the ray (origin, unit dir) to the segment, or kNoHit.
// Parallel rays count as misses; touching an endpoint counts as a hit.
inline double ray_segment_intersect(const Vec2& origin, const Vec2& dir, const Segment& seg) {
    const Vec2 e = seg.b - seg.a;
    const double denom = dir.cross(e);
    if (std::abs(denom) < 1e-12) return kNoHit;
    const Vec2 w = seg.a - origin;
    const double t = w.cross(e) / denom;   // along ray
    const double u = w.cross(dir) / denom; // along segment
    if (t < 0.0 || u < -1e-12 || u > 1.0 + 1e-12) return kNoHit;
    return t;
}

// Axis-aligned rectangle given by min/max corners.
struct Aabb {
    Vec2 lo;
    Vec2 hi;

    std::array<Segment, 4> edges() const {
        return {Segment{{lo.x, lo.y}, {hi.x, lo.y}}, Segment{{hi.x, lo.y}, {hi.x, hi.y}},
                Segment{{hi.x, hi.y}, {lo.x, hi.y}}, Segment{{lo.x, hi.y}, {lo.x, lo.y}}};
    }

    bool contains(const Vec2& p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
    }
};

// Rectangle with heading, used for the vehicle footprint.
struct OrientedBox {
    Vec2 center;
    double half_length = 0.0;
    double half_width = 0.0;
    double heading = 0.0;

    std::array<Vec2, 4> corners() const {
        const Vec2 fwd = unit_from_angle(heading);
        const Vec2 left{-fwd.y, fwd.x};
        const Vec2 dl = fwd * half_length;
        const Vec2 dw = left * half_width;
        return {center + dl + dw, center + dl - dw, center - dl - dw, center - dl + dw};
    }
};

// Separating-axis test between an oriented box and an axis-aligned one.
inline bool intersects(const OrientedBox& obb, const Aabb& box) {
    const auto oc = obb.corners();
    const std::array<Vec2, 4> bc = {Vec2{box.lo.x, box.lo.y}, Vec2{box.hi.x, box.lo.y},
                                    Vec2{box.hi.x, box.hi.y}, Vec2{box.lo.x, box.hi.y}};
    const Vec2 fwd = unit_from_angle(obb.heading);
    const std::array<Vec2, 4> axes = {Vec2{1.0, 0.0}, Vec2{0.0, 1.0}, fwd, Vec2{-fwd.y, fwd.x}};
    for (const Vec2& axis : axes) {
        double lo_a = kNoHit, hi_a = -kNoHit, lo_b = kNoHit, hi_b = -kNoHit;
        for (const Vec2& p : oc) {
            const double d = p.dot(axis);
            lo_a = std::min(lo_a, d);
            hi_a = std::max(hi_a, d);
        }
        for (const Vec2& p : bc) {
            const double d = p.dot(axis);
            lo_b = std::min(lo_b, d);
            hi_b = std::max(hi_b, d);
        }
        if (hi_a < lo_b || hi_b < lo_a) return false;
    }
    return true;
}

inline double wrap_angle(double a) {
    a = std::fmod(a + M_PI, 2.0 * M_PI);
    if (a < 0.0) a += 2.0 * M_PI;
    return a - M_PI;
}

constexpr double deg2rad(double d) { return d * M_PI / 180.0; }
constexpr double rad2deg(double r) { return r * 180.0 / M_PI; }

}  // namespace skid
