#pragma once

#include <vector>

#include "skid/geometry.hpp"

namespace skid {

// Polyline with arc-length parameterization. Projection extrapolates along
// the end tangents, so points slightly beyond either end still get a well
// defined (s, lateral) pair.
class Path {
  public:
    explicit Path(std::vector<Vec2> points);

    static Path straight(const Vec2& start, const Vec2& end) { return Path({start, end}); }

    struct Projection {
        double s = 0.0;        // arc length along the path
        double lateral = 0.0;  // signed offset, left of travel positive
        double heading = 0.0;  // tangent heading at the projection
    };

    Projection project(const Vec2& p) const;

    double length() const { return cum_.back(); }
    const std::vector<Vec2>& points() const { return pts_; }

  private:
    std::vector<Vec2> pts_;
    std::vector<Vec2> tangents_;  // unit, per segment
    std::vector<double> cum_;     // cumulative arc length per vertex
};

// Arc-length progress between two positions, signed (Frenet tangent motion).
inline double frenet_progress(const Vec2& prev, const Vec2& cur, const Path& path) {
    return path.project(cur).s - path.project(prev).s;
}

}  // namespace skid
