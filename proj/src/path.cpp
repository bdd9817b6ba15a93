#include "skid/path.hpp"

#include <cmath>
#include <stdexcept>

namespace skid {

Path::Path(std::vector<Vec2> points) : pts_(std::move(points)) {
    if (pts_.size() < 2) throw std::invalid_argument("Path needs at least two points");
    cum_.reserve(pts_.size());
    tangents_.reserve(pts_.size() - 1);
    cum_.push_back(0.0);
    for (std::size_t i = 0; i + 1 < pts_.size(); ++i) {
        const Vec2 d = pts_[i + 1] - pts_[i];
        const double len = d.norm();
        if (len <= 0.0) throw std::invalid_argument("Path has a zero-length segment");
        tangents_.push_back(d * (1.0 / len));
        cum_.push_back(cum_.back() + len);
    }
}

Path::Projection Path::project(const Vec2& p) const {
    double best_dist = kNoHit;
    Projection best;
    for (std::size_t i = 0; i < tangents_.size(); ++i) {
        const Vec2& t = tangents_[i];
        const Vec2 rel = p - pts_[i];
        double along = rel.dot(t);
        const double seg_len = cum_[i + 1] - cum_[i];
        // End segments extrapolate; interior segments clamp so the nearest
        // vertex wins at joints.
        if (i > 0 && along < 0.0) along = 0.0;
        if (i + 1 < tangents_.size() && along > seg_len) along = seg_len;
        const Vec2 foot = pts_[i] + t * along;
        const double dist = (p - foot).norm();
        if (dist < best_dist) {
            best_dist = dist;
            best.s = cum_[i] + along;
            best.lateral = t.cross(rel);  // positive on the left of travel
            best.heading = std::atan2(t.y, t.x);
        }
    }
    return best;
}

}  // namespace skid
