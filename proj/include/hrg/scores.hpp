#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hrg/geometry.hpp"
#include "hrg/graph.hpp"
#include "hrg/model.hpp"

namespace hrg {

// Isolated: no neighbor at all.
inline std::vector<std::uint8_t> isolated_flags(const HrgGraph& g) {
    std::vector<std::uint8_t> f(g.n_vertices);
    for (std::size_t i = 0; i < g.n_vertices; ++i) f[i] = (g.degrees[i] == 0);
    return f;
}

// Extreme: no neighbor with strictly smaller defect radius. Ties do not
// block (the blocking interval [0, y) is half-open); they occur with
// probability zero in the continuous model.
inline std::vector<std::uint8_t> extreme_flags(const PointSet& ps, const HrgGraph& g) {
    std::vector<std::uint8_t> f(g.n_vertices, 1);
    for (std::size_t i = 0; i < g.n_vertices; ++i) {
        const double yi = ps.points[i].y;
        for (auto j : g.adjacency[i]) {
            if (ps.points[j].y < yi) {
                f[i] = 0;
                break;
            }
        }
    }
    return f;
}

struct ScoreCounts {
    std::uint64_t s_iso = 0;
    std::uint64_t s_ext = 0;
    std::uint64_t s_iso_H = 0;  // restricted to points with y <= H
    std::uint64_t s_ext_H = 0;
};

inline ScoreCounts count_scores(const PointSet& ps, const HrgGraph& g) {
    const auto iso = isolated_flags(g);
    const auto ext = extreme_flags(ps, g);
    ScoreCounts c;
    for (std::size_t i = 0; i < g.n_vertices; ++i) {
        const bool low = ps.points[i].y <= ps.params.H;
        c.s_iso += iso[i];
        c.s_ext += ext[i];
        if (low) {
            c.s_iso_H += iso[i];
            c.s_ext_H += ext[i];
        }
    }
    return c;
}

// Radius of stabilization of the extreme-point score at vertex i: the
// Euclidean band distance to the nearest point of the truncated region
// D(p_i) (all such points are graph neighbors of height at most y_i), or the
// diameter of D(p_i) when the region holds no other point. The diameter is
// the chord between the region's two top corners, 2 delta(r_i, r_i).
inline double stabilization_radius(const PointSet& ps, const HrgGraph& g,
                                   std::uint32_t i) {
    if (ps.process_kind != ProcessKind::IdealBand)
        throw std::invalid_argument("stabilization_radius: band process required");
    const double yi = ps.band_points[i].y;
    if (yi > ps.params.H)
        throw std::invalid_argument("stabilization_radius: y(i) must lie in [0, H]");
    double best = -1.0;
    for (auto j : g.adjacency[i]) {
        if (ps.band_points[j].y > yi) continue;
        const double dx = circ_dist(ps.band_points[i].x, ps.band_points[j].x, ps.params);
        const double dy = yi - ps.band_points[j].y;
        const double d = std::hypot(dx, dy);
        if (best < 0.0 || d < best) best = d;
    }
    if (best >= 0.0) return best;
    return 2.0 * delta(ps.points[i].r, ps.points[i].r, ps.params).value;
}

}  // namespace hrg
