#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "hrg/geometry.hpp"
#include "hrg/model.hpp"

namespace hrg {

struct HrgGraph {
    std::size_t n_vertices = 0;
    std::vector<std::vector<std::uint32_t>> adjacency;  // sorted neighbor lists
    std::vector<std::uint32_t> degrees;
};

namespace detail {

inline HrgGraph graph_from_pairs(std::size_t n,
                                 std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    HrgGraph g;
    g.n_vertices = n;
    g.adjacency.assign(n, {});
    g.degrees.assign(n, 0);
    for (auto& [i, j] : edges) {
        g.adjacency[i].push_back(j);
        g.adjacency[j].push_back(i);
    }
    for (std::size_t v = 0; v < n; ++v) {
        auto& adj = g.adjacency[v];
        std::sort(adj.begin(), adj.end());
        // coincident-x pairs can be examined from both sides of the sweep
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
        g.degrees[v] = static_cast<std::uint32_t>(adj.size());
    }
    return g;
}

}  // namespace detail

// Quadratic oracle: tests every pair with the exact edge predicate.
inline HrgGraph build_bruteforce(const PointSet& ps) {
    const std::size_t n = ps.size();
    if (n > 20000)
        throw std::invalid_argument("build_bruteforce: guarded to 2e4 points");
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (edge_test(ps.points[i], ps.points[j], ps.params))
                edges.emplace_back(static_cast<std::uint32_t>(i),
                                   static_cast<std::uint32_t>(j));
    return detail::graph_from_pairs(n, edges);
}

namespace detail {

// theta_R(r,r') <= (pi/2) * 2 e^{(y+y'-R)/2} whenever r + r' >= R (the ratio
// arccos(1-x)/sqrt(2x) increases to pi/2 at x = 2), so an x-window of
// half-width (pi/2) e^{(y+y')/2} over-covers every edge. Points are bucketed
// into dyadic layers of e^{y/2} and matched layer-against-layer within that
// window; survivors get the exact test.
inline constexpr double kWindowSafety = 1.5707963267948966 * (1.0 + 1e-9);

struct LayerPoint {
    double x;
    double ey2;  // e^{y/2}
    std::uint32_t idx;
};

}  // namespace detail

// Near-linear builder, exact same edge set as build_bruteforce.
inline HrgGraph build_fast(const PointSet& ps) {
    const std::size_t n = ps.size();
    const ModelParams& P = ps.params;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    if (n == 0) return detail::graph_from_pairs(0, edges);

    // Layer k holds points with e^{y/2} in [2^k, 2^{k+1}).
    const double log2e = 1.0 / (2.0 * std::log(2.0));  // y -> log2(e^{y/2})
    int max_layer = 0;
    std::vector<int> layer_of(n);
    for (std::size_t i = 0; i < n; ++i) {
        int k = static_cast<int>(ps.band_points[i].y * log2e);
        layer_of[i] = k;
        max_layer = std::max(max_layer, k);
    }
    std::vector<std::vector<detail::LayerPoint>> layers(max_layer + 1);
    for (std::size_t i = 0; i < n; ++i) {
        layers[layer_of[i]].push_back(
            {ps.band_points[i].x, std::exp(0.5 * ps.band_points[i].y),
             static_cast<std::uint32_t>(i)});
    }
    for (auto& L : layers)
        std::sort(L.begin(), L.end(),
                  [](const detail::LayerPoint& a, const detail::LayerPoint& b) {
                      return a.x < b.x;
                  });

    const double circ = 2.0 * P.I_n;
    auto test_pair = [&](std::uint32_t i, std::uint32_t j) {
        if (edge_test(ps.points[i], ps.points[j], P))
            edges.emplace_back(std::min(i, j), std::max(i, j));
    };

    for (int k = 0; k <= max_layer; ++k) {
        const auto& A = layers[k];
        if (A.empty()) continue;

        // Same layer: walk forward cyclically; each unordered pair shows up
        // exactly once because only the shorter arc fits under W < I_n.
        {
            const double W = detail::kWindowSafety * std::ldexp(1.0, 2 * (k + 1));
            if (W >= P.I_n) {
                for (std::size_t a = 0; a < A.size(); ++a)
                    for (std::size_t b = a + 1; b < A.size(); ++b)
                        test_pair(A[a].idx, A[b].idx);
            } else {
                for (std::size_t a = 0; a < A.size(); ++a) {
                    for (std::size_t step = 1; step < A.size(); ++step) {
                        const auto& q = A[(a + step) % A.size()];
                        double gap = q.x - A[a].x;
                        if (gap < 0.0) gap += circ;
                        if (gap > W) break;
                        const double w = detail::kWindowSafety * A[a].ey2 * q.ey2;
                        if (gap <= w) test_pair(A[a].idx, q.idx);
                    }
                }
            }
        }

        // Cross layers: binary-search the candidate x-window in the larger
        // layer (wraparound handled by splitting the window at the seam).
        for (int l = k + 1; l <= max_layer; ++l) {
            const auto& B = layers[l];
            if (B.empty()) continue;
            const double W =
                detail::kWindowSafety * std::ldexp(1.0, (k + 1) + (l + 1));
            if (W >= P.I_n) {
                for (const auto& a : A)
                    for (const auto& b : B) {
                        const double w = detail::kWindowSafety * a.ey2 * b.ey2;
                        if (circ_dist(a.x, b.x, P) <= w) test_pair(a.idx, b.idx);
                    }
                continue;
            }
            auto scan = [&](const detail::LayerPoint& a, double lo, double hi) {
                auto it = std::lower_bound(
                    B.begin(), B.end(), lo,
                    [](const detail::LayerPoint& q, double v) { return q.x < v; });
                for (; it != B.end() && it->x <= hi; ++it) {
                    const double w = detail::kWindowSafety * a.ey2 * it->ey2;
                    if (circ_dist(a.x, it->x, P) <= w) test_pair(a.idx, it->idx);
                }
            };
            for (const auto& a : A) {
                const double lo = a.x - W;
                const double hi = a.x + W;
                scan(a, std::max(lo, -P.I_n), std::min(hi, P.I_n));
                if (lo < -P.I_n) scan(a, lo + circ, P.I_n);
                if (hi > P.I_n) scan(a, -P.I_n, hi - circ);
            }
        }
    }
    return detail::graph_from_pairs(n, edges);
}

struct DegreeStats {
    double mean_degree = 0.0;
    std::vector<std::uint64_t> tail_counts;  // tail_counts[k] = #vertices with degree >= k
    double tail_exponent = 0.0;              // log-log LS slope of tail_counts (negated CCDF slope)
    bool tail_exponent_defined = false;
};

// Mean degree plus complementary-cumulative degree counts. The tail exponent
// is fitted on N_{>=k} for k in [k_min, k_max], k_max keeping at least
// min_tail vertices in the tail. The default k_min sits past the mixed-
// Poisson bulk, where the tail's local log-log slope settles near its
// asymptote; fitting from small k would report the crossover curvature
// instead of the exponent.
inline DegreeStats degree_stats(const HrgGraph& g, std::uint32_t k_min = 24,
                                std::uint64_t min_tail = 50) {
    DegreeStats s;
    if (g.n_vertices == 0) return s;
    std::uint32_t dmax = 0;
    double sum = 0.0;
    for (auto d : g.degrees) {
        sum += d;
        dmax = std::max(dmax, d);
    }
    s.mean_degree = sum / static_cast<double>(g.n_vertices);
    s.tail_counts.assign(dmax + 2, 0);
    for (auto d : g.degrees) s.tail_counts[d] += 1;
    for (std::int64_t k = dmax; k >= 0; --k) s.tail_counts[k] += s.tail_counts[k + 1];

    std::uint32_t k_max = k_min;
    while (k_max + 1 <= dmax && s.tail_counts[k_max + 1] >= min_tail) ++k_max;
    if (k_max <= k_min + 2) return s;  // degenerate tail, exponent undefined
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = k_max - k_min + 1;
    for (std::uint32_t k = k_min; k <= k_max; ++k) {
        const double lx = std::log(static_cast<double>(k));
        const double ly = std::log(static_cast<double>(s.tail_counts[k]));
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    s.tail_exponent = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
    s.tail_exponent_defined = true;
    return s;
}

// Edge-list export: one line "i j" per edge with i < j, plus a JSON sidecar
// at <path>.json carrying the sample provenance.
inline void write_edge_list(const HrgGraph& g, const PointSet& ps,
                            const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    for (std::size_t i = 0; i < g.n_vertices; ++i)
        for (auto j : g.adjacency[i])
            if (j > i) std::fprintf(f, "%zu %u\n", i, j);
    if (std::fclose(f) != 0) throw std::runtime_error("write failed: " + path);

    std::FILE* s = std::fopen((path + ".json").c_str(), "w");
    if (!s) throw std::runtime_error("cannot open for writing: " + path + ".json");
    std::fprintf(s,
                 "{\"n_vertices\": %zu, \"seed\": %llu, \"alpha\": %.17g, "
                 "\"nu\": %.17g, \"n\": %.17g}\n",
                 g.n_vertices, static_cast<unsigned long long>(ps.seed),
                 ps.params.alpha, ps.params.nu, ps.params.n);
    if (std::fclose(s) != 0) throw std::runtime_error("write failed: " + path + ".json");
}

}  // namespace hrg
