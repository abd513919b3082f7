#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "hrg/model.hpp"
#include "hrg/rng.hpp"

namespace hrg {

namespace detail {

// Inverse radial CDF: r = (1/alpha) arccosh(1 + u (cosh(alpha R) - 1)).
// For large arguments acosh overflows its input long before double range is
// exhausted only in z^2, so the direct call is fine up to z ~ 1e150; past
// z = 1e8 we switch to log form acosh(z) ~ ln(2z), and the whole expression
// is assembled in logs once cosh(alpha R) itself would overflow.
inline double inverse_radial_cdf(double u, const ModelParams& p) {
    const double aR = p.alpha * p.R;
    if (aR < 700.0) {
        const double z = 1.0 + u * (std::cosh(aR) - 1.0);
        if (z < 1.0e8) return std::acosh(z) / p.alpha;
        return (std::log(2.0) + std::log(z)) / p.alpha;
    }
    // ln(cosh(aR) - 1) = aR - ln 2 + ln(1 - 2 e^{-aR} + e^{-2aR})
    const double lncosh_m1 = aR - std::log(2.0);
    const double lnz = lncosh_m1 + std::log(u);  // z >> 1 here for any u > e^{-600}
    return (std::log(2.0) + lnz) / p.alpha;
}

}  // namespace detail

// Poisson sample of the disc process: N ~ Poisson(n), angles uniform on
// (-pi, pi], radii by inverse CDF of rho_radial. Deterministic in
// (params, seed).
inline PointSet sample_disc(const ModelParams& p, std::uint64_t seed) {
    Rng rng(seed);
    PointSet ps;
    ps.params = p;
    ps.seed = seed;
    ps.process_kind = ProcessKind::ExactDisc;
    const std::uint64_t count = poisson(rng, p.n);
    ps.points.reserve(count);
    ps.band_points.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        DiscPoint q;
        q.theta = rng.next_uniform(-kPi, kPi);
        q.r = std::min(detail::inverse_radial_cdf(rng.next_uniform(), p), p.R);
        q.y = p.R - q.r;
        ps.points.push_back(q);
        ps.band_points.push_back(phi(q, p));
    }
    return ps;
}

// Poisson process on (-I_n, I_n] x [0, y_max] with intensity beta e^{-alpha y}:
// count ~ Poisson(2 I_n beta (1 - e^{-alpha y_max}) / alpha), x uniform,
// y by inverse truncated-exponential CDF. Disc coordinates are populated via
// the inverse map so graph and score code runs unchanged on band samples.
inline PointSet sample_band(const ModelParams& p, std::uint64_t seed,
                            double y_max = -1.0) {
    if (y_max < 0.0) y_max = p.R;
    if (!(y_max > 0.0 && y_max <= p.R))
        throw std::invalid_argument("sample_band: y_max must lie in (0, R]");
    Rng rng(seed);
    PointSet ps;
    ps.params = p;
    ps.seed = seed;
    ps.process_kind = ProcessKind::IdealBand;
    const double tail = 1.0 - std::exp(-p.alpha * y_max);
    const double mean = 2.0 * p.I_n * p.beta * tail / p.alpha;
    const std::uint64_t count = poisson(rng, mean);
    ps.points.reserve(count);
    ps.band_points.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        BandPoint b;
        b.x = rng.next_uniform(-p.I_n, p.I_n);
        b.y = -std::log1p(-rng.next_uniform() * tail) / p.alpha;
        ps.band_points.push_back(b);
        ps.points.push_back(phi_inverse(b, p));
    }
    return ps;
}

// Expected cardinality of sample_band for given truncation height.
inline double band_expected_count(const ModelParams& p, double y_max) {
    return 2.0 * p.I_n * p.beta * (1.0 - std::exp(-p.alpha * y_max)) / p.alpha;
}

// CSV dump: header r,theta,y,x, one row per point, 17 significant digits.
inline void write_points_csv(const PointSet& ps, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    std::fputs("r,theta,y,x\n", f);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", ps.points[i].r,
                     ps.points[i].theta, ps.points[i].y, ps.band_points[i].x);
    }
    if (std::fclose(f) != 0) throw std::runtime_error("write failed: " + path);
}

inline void read_points_csv(const std::string& path, PointSet& ps) {
    std::FILE* f = std::fopen(path.c_str(), "r");
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    char line[512];
    if (!std::fgets(line, sizeof line, f)) {
        std::fclose(f);
        throw std::runtime_error("empty points file: " + path);
    }
    ps.points.clear();
    ps.band_points.clear();
    while (std::fgets(line, sizeof line, f)) {
        DiscPoint q;
        double x;
        if (std::sscanf(line, "%lf,%lf,%lf,%lf", &q.r, &q.theta, &q.y, &x) != 4) {
            std::fclose(f);
            throw std::runtime_error("malformed points row in " + path);
        }
        ps.points.push_back(q);
        ps.band_points.push_back(BandPoint{x, q.y});
    }
    std::fclose(f);
}

}  // namespace hrg
