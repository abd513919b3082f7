#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hrg {

inline constexpr double kPi = 3.14159265358979323846;

// Model parameters of the hyperbolic random geometric graph plus every
// derived constant used downstream. Immutable after make_params; all
// operations in this library take it by const reference.
//
// The band picture: the disc process mapped through phi() is a Poisson
// process on (-I_n, I_n] x [0, R] whose intensity is beta * e^{-alpha y}
// up to an O(n^{-2 alpha}) defect. gamma = 4 beta / (2 alpha - 1) is the
// resulting mu-content of the ball around a boundary point (y = 0).
struct ModelParams {
    double alpha = 0.0;  // radial concentration, > 1/2 (thermodynamic regime)
    double nu = 0.0;     // density parameter, 0 < nu < n
    double n = 0.0;      // intensity scale; n = nu * e^{R/2}
    double R = 0.0;      // disc radius, 2 ln(n/nu)
    double I_n = 0.0;    // band half-length, (pi/2) e^{R/2}
    double H = 0.0;      // truncation height, 4 ln R
    double beta = 0.0;   // band intensity prefactor, nu * alpha / pi
    double gamma = 0.0;  // ball-content constant, 4 beta / (2 alpha - 1)
    double C_eps = 0.0;  // approximation constant C(eps), in (0, R)
    double eps = 0.0;    // approximation slack, e^{-C_eps}, in (0, 1/3)
};

// Point on the disc in polar coordinates; y = R - r is the defect radius.
struct DiscPoint {
    double r = 0.0;      // hyperbolic radius, in [0, R]
    double theta = 0.0;  // angle, in (-pi, pi]
    double y = 0.0;      // defect radius, R - r
};

// Image of a DiscPoint on the band: x = (theta/2) e^{R/2}, y unchanged.
struct BandPoint {
    double x = 0.0;  // rescaled angle, in (-I_n, I_n]
    double y = 0.0;  // defect radius, in [0, R]
};

enum class ProcessKind {
    ExactDisc,  // Poisson sample of the disc model (radial density rho_radial)
    IdealBand,  // Poisson process on the band with intensity beta e^{-alpha y}
};

// One Poisson sample in both coordinate systems, with seed provenance.
// band_points[i] is always phi(points[i]).
struct PointSet {
    ModelParams params;
    std::vector<DiscPoint> points;
    std::vector<BandPoint> band_points;
    std::uint64_t seed = 0;
    ProcessKind process_kind = ProcessKind::ExactDisc;

    std::size_t size() const { return points.size(); }
};

inline ModelParams make_params(double alpha, double nu, double n,
                               double C_eps = -1.0) {
    if (!std::isfinite(alpha) || !std::isfinite(nu) || !std::isfinite(n))
        throw std::invalid_argument("make_params: non-finite input");
    if (alpha <= 0.5)
        throw std::invalid_argument("make_params: alpha must exceed 1/2");
    if (nu <= 0.0 || nu >= n)
        throw std::invalid_argument("make_params: need 0 < nu < n");

    ModelParams p;
    p.alpha = alpha;
    p.nu = nu;
    p.n = n;
    p.R = 2.0 * std::log(n / nu);
    p.I_n = 0.5 * kPi * std::exp(0.5 * p.R);
    p.H = 4.0 * std::log(p.R);
    p.beta = nu * alpha / kPi;
    p.gamma = 4.0 * p.beta / (2.0 * alpha - 1.0);
    if (C_eps > 0.0) {
        p.C_eps = C_eps;
    } else {
        // 5 ln R whenever that fits inside (0, R); at very small n fall back
        // to R/2 so eps = e^{-C} stays well below 1/3
        const double five_log = 5.0 * std::log(p.R);
        p.C_eps = (five_log < p.R) ? five_log : 0.5 * p.R;
    }
    p.eps = std::exp(-p.C_eps);

    if (!(p.H > 0.0 && p.H < p.R))
        throw std::invalid_argument("make_params: need 0 < 4 ln R < R (n too small)");
    if (!(p.C_eps > 0.0 && p.C_eps < p.R))
        throw std::invalid_argument("make_params: need C_eps in (0, R)");
    if (!(p.eps > 0.0 && p.eps < 1.0 / 3.0))
        throw std::invalid_argument("make_params: need eps = e^{-C_eps} in (0, 1/3)");
    return p;
}

// Radial probability density alpha sinh(alpha r) / (cosh(alpha R) - 1) on
// [0, R]. For alpha R > 30 the quotient is evaluated in rearranged form
// e^{alpha(r-R)} (1 - e^{-2 alpha r}) / (1 - 2 e^{-alpha R} + e^{-2 alpha R}),
// which stays finite for arbitrarily large alpha R.
inline double rho_radial(double r, const ModelParams& p) {
    if (r < 0.0 || r > p.R) return 0.0;
    const double aR = p.alpha * p.R;
    if (aR <= 30.0)
        return p.alpha * std::sinh(p.alpha * r) / (std::cosh(aR) - 1.0);
    const double e = std::exp(-aR);
    return p.alpha * std::exp(p.alpha * (r - p.R))
         * (1.0 - std::exp(-2.0 * p.alpha * r)) / (1.0 - 2.0 * e + e * e);
}

// Density of the defect radius y = R - r; stays within
// 2 alpha / (e^{alpha R} - 2) of the exponential density alpha e^{-alpha y}.
inline double defect_density(double y, const ModelParams& p) {
    if (y < 0.0 || y > p.R) return 0.0;
    return rho_radial(p.R - y, p);
}

// Exact CDF of the defect radius, used by the samplers' goodness-of-fit
// checks: P(Y <= y) = 1 - (cosh(alpha(R-y)) - 1)/(cosh(alpha R) - 1).
inline double defect_cdf(double y, const ModelParams& p) {
    if (y <= 0.0) return 0.0;
    if (y >= p.R) return 1.0;
    const double aR = p.alpha * p.R;
    if (aR <= 30.0)
        return 1.0 - (std::cosh(p.alpha * (p.R - y)) - 1.0) / (std::cosh(aR) - 1.0);
    const double e = std::exp(-aR);
    const double num = std::exp(-p.alpha * y) * (1.0 + std::exp(-2.0 * p.alpha * (p.R - y)))
                     - 2.0 * e;
    return 1.0 - num / (1.0 + e * e - 2.0 * e);
}

inline BandPoint phi(const DiscPoint& q, const ModelParams& p) {
    return BandPoint{0.5 * q.theta * std::exp(0.5 * p.R), q.y};
}

inline DiscPoint phi_inverse(const BandPoint& b, const ModelParams& p) {
    return DiscPoint{p.R - b.y, 2.0 * b.x * std::exp(-0.5 * p.R), b.y};
}

// Circular distance on the band, min{|dx|, 2 I_n - |dx|}; always <= I_n.
inline double circ_dist(double x1, double x2, const ModelParams& p) {
    double d = std::fabs(x1 - x2);
    const double circumference = 2.0 * p.I_n;
    if (d > circumference) d = std::fmod(d, circumference);
    return (d > p.I_n) ? circumference - d : d;
}

}  // namespace hrg
