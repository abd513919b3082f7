#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hrg/model.hpp"

namespace hrg {

// Relative angle between two disc points, in [0, pi].
inline double relative_angle(const DiscPoint& p1, const DiscPoint& p2) {
    double d = std::fabs(p1.theta - p2.theta);
    if (d > kPi) d = 2.0 * kPi - d;
    return d;
}

// Hyperbolic distance via the law of cosines, rearranged to the
// cancellation-free form cosh d = cosh(r1-r2) + 2 sinh r1 sinh r2 sin^2(dtheta/2).
inline double hyp_dist(const DiscPoint& p1, const DiscPoint& p2) {
    const double s = std::sin(0.5 * relative_angle(p1, p2));
    double arg = std::cosh(p1.r - p2.r) + 2.0 * std::sinh(p1.r) * std::sinh(p2.r) * s * s;
    if (arg < 1.0) arg = 1.0;
    return std::acosh(arg);
}

namespace detail {

// The law-of-cosines quotient at hyperbolic distance exactly R equals 1 - x
// with this x; evaluating x directly avoids the catastrophic cancellation in
// (cosh r1 cosh r2 - cosh R) / (sinh r1 sinh r2) when r1 + r2 >> R.
inline double critical_angle_x(double r1, double r2, double R) {
    return 2.0 * std::exp(-(r1 + r2 - R))
         * (1.0 - std::exp(r1 - r2 - R)) * (1.0 - std::exp(r2 - r1 - R))
         / ((1.0 - std::exp(-2.0 * r1)) * (1.0 - std::exp(-2.0 * r2)));
}

}  // namespace detail

// Critical relative angle at which points of radii r1, r2 sit at hyperbolic
// distance exactly R. Returns pi when r1 + r2 <= R (triangle inequality makes
// every angle adjacent; this also covers r1 r2 = 0 where the quotient is
// undefined). arccos(1-x) is computed as 2 asin(sqrt(x/2)), exact and stable
// near both ends; x is clamped to [0, 2].
inline double theta_R(double r1, double r2, const ModelParams& p) {
    if (r1 + r2 <= p.R) return kPi;
    double x = detail::critical_angle_x(r1, r2, p.R);
    if (x < 0.0) x = 0.0;
    if (x > 2.0) x = 2.0;
    return 2.0 * std::asin(std::sqrt(0.5 * x));
}

// Edge predicate of the distance-R graph. Closed: ties d_H = R are edges.
inline bool edge_test(const DiscPoint& p1, const DiscPoint& p2, const ModelParams& p) {
    return relative_angle(p1, p2) <= theta_R(p1.r, p2.r, p);
}

// Rescaled critical angle (1/2) e^{R/2} theta_R. Saturates at (pi/2) e^{R/2}
// when r1 + r2 <= R.
struct DeltaResult {
    double value = 0.0;
    bool saturated = false;  // r1 + r2 <= R: every angle is adjacent
};

inline DeltaResult delta(double r1, double r2, const ModelParams& p) {
    const double half_circ = 0.5 * kPi * std::exp(0.5 * p.R);
    if (r1 + r2 <= p.R) return {half_circ, true};
    return {0.5 * std::exp(0.5 * p.R) * theta_R(r1, r2, p), false};
}

// Residual of delta against its exponential approximation:
// lambda = delta(r1,r2) e^{-(y1+y2)/2} - 1, small uniformly on [R-H, R]^2.
inline double lambda_n(double r1, double r2, const ModelParams& p) {
    const double y1 = p.R - r1;
    const double y2 = p.R - r2;
    if (y1 < 0.0 || y1 > p.H || y2 < 0.0 || y2 > p.H)
        throw std::invalid_argument("lambda_n: defect radii must lie in [0, H]");
    return delta(r1, r2, p).value * std::exp(-0.5 * (y1 + y2)) - 1.0;
}

enum class BallKind { Lower, Upper };

inline double eps_factor(BallKind kind, const ModelParams& p) {
    return kind == BallKind::Lower ? 1.0 - p.eps : 1.0 + p.eps;
}

// Sandwich approximation of a mapped hyperbolic ball: an x-window of
// half-width (1 +- eps) e^{(y + y_center)/2} below height_cut, and for the
// Upper kind additionally the whole high band y + y_center > R - C.
struct BallApprox {
    BandPoint center;
    BallKind kind = BallKind::Lower;
    double eps = 0.0;
    double height_cut = 0.0;  // the h of the height-truncated window
};

inline BallApprox make_ball(const BandPoint& center, BallKind kind,
                            const ModelParams& p, double height_cut = -1.0) {
    BallApprox b;
    b.center = center;
    b.kind = kind;
    b.eps = p.eps;
    // the window part is empty once y(center) + C reaches R
    b.height_cut =
        (height_cut >= 0.0) ? height_cut : std::max(p.R - center.y - p.C_eps, 0.0);
    return b;
}

inline bool ball_contains(const BallApprox& b, const BandPoint& q,
                          const ModelParams& p) {
    if (b.kind == BallKind::Upper && q.y + b.center.y > p.R - p.C_eps)
        return true;
    if (q.y < 0.0 || q.y >= b.height_cut) return false;
    const double w = eps_factor(b.kind, p) * std::exp(0.5 * (q.y + b.center.y));
    return circ_dist(q.x, b.center.x, p) < w;
}

// Membership in the image of the truncated ball D(p): height at most y(center)
// and within hyperbolic distance R of the center (exact test on preimages).
inline bool truncated_ball_contains(const BandPoint& center, const BandPoint& q,
                                    const ModelParams& p) {
    if (center.y < 0.0 || center.y > p.H)
        throw std::invalid_argument("truncated_ball_contains: y(center) must lie in [0, H]");
    if (q.y > center.y) return false;
    return edge_test(phi_inverse(center, p), phi_inverse(q, p), p);
}

// Disjointness of the two height-truncated window balls, h taken from the
// higher point: gap > (1 +- eps) e^{h/2} (e^{y1/2} + e^{y2/2}). When the
// higher point leaves no room below the cut (h <= 0) the balls are empty and
// therefore disjoint.
inline bool balls_disjoint(const BandPoint& p1, const BandPoint& p2,
                           BallKind kind, const ModelParams& p) {
    const double y_hi = std::max(p1.y, p2.y);
    const double h = p.R - y_hi - p.C_eps;
    if (h <= 0.0) return true;
    const double thr = eps_factor(kind, p) * std::exp(0.5 * h)
                     * (std::exp(0.5 * p1.y) + std::exp(0.5 * p2.y));
    return circ_dist(p1.x, p2.x, p) > thr;
}

// Where the boundaries of two window balls cross. y_L is the height at which
// the right boundary of the wider ball meets the left boundary of the other
// (exists once the x-gap clears (1 +- eps)(Y1 + Y2)); y_U is where the two
// right boundaries meet (finite only when the heights differ). Left
// boundaries never intersect. p1 is the higher point after normalization.
struct IntersectionFrame {
    BandPoint p1, p2;          // y(p2) <= y(p1)
    double t = 0.0;            // circular x-gap
    double Y1 = 0.0, Y2 = 0.0; // e^{y/2} of p1, p2
    double y_L = 0.0;
    double y_U = 0.0;
    bool y_L_exists = false;
    bool y_U_finite = false;
    BallKind kind = BallKind::Lower;
};

inline IntersectionFrame intersection_frame(BandPoint a, BandPoint b,
                                            BallKind kind, const ModelParams& p) {
    if (b.y > a.y) std::swap(a, b);
    IntersectionFrame f;
    f.p1 = a;
    f.p2 = b;
    f.kind = kind;
    f.t = circ_dist(a.x, b.x, p);
    f.Y1 = std::exp(0.5 * a.y);
    f.Y2 = std::exp(0.5 * b.y);
    const double c = eps_factor(kind, p);
    const double base = c * (f.Y1 + f.Y2);
    f.y_L_exists = f.t >= base;
    f.y_L = f.y_L_exists ? 2.0 * std::log(f.t / base) : 0.0;
    if (f.Y1 > f.Y2) {
        f.y_U_finite = true;
        f.y_U = 2.0 * std::log(f.t / (c * (f.Y1 - f.Y2)));
    } else {
        f.y_U_finite = false;  // parallel right boundaries
        f.y_U = std::numeric_limits<double>::infinity();
    }
    return f;
}

}  // namespace hrg
