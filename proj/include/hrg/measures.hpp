#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hrg/geometry.hpp"
#include "hrg/model.hpp"
#include "hrg/quadrature.hpp"

namespace hrg {

namespace detail {

inline void require_height(double y, const ModelParams& P, const char* who) {
    if (y < 0.0 || y > P.H)
        throw std::invalid_argument(std::string(who) + ": height must lie in [0, H]");
}

}  // namespace detail

// mu-content of the sandwich ball around p. The window part integrates to
// (1 +- eps) gamma e^{y/2} (1 - e^{(1/2-alpha)(R-y-C)}); the Upper kind adds
// the full-width high band above height R - y - C.
inline double mu_ball_pm(const BandPoint& p, BallKind kind, const ModelParams& P) {
    detail::require_height(p.y, P, "mu_ball_pm");
    // window part is empty once y + C reaches R (possible at desk scale,
    // where H + C can exceed R)
    const double L = std::max(P.R - p.y - P.C_eps, 0.0);
    double v = eps_factor(kind, P) * P.gamma * std::exp(0.5 * p.y)
             * (1.0 - std::exp((0.5 - P.alpha) * L));
    if (kind == BallKind::Upper) {
        v += (P.beta * kPi / P.alpha) * std::exp(0.5 * P.R)
           * (std::exp(-P.alpha * L) - std::exp(-P.alpha * P.R));
    }
    return v;
}

// mu-content of the height-truncated window ball (heights up to y(p)).
inline double mu_truncated_ball(const BandPoint& p, BallKind kind,
                                const ModelParams& P) {
    detail::require_height(p.y, P, "mu_truncated_ball");
    return eps_factor(kind, P) * P.gamma * std::exp(0.5 * p.y)
         * (1.0 - std::exp((0.5 - P.alpha) * p.y));
}

// mu-content of the full-width strip above height h(p1) = R - y(p1) - C.
inline double mu_Z(const BandPoint& p1, const ModelParams& P) {
    detail::require_height(p1.y, P, "mu_Z");
    // strip [max(R - y1 - C, 0), R] at full width
    const double e0 = (0.5 - P.alpha) * P.R;
    const double top = std::min(P.alpha * (p1.y + P.C_eps), P.alpha * P.R);
    return P.nu * (std::exp(e0 + top) - std::exp(e0));
}

namespace detail {

// Overlap length of the two window balls at height y, on the circle of
// circumference 2 I_n. w_i are the window half-widths, t the circular gap.
inline double window_overlap(double w1, double w2, double t, double circ) {
    const double near = std::max(0.0, std::min(w1, t + w2) - std::max(-w1, t - w2));
    const double far = std::max(0.0, w1 + w2 - (circ - t));
    return std::min(near + far, std::min(std::min(2.0 * w1, 2.0 * w2), circ));
}

}  // namespace detail

// Quadrature evaluation of mu(B_h(p1) cap B_h(p2)) for the window balls of
// the given kind, h from the higher point. Valid on the whole band; used as
// the fallback where the closed form's window does not apply.
inline double mu_intersection_quad(const BandPoint& a, const BandPoint& b,
                                   BallKind kind, const ModelParams& P,
                                   const QuadratureSpec& spec = {}) {
    const double y_hi = std::max(a.y, b.y);
    const double h = P.R - y_hi - P.C_eps;
    if (h <= 0.0) return 0.0;
    const double c = eps_factor(kind, P);
    const double t = circ_dist(a.x, b.x, P);
    const double circ = 2.0 * P.I_n;
    auto len = [&](double y) {
        return detail::window_overlap(c * std::exp(0.5 * (y + a.y)),
                                      c * std::exp(0.5 * (y + b.y)), t, circ);
    };
    // Split at the heights where the boundary curves cross; the integrand has
    // kinks there.
    const double Y1 = std::exp(0.5 * std::max(a.y, b.y));
    const double Y2 = std::exp(0.5 * std::min(a.y, b.y));
    double cuts[2];
    int ncuts = 0;
    const double yL = 2.0 * std::log(t / (c * (Y1 + Y2)));
    if (yL > 0.0 && yL < h) cuts[ncuts++] = yL;
    if (Y1 > Y2) {
        const double yU = 2.0 * std::log(t / (c * (Y1 - Y2)));
        if (yU > 0.0 && yU < h && (ncuts == 0 || yU > cuts[0])) cuts[ncuts++] = yU;
    }
    auto f = [&](double y) { return P.beta * std::exp(-P.alpha * y) * len(y); };
    double lo = 0.0, total = 0.0;
    for (int i = 0; i < ncuts; ++i) {
        total += integrate(f, lo, cuts[i], spec);
        lo = cuts[i];
    }
    return total + integrate(f, lo, h, spec);
}

// Closed form of mu(B_h(p1) cap B_h(p2)) on the lens window
// max{(1 +- eps)(Y1+Y2), Y12} < t <= (1 +- eps) e^{h/2} (Y1-Y2):
// kappa t^{1-2 alpha} - (1 +- eps) eta(Y2).
inline double mu_intersection(const IntersectionFrame& f, const ModelParams& P) {
    detail::require_height(f.p1.y, P, "mu_intersection");
    const double c = eps_factor(f.kind, P);
    const double h = P.R - f.p1.y - P.C_eps;
    if (h <= 0.0)
        throw std::domain_error("mu_intersection: empty truncated balls (h <= 0)");
    const double Y12 = (1.0 + lambda_n(P.R - f.p1.y, P.R - f.p2.y, P))
                     * std::exp(0.5 * (f.p1.y + f.p2.y));
    const double lower = std::max(c * (f.Y1 + f.Y2), Y12);
    const double upper = c * std::exp(0.5 * h) * (f.Y1 - f.Y2);
    if (!(f.t > lower && f.t <= upper))
        throw std::domain_error(
            "mu_intersection: gap outside the closed-form window; "
            "use mu_intersection_bound or mu_intersection_quad");
    const double kappa = std::pow(c, 2.0 * P.alpha) * P.gamma / (4.0 * P.alpha)
                       * (std::pow(f.Y1 + f.Y2, 2.0 * P.alpha)
                          - std::pow(f.Y1 - f.Y2, 2.0 * P.alpha));
    const double eta = P.gamma * f.Y2 * std::exp((0.5 - P.alpha) * h);
    return kappa * std::pow(f.t, 1.0 - 2.0 * P.alpha) - c * eta;
}

// Upper bound on mu(B_h(p1) cap B_h(p2)) for well-separated points,
// t > e^{R/4} (Y1 + Y2). Piecewise by separation regime; always dominates the
// true content of either sandwich kind.
inline double mu_intersection_bound(const IntersectionFrame& f, const ModelParams& P) {
    detail::require_height(f.p1.y, P, "mu_intersection_bound");
    if (!(f.t > std::exp(0.25 * P.R) * (f.Y1 + f.Y2)))
        throw std::domain_error("mu_intersection_bound: gap below e^{R/4}(Y1+Y2)");
    const double c = 1.0 + P.eps;
    const double h = P.R - f.p1.y - P.C_eps;
    const double eh2 = std::exp(0.5 * h);
    const double lens = std::pow(c, 2.0 * P.alpha) * P.gamma / (4.0 * P.alpha)
                      * std::pow(f.t, 1.0 - 2.0 * P.alpha)
                      * std::pow(f.Y1 + f.Y2, 2.0 * P.alpha);
    if (f.t <= c * eh2 * (f.Y1 - f.Y2)) return lens;
    if (f.t <= c * eh2 * (f.Y1 + f.Y2))
        return lens + (P.beta / P.alpha) * f.t * std::exp(-P.alpha * h);
    return mu_Z(f.p1, P);  // windows disjoint; only the high strip remains
}

// Covariance of the isolation indicators at two fixed points of the band
// process, in the sandwich-ball world of the given kind:
//   inside each other's ball  ->  -E1 E2
//   otherwise                  ->  E1 E2 (exp(mu(intersection)) - 1)
// with E_i = exp(-mu_ball_pm(p_i)). Ball membership is decided by the exact
// window Y12.
inline double cov_iso(const BandPoint& a, const BandPoint& b, const ModelParams& P,
                      BallKind kind = BallKind::Lower,
                      const QuadratureSpec& spec = {}) {
    const double E1 = std::exp(-mu_ball_pm(a, kind, P));
    const double E2 = std::exp(-mu_ball_pm(b, kind, P));
    const double Y12 = (1.0 + lambda_n(P.R - a.y, P.R - b.y, P))
                     * std::exp(0.5 * (a.y + b.y));
    if (circ_dist(a.x, b.x, P) < Y12) return -E1 * E2;
    double mu;
    try {
        mu = mu_intersection(intersection_frame(a, b, kind, P), P);
    } catch (const std::domain_error&) {
        mu = mu_intersection_quad(a, b, kind, P, spec);
    }
    return E1 * E2 * std::expm1(mu);
}

// Limit of E[S^iso]/n: alpha * integral of exp(-gamma e^{y/2} - alpha y).
inline double iso_expectation_constant(const ModelParams& P,
                                       const QuadratureSpec& spec = {}) {
    const double y_max = 2.0 * std::log1p(60.0 / P.gamma);
    auto f = [&](double y) {
        return std::exp(-P.gamma * std::exp(0.5 * y) - P.alpha * y);
    };
    return P.alpha * integrate(f, 0.0, y_max, spec);
}

inline double ext_score_marginal(double y, const ModelParams& P) {
    return std::exp(-P.gamma * std::exp(0.5 * y)
                    * (1.0 - std::exp((0.5 - P.alpha) * y)));
}

// Limit of E[S^ext]/n: alpha * integral of the extreme-score marginal times
// e^{-alpha y}. Strictly larger than the isolation constant.
inline double ext_expectation_constant(const ModelParams& P,
                                       const QuadratureSpec& spec = {}) {
    const double y_max = std::max(2.0 * std::log1p(120.0 / P.gamma), 60.0 / P.alpha);
    auto f = [&](double y) {
        return ext_score_marginal(y, P) * std::exp(-P.alpha * y);
    };
    return P.alpha * integrate(f, 0.0, y_max, spec);
}

namespace detail {

// mu-content of D(p1) cap D(p2) under the infinite ideal band process with
// exact windows |x - x'| < e^{(y+y')/2}: heights up to min(y1, y2), overlap
// length integrated against beta e^{-alpha y}. Split at the boundary-crossing
// heights to keep panels smooth.
inline double ideal_trunc_overlap_mu(double y1, double y2, double z,
                                     const ModelParams& P,
                                     const QuadratureSpec& spec) {
    const double ymin = std::min(y1, y2);
    const double Y1 = std::exp(0.5 * y1), Y2 = std::exp(0.5 * y2);
    auto len = [&](double y) {
        const double w1 = std::exp(0.5 * (y + y1));
        const double w2 = std::exp(0.5 * (y + y2));
        return std::max(0.0, std::min(w1, z + w2) - std::max(-w1, z - w2));
    };
    auto f = [&](double y) { return P.beta * std::exp(-P.alpha * y) * len(y); };
    double lo = 0.0;
    const double yL = 2.0 * std::log(z / (Y1 + Y2));
    if (yL >= ymin) return 0.0;
    if (yL > 0.0) lo = yL;
    double cut = ymin;
    if (std::fabs(Y1 - Y2) > 0.0) {
        const double yU = 2.0 * std::log(z / std::fabs(Y1 - Y2));
        if (yU > lo && yU < ymin) cut = yU;
    }
    double total = integrate(f, lo, cut, spec);
    if (cut < ymin) total += integrate(f, cut, ymin, spec);
    return total;
}

}  // namespace detail

// Covariance of the extreme-point indicators at heights y1, y2 with
// horizontal separation z under the infinite ideal band process. Inclusion
// branch (the lower point inside the higher point's window) gives -E1 E2;
// otherwise E1 E2 (exp(mu(overlap)) - 1).
inline double ideal_pair_cov_ext(double y1, double y2, double z,
                                 const ModelParams& P,
                                 const QuadratureSpec& spec = {}) {
    if (y1 < 0.0 || y2 < 0.0)
        throw std::invalid_argument("ideal_pair_cov_ext: heights must be >= 0");
    z = std::fabs(z);
    const double E1 = ext_score_marginal(y1, P);
    const double E2 = ext_score_marginal(y2, P);
    if (z < std::exp(0.5 * (y1 + y2))) return -E1 * E2;
    const double mu = detail::ideal_trunc_overlap_mu(y1, y2, z, P, spec);
    if (mu <= 0.0) return 0.0;
    return E1 * E2 * std::expm1(mu);
}

struct SigmaTruncation {
    double y_cut = 0.0;
    double z_cut = 0.0;
    double first_tail_bound = 0.0;  // bound on the dropped y-tail of the first term
    double pair_tail_bound = 0.0;   // bound on the dropped tails of the pair term
};

struct SigmaResult {
    double sigma2 = 0.0;
    double first_term = 0.0;  // equals ext_expectation_constant up to truncation
    double pair_term = 0.0;
    SigmaTruncation trunc;
};

// Limit of Var[S^ext]/n:
//   sigma^2 = alpha Int E(y1) e^{-a y1} dy1
//           + alpha beta Int Int Int c((0,y1),(z,y2)) e^{-a y2} dz e^{-a y1},
// evaluated with y integrals truncated at y_cut and |z| at z_cut. The z
// integrand vanishes identically beyond Zmax = e^{ymin/2}(Y1+Y2), so the
// default z_cut = 4 e^{y_cut} never truncates; tail bounds for the reported
// truncation use E decreasing and |c| <= E(y_higher).
inline SigmaResult sigma_ext_constant(const ModelParams& P, double y_cut = 30.0,
                                      double z_cut = -1.0,
                                      const QuadratureSpec& spec = {}) {
    if (z_cut <= 0.0) z_cut = 4.0 * std::exp(y_cut);
    SigmaResult r;
    r.trunc.y_cut = y_cut;
    r.trunc.z_cut = z_cut;

    auto E = [&](double y) { return ext_score_marginal(y, P); };
    r.first_term = P.alpha * integrate(
        [&](double y) { return E(y) * std::exp(-P.alpha * y); }, 0.0, y_cut, spec);
    r.trunc.first_tail_bound = E(y_cut) * std::exp(-P.alpha * y_cut);

    // Inner z-integral for fixed heights: the inclusion slab plus the lens.
    auto z_integral = [&](double y1, double y2) {
        const double W12 = std::exp(0.5 * (y1 + y2));
        const double Zmax = std::exp(0.5 * std::min(y1, y2))
                          * (std::exp(0.5 * y1) + std::exp(0.5 * y2));
        const double E12 = E(y1) * E(y2);
        double v = -E12 * std::min(W12, z_cut);
        const double hi = std::min(Zmax, z_cut);
        if (hi > W12) {
            v += E12 * integrate(
                [&](double z) {
                    return std::expm1(detail::ideal_trunc_overlap_mu(y1, y2, z, P, spec));
                },
                W12, hi, spec);
        }
        return 2.0 * v;  // z -> -z symmetry
    };
    r.pair_term = P.alpha * P.beta * integrate(
        [&](double y1) {
            return std::exp(-P.alpha * y1) * integrate(
                [&](double y2) { return std::exp(-P.alpha * y2) * z_integral(y1, y2); },
                0.0, y_cut, spec);
        },
        0.0, y_cut, spec);

    // y-tail of the pair term: |c| <= E(y1) and the z-range is at most
    // 2 Zmax <= 4 e^{(y1+y2)/2}, so the tail is bounded by
    // 8 a b /(a - 1/2) Int_{y_cut}^inf E(y) e^{(1/2-a) y} dy.
    const double tail = integrate(
        [&](double y) { return E(y) * std::exp((0.5 - P.alpha) * y); },
        y_cut, y_cut + 120.0 / (2.0 * P.alpha - 1.0) + 40.0, spec);
    r.trunc.pair_tail_bound = 8.0 * P.alpha * P.beta / (P.alpha - 0.5) * tail;
    if (z_cut < 2.0 * std::exp(y_cut)) {
        // z truncation active: bound the dropped band by |c(z_cut)| (Zmax - z_cut).
        const double extra = P.alpha * P.beta * integrate(
            [&](double y1) {
                return std::exp(-P.alpha * y1) * integrate(
                    [&](double y2) {
                        const double Zmax = std::exp(0.5 * std::min(y1, y2))
                                          * (std::exp(0.5 * y1) + std::exp(0.5 * y2));
                        if (Zmax <= z_cut) return 0.0;
                        return 2.0 * std::exp(-P.alpha * y2)
                             * std::fabs(ideal_pair_cov_ext(y1, y2, z_cut, P, spec))
                             * (Zmax - z_cut);
                    },
                    0.0, y_cut, spec);
            },
            0.0, y_cut, spec);
        r.trunc.pair_tail_bound += extra;
    }
    r.sigma2 = r.first_term + r.pair_term;
    return r;
}

}  // namespace hrg
