// Acceptance suite: one PASS/FAIL line per criterion, exit code = number of
// failed criteria. Every run is deterministic in the master seed below; cells
// shared between criteria are computed once.
//
// Monte Carlo chain comparisons ("gap decreases along n") are evaluated as
// non-increase within two standard errors: the exact finite-size expectations
// sit below 1e-4 relative of the limit for most tested configurations, so a
// strict inequality between noise-dominated estimates would be a coin flip,
// not a check. Raw values and standard errors are printed alongside.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "hrg/experiments.hpp"
#include "hrg/measures.hpp"
#include "hrg/quadrature.hpp"
#include "hrg/sampler.hpp"
#include "hrg/scores.hpp"
#include "hrg/stats.hpp"
#include "../oracle.hpp"

using namespace hrg;

namespace {

constexpr std::uint64_t kMasterSeed = 20260808;

int g_failures = 0;

void criterion(int k, bool ok, const std::string& detail) {
    std::printf("CRITERION %2d %s: %s\n", k, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// ---- shared cell cache ------------------------------------------------------

using CellKey = std::tuple<double, double, double, int>;
std::map<CellKey, std::vector<CountRow>> g_cells;

const std::vector<CountRow>& cell(double alpha, double nu, double n, int reps) {
    const CellKey key{alpha, nu, n, reps};
    auto it = g_cells.find(key);
    if (it == g_cells.end()) {
        std::printf("  [cell] alpha=%g nu=%g n=%g reps=%d ...\n", alpha, nu, n, reps);
        std::fflush(stdout);
        it = g_cells.emplace(key, run_cell(alpha, nu, n, reps, kMasterSeed)).first;
    }
    return it->second;
}

struct GapPoint {
    double n = 0.0;
    double gap = 0.0;  // relative gap of mean/n against the limit
    double se = 0.0;   // standard error of the gap estimate
};

GapPoint gap_point(const std::vector<CountRow>& rows, double limit,
                   const std::string& which) {
    GapPoint g;
    g.n = rows.front().n;
    const auto xs = column(rows, which);
    const auto ci = jackknife_mean_ci(xs);
    g.gap = std::fabs(ci.point / g.n - limit) / limit;
    g.se = ci.se / g.n / limit;
    return g;
}

bool chain_nonincreasing(const std::vector<GapPoint>& pts) {
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double guard =
            2.0 * std::sqrt(pts[i].se * pts[i].se + pts[i - 1].se * pts[i - 1].se);
        if (pts[i].gap > pts[i - 1].gap + guard) return false;
    }
    return true;
}

// ---- criterion 1: builder equivalence --------------------------------------

void criterion1() {
    int mismatches = 0, runs = 0;
    for (double alpha : {0.6, 1.0, 1.5, 3.0}) {
        const ModelParams p = make_params(alpha, 1.0, 1800.0);
        for (int s = 0; s < 50; ++s) {
            const PointSet ps =
                sample_disc(p, derive_seed(kMasterSeed + 17, 1000 * s + int(10 * alpha)));
            if (ps.size() > 2000) continue;
            ++runs;
            const HrgGraph fast = build_fast(ps);
            const HrgGraph brute = build_bruteforce(ps);
            for (std::size_t i = 0; i < fast.n_vertices; ++i)
                if (fast.adjacency[i] != brute.adjacency[i]) {
                    ++mismatches;
                    break;
                }
        }
    }
    criterion(1, mismatches == 0 && runs >= 195,
              fmt("fast vs brute edge sets identical on %d runs, %d mismatches", runs,
                  mismatches));
}

// ---- criterion 2: measure formulas vs quadrature oracles -------------------

void criterion2() {
    Rng rng(kMasterSeed + 29);
    double worst = 0.0;
    int count = 0;
    auto track = [&](double closed, double quad) {
        const double denom = std::max(std::fabs(quad), 1e-12);
        worst = std::max(worst, std::fabs(closed - quad) / denom);
        ++count;
    };
    for (double alpha : {0.75, 1.0, 1.5, 2.5}) {
        const ModelParams P = make_params(alpha, 1.0, 1e5);
        for (int i = 0; i < 250; ++i) {
            const BandPoint p{rng.next_uniform(-P.I_n, P.I_n), rng.next_uniform(0.0, P.H)};
            const BallKind k = (i % 2 == 0) ? BallKind::Lower : BallKind::Upper;
            track(mu_ball_pm(p, k, P), oracle::mu_ball(p, k, P));
            track(mu_truncated_ball(p, k, P), oracle::mu_truncated_ball(p, k, P));
            track(mu_Z(p, P), oracle::mu_Z(p, P));
        }
        // in-window intersection frames
        int frames = 0;
        for (int i = 0; i < 4000 && frames < 250; ++i) {
            const double ymax = std::min(P.H, P.R - P.C_eps - 0.4);
            const double y1 = rng.next_uniform(0.6, ymax);
            const double y2 = rng.next_uniform(0.0, y1 - 0.5);
            const double Y1 = std::exp(0.5 * y1), Y2 = std::exp(0.5 * y2);
            const double h = P.R - y1 - P.C_eps;
            const double Y12 = (1.0 + lambda_n(P.R - y1, P.R - y2, P)) * Y1 * Y2;
            const BallKind k = (i % 2 == 0) ? BallKind::Lower : BallKind::Upper;
            const double c = eps_factor(k, P);
            const double lo = std::max(c * (Y1 + Y2), Y12);
            const double hi = c * std::exp(0.5 * h) * (Y1 - Y2);
            if (hi <= lo * 1.02) continue;
            const double t = rng.next_uniform(lo * 1.01, hi);
            const IntersectionFrame f =
                intersection_frame(BandPoint{0.0, y1}, BandPoint{t, y2}, k, P);
            track(mu_intersection(f, P), oracle::mu_ball_intersection(y1, y2, t, k, P));
            ++frames;
        }
    }
    criterion(2, worst < 1e-6,
              fmt("%d closed-form evaluations vs quadrature, worst rel err %.2e", count,
                  worst));
}

// ---- criterion 3: expectation constants ------------------------------------

void criterion3() {
    bool ok = true;
    std::string detail;
    const QuadratureSpec tight{1e-9, 1e-13, 44};
    for (const auto& [alpha, nu] : {std::pair{0.75, 1.0}, {1.5, 1.0}, {2.0, 3.0}}) {
        const ModelParams P = make_params(alpha, nu, 65536.0);
        const double iso_c = iso_expectation_constant(P, tight);
        const double ext_c = ext_expectation_constant(P, tight);
        const int reps = (alpha == 0.75) ? 3000 : 600;  // heavy tails at small alpha
        for (const std::string which : {"iso", "ext"}) {
            std::vector<GapPoint> pts;
            for (double n : {4096.0, 16384.0, 65536.0})
                pts.push_back(gap_point(cell(alpha, nu, n, reps),
                                        which == "iso" ? iso_c : ext_c, which));
            const bool chain = chain_nonincreasing(pts);
            const bool tail = pts.back().gap < 0.05;
            ok = ok && chain && tail;
            detail += fmt("(%g,%g,%s: %.2f%%/%.2f%%/%.2f%% se %.2f%% %s) ", alpha, nu,
                          which.c_str(), 100 * pts[0].gap, 100 * pts[1].gap,
                          100 * pts[2].gap, 100 * pts[2].se,
                          chain && tail ? "ok" : "BAD");
        }
    }
    criterion(3, ok, detail);
}

// ---- criterion 4: variance growth regimes -----------------------------------

void criterion4() {
    std::vector<std::vector<CountRow>> grid;
    auto load_grid = [&](double alpha) {
        // the S_iso kurtosis grows along the grid at alpha < 1, so the
        // variance cells there need far more replicates for a stable fit
        const int reps = (alpha == 0.75) ? 3000 : 600;
        grid.clear();
        for (double n : {4096.0, 8192.0, 16384.0, 32768.0, 65536.0, 131072.0})
            grid.push_back(cell(alpha, 1.0, n, reps));
    };
    load_grid(0.75);
    const VarianceScaling low = variance_scaling(grid, "iso");
    load_grid(2.0);
    const VarianceScaling high = variance_scaling(grid, "iso");
    load_grid(1.0);
    const VarianceScaling crit = variance_scaling(grid, "iso");
    const bool ok_low = std::fabs(low.fit.slope - 1.5) <= 0.15;
    const bool ok_high = std::fabs(high.fit.slope - 1.0) <= 0.15;
    const bool ok_crit = crit.flatness < 2.0;
    criterion(4, ok_low && ok_high && ok_crit,
              fmt("slope(0.75)=%.3f+-%.3f [1.5+-0.15], slope(2)=%.3f+-%.3f [1.0+-0.15], "
                  "Var/(n ln n) spread(1)=x%.2f [<x2]",
                  low.fit.slope, low.fit.slope_se, high.fit.slope, high.fit.slope_se,
                  crit.flatness));
}

// ---- criterion 5: CLT dichotomy ---------------------------------------------

void criterion5() {
    const auto& hi2 = cell(2.0, 1.0, 65536.0, 1000);
    const NormalityResult ks2 = normality_test(column(hi2, "iso"));

    const auto& lo14 = cell(0.75, 1.0, 16384.0, 3000);
    const auto& lo16 = cell(0.75, 1.0, 65536.0, 3000);
    const NormalityResult sk14 = normality_test(column(lo14, "iso"));
    const NormalityResult sk16 = normality_test(column(lo16, "iso"));
    const NormalityResult ext16 = normality_test(column(lo16, "ext"));

    const bool ok_clt = ks2.ks < ks2.ks_threshold;
    const bool ok_skew = std::fabs(sk14.skewness) > 0.5 && std::fabs(sk16.skewness) > 0.5;
    const bool ok_ext = ext16.ks < ext16.ks_threshold;
    criterion(5, ok_clt && ok_skew && ok_ext,
              fmt("iso KS(2.0)=%.4f [<%.4f], iso skew(0.75)=%.2f/%.2f [|.|>0.5], "
                  "ext KS(0.75)=%.4f [<%.4f]",
                  ks2.ks, ks2.ks_threshold, sk14.skewness, sk16.skewness, ext16.ks,
                  ext16.ks_threshold));
}

// ---- criterion 6: extreme-point variance constant ---------------------------

void criterion6() {
    const ModelParams P = make_params(1.5, 1.0, 65536.0);
    const SigmaResult s = sigma_ext_constant(P, 30.0, -1.0, QuadratureSpec{1e-7, 1e-11, 40});
    const auto& rows = cell(1.5, 1.0, 65536.0, 600);
    const auto ci = jackknife_var_ci(column(rows, "ext"));
    const double ratio = ci.point / rows.front().n / s.sigma2;
    const double tol = 0.15 + (s.trunc.first_tail_bound + s.trunc.pair_tail_bound) / s.sigma2;
    criterion(6, std::fabs(ratio - 1.0) <= tol,
              fmt("Var[S_ext]/n = %.4f vs sigma2 = %.4f (ratio %.3f, tolerance 15%%, "
                  "truncation bounds %.1e/%.1e)",
                  ci.point / rows.front().n, s.sigma2, ratio, s.trunc.first_tail_bound,
                  s.trunc.pair_tail_bound));
}

// ---- criterion 7: conditional-variance collapse ------------------------------

void criterion7() {
    std::vector<ConditionalVariancePoint> pts;
    for (double n : {4096.0, 16384.0, 65536.0})
        pts.push_back(conditional_variance_cell(cell(0.75, 1.0, n, 3000), "h1", 1.0));
    const bool monotone = pts[1].ratio < pts[0].ratio && pts[2].ratio < pts[1].ratio;
    const bool tail = pts[2].ratio < 0.5;
    bool accept_ok = true;
    for (const auto& p : pts) accept_ok = accept_ok && !p.low_acceptance;

    const auto control = conditional_variance_cell(cell(2.0, 1.0, 65536.0, 1000), "h1", 1.0);
    const bool ok_control = control.ratio >= 0.8 && control.ratio <= 1.2;
    criterion(7, monotone && tail && accept_ok && ok_control,
              fmt("ratio(0.75) = %.3f/%.3f/%.3f [monotone, <0.5 at 2^16], "
                  "P(A_n) = %.2f/%.2f/%.2f, control(2.0) = %.3f [0.8..1.2]",
                  pts[0].ratio, pts[1].ratio, pts[2].ratio, pts[0].p_accept,
                  pts[1].p_accept, pts[2].p_accept, control.ratio));
}

// ---- criterion 8: degree law -------------------------------------------------

void criterion8() {
    const DegreeLawResult r = degree_law(1.5, 1.0, 1e5, 300, kMasterSeed + 5);
    const double mean_gap = std::fabs(r.mean_degree - r.theory_mean) / r.theory_mean;
    const bool ok_mean = mean_gap < 0.05;
    const bool ok_slope = r.slope_defined && std::fabs(r.ccdf_slope + 3.0) <= 0.3;
    criterion(8, ok_mean && ok_slope,
              fmt("mean degree %.4f vs %.4f (gap %.2f%%), CCDF slope %.2f [-3.0+-0.3]",
                  r.mean_degree, r.theory_mean, 100 * mean_gap, r.ccdf_slope));
}

// ---- criterion 9: stabilization-radius tail ----------------------------------

double stab_tail_constant(double alpha, double nu, double n, int reps) {
    const ModelParams P = make_params(alpha, nu, n);
    const double c0 = std::sqrt(3.0) * P.beta * (1.0 - std::exp(-8.0 * alpha)) / alpha;
    auto phi = [&](double t) {
        return std::min(alpha * t / 4.0, c0 * std::sqrt(t / 3.0));
    };
    const int nbins = 8;
    const std::vector<double> tgrid{0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
    std::vector<std::vector<std::uint64_t>> ge(nbins,
                                               std::vector<std::uint64_t>(tgrid.size(), 0));
    std::vector<std::uint64_t> tot(nbins, 0);
    for (int k = 0; k < reps; ++k) {
        const PointSet ps = sample_band(P, derive_seed(kMasterSeed + 99, 7000 + k), P.R);
        const HrgGraph g = build_fast(ps);
        for (std::uint32_t i = 0; i < ps.size(); ++i) {
            const double y = ps.band_points[i].y;
            if (y >= static_cast<double>(nbins) || y > P.H) continue;
            const int b = static_cast<int>(y);
            const double rxi = stabilization_radius(ps, g, i);
            tot[b] += 1;
            for (std::size_t t = 0; t < tgrid.size(); ++t)
                if (rxi >= tgrid[t]) ge[b][t] += 1;
        }
    }
    double c_hat = 0.0;
    for (int b = 0; b < nbins; ++b) {
        if (tot[b] < 2000) continue;
        for (std::size_t t = 0; t < tgrid.size(); ++t) {
            const double p = static_cast<double>(ge[b][t]) / static_cast<double>(tot[b]);
            if (p <= 0.0) continue;
            // bound must hold across the bin; its weakest point is the lower edge
            c_hat = std::max(c_hat, p * std::exp(-0.5 * alpha * b) * std::exp(phi(tgrid[t])));
        }
    }
    return c_hat;
}

void criterion9() {
    std::vector<double> cs;
    for (const auto& [n, reps] : {std::pair{4096.0, 240}, {16384.0, 120}, {65536.0, 60}})
        cs.push_back(stab_tail_constant(1.5, 1.0, n, reps));
    const double lo = std::min({cs[0], cs[1], cs[2]});
    const double hi = std::max({cs[0], cs[1], cs[2]});
    criterion(9, lo > 0.0 && hi / lo < 3.0,
              fmt("calibrated tail constants %.3f/%.3f/%.3f across n (spread x%.2f < x3)",
                  cs[0], cs[1], cs[2], hi / lo));
}

// ---- criterion 10: property battery ------------------------------------------

void criterion10() {
    int bad = 0;
    std::string detail;
    auto prop = [&](bool ok, const char* name) {
        if (!ok) {
            ++bad;
            detail += fmt("[%s FAILED] ", name);
        }
    };

    {  // determinism under thread counts
        const auto a = run_cell(1.25, 1.0, 2048.0, 64, kMasterSeed, 1);
        const auto b = run_cell(1.25, 1.0, 2048.0, 64, kMasterSeed, 2);
        bool same = a.size() == b.size();
        for (std::size_t i = 0; same && i < a.size(); ++i)
            same = a[i].seed == b[i].seed && a[i].s_iso == b[i].s_iso
                && a[i].s_ext == b[i].s_ext && a[i].N == b[i].N;
        prop(same, "thread-determinism");
    }
    {  // density normalization and defect bound
        bool ok = true;
        for (const auto& [alpha, n] : {std::pair{0.75, 4096.0}, {2.0, 65536.0}}) {
            const ModelParams P = make_params(alpha, 1.0, n);
            const double total = integrate([&](double r) { return rho_radial(r, P); },
                                           0.0, P.R, QuadratureSpec{1e-12, 1e-14, 48});
            ok = ok && std::fabs(total - 1.0) < 1e-10;
        }
        const ModelParams P = make_params(1.5, 1.0, 4096.0);
        const double bound = 2.0 * P.alpha / (std::exp(P.alpha * P.R) - 2.0);
        for (int i = 0; i < 10000; ++i) {
            const double y = P.R * (i + 0.5) / 10000.0;
            ok = ok && std::fabs(defect_density(y, P) - P.alpha * std::exp(-P.alpha * y))
                           <= bound;
        }
        prop(ok, "density-normalization+defect-bound");
    }
    {  // delta sandwich
        const ModelParams P = make_params(1.0, 1.0, 2e5);
        Rng rng(kMasterSeed + 3);
        bool ok = true;
        for (int i = 0; i < 2000; ++i) {
            const double ysum = rng.next_uniform(0.0, P.R - P.C_eps - 1e-9);
            const double y1 = rng.next_uniform(0.0, ysum);
            const double ratio =
                delta(P.R - y1, P.R - (ysum - y1), P).value * std::exp(-0.5 * ysum);
            ok = ok && ratio >= 1.0 - P.eps && ratio <= 1.0 + P.eps;
        }
        prop(ok, "delta-sandwich");
    }
    {  // edge_test vs metric, excluding the 1e-9 boundary shell
        const ModelParams P = make_params(1.0, 1.0, std::exp(10.0));
        Rng rng(kMasterSeed + 4);
        bool ok = true;
        for (int i = 0; i < 20000; ++i) {
            DiscPoint a{rng.next_uniform(0.0, P.R), rng.next_uniform(-kPi, kPi), 0.0};
            DiscPoint b{rng.next_uniform(0.0, P.R), rng.next_uniform(-kPi, kPi), 0.0};
            a.y = P.R - a.r;
            b.y = P.R - b.r;
            const double d = hyp_dist(a, b);
            if (std::fabs(d - P.R) < 1e-9) continue;
            ok = ok && (edge_test(a, b, P) == (d <= P.R));
        }
        prop(ok, "edge-metric-equivalence");
    }
    {  // score invariances on sampled graphs
        bool ok = true;
        for (int s = 0; s < 10; ++s) {
            const ModelParams P = make_params(0.8, 1.0, 1500.0);
            PointSet ps = sample_disc(P, derive_seed(kMasterSeed + 6, s));
            const HrgGraph g = build_fast(ps);
            const auto iso = isolated_flags(g);
            const auto ext = extreme_flags(ps, g);
            const ScoreCounts base = count_scores(ps, g);
            for (std::size_t i = 0; i < ps.size(); ++i)
                ok = ok && (!iso[i] || ext[i]);
            for (std::size_t i = 0; i < ps.size(); ++i) {
                double th = ps.points[i].theta + 1.0;
                if (th > kPi) th -= 2.0 * kPi;
                ps.points[i].theta = th;
                ps.band_points[i] = phi(ps.points[i], P);
            }
            const ScoreCounts rot = count_scores(ps, build_fast(ps));
            ok = ok && rot.s_iso == base.s_iso && rot.s_ext == base.s_ext
               && rot.s_iso_H == base.s_iso_H && rot.s_ext_H == base.s_ext_H;
        }
        prop(ok, "scores-invariance");
    }
    {  // jackknife mean CI calibration against the Poisson mean
        Rng rng(kMasterSeed + 7);
        int covered = 0;
        for (int run = 0; run < 50; ++run) {
            std::vector<double> xs;
            for (int i = 0; i < 40; ++i)
                xs.push_back(static_cast<double>(poisson(rng, 2048.0)));
            const auto ci = jackknife_mean_ci(xs);
            covered += (ci.lo <= 2048.0 && 2048.0 <= ci.hi);
        }
        prop(covered >= 45, "jackknife-coverage");
    }
    {  // constants stable under tolerance tightening
        const ModelParams P = make_params(1.5, 1.0, 1e5);
        const double a = iso_expectation_constant(P, QuadratureSpec{1e-9, 1e-13, 40});
        const double b = iso_expectation_constant(P, QuadratureSpec{1e-11, 1e-15, 46});
        prop(std::fabs(a - b) / b < 1e-6, "quadrature-stability");
    }
    criterion(10, bad == 0,
              bad == 0 ? "determinism, normalization, sandwich, metric equivalence, "
                         "score invariances, CI calibration, quadrature stability"
                       : detail);
}

}  // namespace

int main() {
    std::printf("acceptance suite, master seed %llu\n",
                static_cast<unsigned long long>(kMasterSeed));
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures;
}
