#pragma once

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hrg/graph.hpp"
#include "hrg/model.hpp"
#include "hrg/rng.hpp"
#include "hrg/sampler.hpp"
#include "hrg/scores.hpp"
#include "hrg/stats.hpp"

namespace hrg {

struct ExperimentConfig {
    std::vector<double> alphas;
    double nu = 1.0;
    std::vector<double> n_grid;
    int replicates = 200;
    std::uint64_t master_seed = 1;
    std::string statistics = "full";  // "full" | "iso" | "ext"
    bool conditioning = false;
    std::string conditioning_height = "h1";  // "h1" | "H" | numeric literal
    int threads = 0;                          // 0 = hardware concurrency
    double budget_points = 4e9;               // guard on sum of n * replicates
};

inline void validate(const ExperimentConfig& c) {
    if (c.alphas.empty() || c.n_grid.empty())
        throw std::invalid_argument("config: alphas and n_grid must be nonempty");
    if (c.replicates < 30)
        throw std::invalid_argument("config: moment estimates need >= 30 replicates");
    for (std::size_t i = 1; i < c.n_grid.size(); ++i)
        if (!(c.n_grid[i] > c.n_grid[i - 1]))
            throw std::invalid_argument("config: n_grid must be strictly increasing");
    if (c.statistics != "full" && c.statistics != "iso" && c.statistics != "ext")
        throw std::invalid_argument("config: unknown statistics selector");
    double total = 0.0;
    for (double n : c.n_grid) total += n * c.replicates;
    total *= static_cast<double>(c.alphas.size());
    if (total > c.budget_points)
        throw std::invalid_argument("config: n_grid x replicates exceeds the point budget");
}

// Conditioning height for the no-points-above event.
inline double conditioning_height_value(const std::string& formula,
                                        const ModelParams& p) {
    if (formula == "h1")
        return p.R / (2.0 * p.alpha) + std::log(std::log(p.R)) / (2.0 * p.alpha);
    if (formula == "H") return p.H;
    std::size_t pos = 0;
    const double v = std::stod(formula, &pos);
    if (pos != formula.size())
        throw std::invalid_argument("config: bad conditioning height: " + formula);
    return v;
}

// One replicate of one (alpha, n) cell.
struct CountRow {
    double alpha = 0.0;
    double n = 0.0;
    std::uint32_t replicate = 0;
    std::uint64_t seed = 0;
    std::uint64_t N = 0;
    std::uint64_t s_iso = 0;
    std::uint64_t s_ext = 0;
    std::uint64_t s_iso_H = 0;
    std::uint64_t s_ext_H = 0;
    double mean_degree = 0.0;
    double y_max = 0.0;  // largest defect radius in the sample
};

// Replicate streams are derived from (master_seed, alpha, nu, n, k) only, so
// a cell yields identical rows no matter which config or thread count ran it.
inline std::uint64_t cell_seed(std::uint64_t master, double alpha, double nu, double n) {
    std::uint64_t s = derive_seed(master, std::bit_cast<std::uint64_t>(alpha));
    s = derive_seed(s, std::bit_cast<std::uint64_t>(nu));
    return derive_seed(s, std::bit_cast<std::uint64_t>(n));
}

inline void parallel_for(std::size_t count, int threads,
                         const std::function<void(std::size_t)>& fn) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const unsigned workers =
        std::min<std::size_t>(count, threads > 0 ? static_cast<unsigned>(threads) : hw);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

inline CountRow run_replicate(const ModelParams& p, double alpha, double n,
                              std::uint32_t k, std::uint64_t seed) {
    CountRow row;
    row.alpha = alpha;
    row.n = n;
    row.replicate = k;
    row.seed = seed;
    const PointSet ps = sample_disc(p, seed);
    const HrgGraph g = build_fast(ps);
    const ScoreCounts sc = count_scores(ps, g);
    row.N = ps.size();
    row.s_iso = sc.s_iso;
    row.s_ext = sc.s_ext;
    row.s_iso_H = sc.s_iso_H;
    row.s_ext_H = sc.s_ext_H;
    double dsum = 0.0, ymax = 0.0;
    for (auto d : g.degrees) dsum += d;
    for (const auto& q : ps.points) ymax = std::max(ymax, q.y);
    row.mean_degree = ps.size() ? dsum / static_cast<double>(ps.size()) : 0.0;
    row.y_max = ymax;
    return row;
}

// All replicates of one cell, replicate-parallel, rows in replicate order.
inline std::vector<CountRow> run_cell(double alpha, double nu, double n,
                                      int replicates, std::uint64_t master_seed,
                                      int threads = 0) {
    const ModelParams p = make_params(alpha, nu, n);
    const std::uint64_t cs = cell_seed(master_seed, alpha, nu, n);
    std::vector<CountRow> rows(replicates);
    parallel_for(static_cast<std::size_t>(replicates), threads, [&](std::size_t k) {
        rows[k] = run_replicate(p, alpha, n, static_cast<std::uint32_t>(k),
                                derive_seed(cs, k));
    });
    return rows;
}

// Raw count table over the whole config grid, cells in (alpha, n) order.
inline std::vector<CountRow> run_counts(const ExperimentConfig& c) {
    validate(c);
    std::vector<CountRow> all;
    for (double alpha : c.alphas)
        for (double n : c.n_grid) {
            auto rows = run_cell(alpha, c.nu, n, c.replicates, c.master_seed, c.threads);
            all.insert(all.end(), rows.begin(), rows.end());
        }
    return all;
}

// ---- aggregation -----------------------------------------------------------

inline std::vector<double> column(const std::vector<CountRow>& rows,
                                  const std::string& which) {
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) {
        if (which == "iso") v.push_back(static_cast<double>(r.s_iso));
        else if (which == "ext") v.push_back(static_cast<double>(r.s_ext));
        else if (which == "iso_H") v.push_back(static_cast<double>(r.s_iso_H));
        else if (which == "ext_H") v.push_back(static_cast<double>(r.s_ext_H));
        else if (which == "N") v.push_back(static_cast<double>(r.N));
        else if (which == "mean_degree") v.push_back(r.mean_degree);
        else throw std::invalid_argument("column: unknown statistic " + which);
    }
    return v;
}

struct ConvergencePoint {
    double n = 0.0;
    double mean_over_n = 0.0;
    double rel_gap = 0.0;  // |mean/n - limit| / limit
};

struct ConvergenceTable {
    std::vector<ConvergencePoint> points;  // in increasing n
    bool gap_decreasing = false;           // strictly along the grid
};

// E[S]/n against the limit constant, per n.
inline ConvergenceTable expectation_convergence(
    const std::vector<std::vector<CountRow>>& cells, double limit_constant,
    const std::string& which) {
    if (cells.size() < 2)
        throw std::invalid_argument("expectation_convergence: need >= 2 grid points");
    ConvergenceTable t;
    for (const auto& rows : cells) {
        const Moments m = moments(column(rows, which));
        ConvergencePoint pt;
        pt.n = rows.front().n;
        pt.mean_over_n = m.mean / pt.n;
        pt.rel_gap = std::fabs(pt.mean_over_n - limit_constant) / limit_constant;
        t.points.push_back(pt);
    }
    t.gap_decreasing = true;
    for (std::size_t i = 1; i < t.points.size(); ++i)
        if (!(t.points[i].rel_gap < t.points[i - 1].rel_gap)) t.gap_decreasing = false;
    return t;
}

struct VarianceScaling {
    SlopeFit fit;              // ln Var vs ln n
    double flatness = 0.0;     // max/min of Var/(n ln n) across the grid
};

inline VarianceScaling variance_scaling(const std::vector<std::vector<CountRow>>& cells,
                                        const std::string& which) {
    if (cells.size() < 4)
        throw std::invalid_argument("variance_scaling: need >= 4 grid points");
    std::vector<double> lx, ly, ratio;
    for (const auto& rows : cells) {
        if (rows.size() < 200)
            throw std::invalid_argument("variance_scaling: need >= 200 replicates");
        const Moments m = moments(column(rows, which));
        const double n = rows.front().n;
        lx.push_back(std::log(n));
        ly.push_back(std::log(m.var));
        ratio.push_back(m.var / (n * std::log(n)));
    }
    VarianceScaling vs;
    vs.fit = fit_line(lx, ly);
    double lo = ratio[0], hi = ratio[0];
    for (double r : ratio) {
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    vs.flatness = hi / lo;
    return vs;
}

enum class NormalityVerdict { NoVerdict, NormalConsistent, NonNormal, Inconclusive };

struct NormalityResult {
    double ks = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double ks_threshold = 0.0;
    NormalityVerdict verdict = NormalityVerdict::NoVerdict;
};

// KS of the internally standardized sample against N(0,1); the threshold is
// the 1% asymptotic critical value relaxed by 1.5 for the estimated moments.
// Verdicts need >= 500 replicates; |skewness| > 0.5 marks non-normality.
inline NormalityResult normality_test(const std::vector<double>& sample) {
    NormalityResult r;
    const Moments m = moments(sample);
    r.skewness = m.skewness;
    r.excess_kurtosis = m.excess_kurtosis;
    r.ks = ks_distance_to_normal(standardize(sample));
    r.ks_threshold = 1.63 / std::sqrt(static_cast<double>(sample.size())) * 1.5;
    if (sample.size() < 500) {
        r.verdict = NormalityVerdict::NoVerdict;
    } else if (r.ks < r.ks_threshold) {
        r.verdict = NormalityVerdict::NormalConsistent;
    } else if (std::fabs(r.skewness) > 0.5) {
        r.verdict = NormalityVerdict::NonNormal;
    } else {
        r.verdict = NormalityVerdict::Inconclusive;
    }
    return r;
}

struct ConditionalVariancePoint {
    double n = 0.0;
    double height = 0.0;     // conditioning height h1
    double p_accept = 0.0;   // empirical P(A_n)
    double var_all = 0.0;
    double var_cond = 0.0;
    double ratio = 0.0;
    bool low_acceptance = false;  // acceptance below 10%: likely a bug upstream
};

// Var[S^iso | no points above h] / Var[S^iso], conditioning by rejection.
inline ConditionalVariancePoint conditional_variance_cell(
    const std::vector<CountRow>& rows, const std::string& height_formula,
    double nu, const std::string& which = "iso") {
    ConditionalVariancePoint out;
    out.n = rows.front().n;
    const ModelParams p = make_params(rows.front().alpha, nu, out.n);
    out.height = conditioning_height_value(height_formula, p);
    std::vector<double> all = column(rows, which), kept;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].y_max <= out.height) kept.push_back(all[i]);
    out.p_accept = static_cast<double>(kept.size()) / rows.size();
    out.low_acceptance = out.p_accept < 0.10;
    out.var_all = moments(all).var;
    out.var_cond = kept.size() >= 2 ? moments(kept).var : 0.0;
    out.ratio = out.var_all > 0.0 ? out.var_cond / out.var_all : 0.0;
    return out;
}

struct DegreeLawResult {
    double mean_degree = 0.0;       // averaged over replicates
    double theory_mean = 0.0;       // 8 alpha^2 nu / (pi (2 alpha - 1)^2)
    double ccdf_slope = 0.0;        // log-log slope of pooled N_{>=k}, ~ -2 alpha
    bool slope_defined = false;
    int replicates = 0;
};

inline double mean_degree_constant(double alpha, double nu) {
    return 8.0 * alpha * alpha * nu / (kPi * (2.0 * alpha - 1.0) * (2.0 * alpha - 1.0));
}

// Degree statistics pooled across replicates (the tail needs pooling; one
// sample rarely holds enough high-degree vertices).
inline DegreeLawResult degree_law(double alpha, double nu, double n, int replicates,
                                  std::uint64_t master_seed, int threads = 0) {
    const ModelParams p = make_params(alpha, nu, n);
    const std::uint64_t cs = cell_seed(master_seed, alpha, nu, n);
    std::vector<double> means(replicates);
    std::vector<std::vector<std::uint64_t>> hists(replicates);
    parallel_for(static_cast<std::size_t>(replicates), threads, [&](std::size_t k) {
        const PointSet ps = sample_disc(p, derive_seed(cs, k));
        const HrgGraph g = build_fast(ps);
        double s = 0.0;
        std::uint32_t dmax = 0;
        for (auto d : g.degrees) {
            s += d;
            dmax = std::max(dmax, d);
        }
        means[k] = ps.size() ? s / static_cast<double>(ps.size()) : 0.0;
        auto& h = hists[k];
        h.assign(dmax + 1, 0);
        for (auto d : g.degrees) h[d] += 1;
    });
    DegreeLawResult r;
    r.replicates = replicates;
    r.theory_mean = mean_degree_constant(alpha, nu);
    for (double m : means) r.mean_degree += m;
    r.mean_degree /= replicates;

    std::size_t dmax = 0;
    for (const auto& h : hists) dmax = std::max(dmax, h.size());
    std::vector<std::uint64_t> tail(dmax + 1, 0);
    for (const auto& h : hists)
        for (std::size_t d = 0; d < h.size(); ++d) tail[d] += h[d];
    for (std::size_t d = dmax; d-- > 0;) tail[d] += tail[d + 1];

    const std::uint32_t k_min = 24;  // past the mixed-Poisson bulk, as in degree_stats
    std::uint32_t k_max = k_min;
    while (k_max + 1 <= dmax && tail[k_max + 1] >= 50) ++k_max;
    if (k_max > k_min + 2) {
        std::vector<double> lx, ly;
        for (std::uint32_t k = k_min; k <= k_max; ++k) {
            lx.push_back(std::log(static_cast<double>(k)));
            ly.push_back(std::log(static_cast<double>(tail[k])));
        }
        r.ccdf_slope = fit_line(lx, ly).slope;
        r.slope_defined = true;
    }
    return r;
}

}  // namespace hrg
