#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hrg {

struct Moments {
    std::size_t count = 0;
    double mean = 0.0;
    double var = 0.0;  // unbiased
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

inline Moments moments(const std::vector<double>& xs) {
    Moments m;
    m.count = xs.size();
    if (xs.empty()) return m;
    double s = 0.0;
    for (double x : xs) s += x;
    m.mean = s / xs.size();
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double d = x - m.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    const double n = static_cast<double>(xs.size());
    if (xs.size() > 1) m.var = m2 / (n - 1.0);
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 > 0.0) {
        m.skewness = m3 / std::pow(m2, 1.5);
        m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return m;
}

struct ConfidenceInterval {
    double point = 0.0;
    double se = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

// Delete-one jackknife for a statistic given as a callable over the sample.
template <typename Stat>
inline ConfidenceInterval jackknife_ci(const std::vector<double>& xs, Stat stat,
                                       double z = 1.96) {
    if (xs.size() < 3) throw std::invalid_argument("jackknife_ci: need >= 3 samples");
    ConfidenceInterval ci;
    ci.point = stat(xs);
    std::vector<double> loo;
    loo.reserve(xs.size());
    std::vector<double> reduced(xs.size() - 1);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        std::size_t w = 0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (i != k) reduced[w++] = xs[i];
        loo.push_back(stat(reduced));
    }
    double mbar = 0.0;
    for (double v : loo) mbar += v;
    mbar /= loo.size();
    double s2 = 0.0;
    for (double v : loo) s2 += (v - mbar) * (v - mbar);
    const double n = static_cast<double>(xs.size());
    ci.se = std::sqrt((n - 1.0) / n * s2);
    ci.lo = ci.point - z * ci.se;
    ci.hi = ci.point + z * ci.se;
    return ci;
}

inline ConfidenceInterval jackknife_mean_ci(const std::vector<double>& xs, double z = 1.96) {
    return jackknife_ci(xs, [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / v.size();
    }, z);
}

inline ConfidenceInterval jackknife_var_ci(const std::vector<double>& xs, double z = 1.96) {
    return jackknife_ci(xs, [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        const double m = s / v.size();
        double q = 0.0;
        for (double x : v) q += (x - m) * (x - m);
        return q / (v.size() - 1);
    }, z);
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / 1.4142135623730951);
}

// Kolmogorov-Smirnov distance of a sample to the standard normal.
inline double ks_distance_to_normal(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("ks_distance_to_normal: empty sample");
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double F = normal_cdf(xs[i]);
        d = std::max(d, std::max(F - i / n, (i + 1) / n - F));
    }
    return d;
}

// Standardize by the sample's own mean and standard deviation.
inline std::vector<double> standardize(const std::vector<double>& xs) {
    const Moments m = moments(xs);
    if (m.var <= 0.0) throw std::invalid_argument("standardize: zero variance");
    const double sd = std::sqrt(m.var);
    std::vector<double> z;
    z.reserve(xs.size());
    for (double x : xs) z.push_back((x - m.mean) / sd);
    return z;
}

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
};

inline SlopeFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 3)
        throw std::invalid_argument("fit_line: need >= 3 matched points");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (f.intercept + f.slope * xs[i]);
        ss_res += r * r;
    }
    f.slope_se = std::sqrt(ss_res / (n - 2.0) / sxx);
    return f;
}

}  // namespace hrg
