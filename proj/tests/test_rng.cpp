#include "doctest.h"

#include <cmath>
#include <vector>

#include "hrg/rng.hpp"

using namespace hrg;

TEST_CASE("Rng: determinism and open-unit-interval range") {
    Rng a(12345), b(12345);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c(9);
    for (int i = 0; i < 100000; ++i) {
        const double u = c.next_uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("derive_seed: distinct replicate streams, order independent") {
    const std::uint64_t m = 777;
    CHECK(derive_seed(m, 0) != derive_seed(m, 1));
    CHECK(derive_seed(m, 1) != derive_seed(m, 2));
    CHECK(derive_seed(m, 5) == derive_seed(m, 5));
    CHECK(derive_seed(m, 5) != derive_seed(m + 1, 5));
}

TEST_CASE("poisson: mean and dispersion across regimes") {
    for (double mean : {0.5, 4.0, 35.0, 1000.0}) {
        Rng rng(42);
        const int reps = 20000;
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < reps; ++i) {
            const double k = static_cast<double>(poisson(rng, mean));
            s += k;
            s2 += k * k;
        }
        const double m = s / reps;
        const double v = (s2 - reps * m * m) / (reps - 1);
        // 5-sigma band on the sample mean, dispersion within 5% of 1
        CHECK(std::fabs(m - mean) < 5.0 * std::sqrt(mean / reps));
        CHECK(v / m > 0.95);
        CHECK(v / m < 1.05);
    }
}

TEST_CASE("poisson: chi-square against the exact pmf") {
    for (double mean : {4.0, 35.0}) {
        Rng rng(1234);
        const int reps = 50000;
        const int kmax = static_cast<int>(mean + 8.0 * std::sqrt(mean));
        std::vector<int> obs(kmax + 2, 0);
        for (int i = 0; i < reps; ++i) {
            const std::uint64_t k = poisson(rng, mean);
            obs[std::min<std::uint64_t>(k, kmax + 1)] += 1;
        }
        // expected counts, tail bucket last
        std::vector<double> expd(kmax + 2, 0.0);
        double pk = std::exp(-mean);
        double cum = 0.0;
        for (int k = 0; k <= kmax; ++k) {
            expd[k] = reps * pk;
            cum += pk;
            pk *= mean / (k + 1);
        }
        expd[kmax + 1] = reps * (1.0 - cum);
        double chi2 = 0.0;
        int dof = 0;
        double o_merge = 0.0, e_merge = 0.0;
        for (int k = 0; k <= kmax + 1; ++k) {
            o_merge += obs[k];
            e_merge += expd[k];
            if (e_merge >= 10.0) {
                chi2 += (o_merge - e_merge) * (o_merge - e_merge) / e_merge;
                ++dof;
                o_merge = e_merge = 0.0;
            }
        }
        // generous: P(chi2 > dof + 5 sqrt(2 dof)) is far below 1e-3
        CHECK(chi2 < dof + 5.0 * std::sqrt(2.0 * dof));
    }
}
