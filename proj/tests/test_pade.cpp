#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "treepde/errors.hpp"
#include "treepde/pade.hpp"

using namespace treepde;

namespace {

// Taylor coefficients of P/Q (q[0] = 1) by long division.
std::vector<double> taylor(const std::vector<double>& p, const std::vector<double>& q, int K) {
    std::vector<double> c(static_cast<std::size_t>(K) + 1, 0.0);
    for (int n = 0; n <= K; ++n) {
        double v = n < static_cast<int>(p.size()) ? p[n] : 0.0;
        for (int j = 1; j < static_cast<int>(q.size()) && j <= n; ++j) v -= q[j] * c[n - j];
        c[n] = v;
    }
    return c;
}

double poly(const std::vector<double>& a, double z) {
    double v = 0.0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) v = v * z + *it;
    return v;
}

}  // namespace

TEST_CASE("exp fixture gives 19/7") {
    std::vector<double> c{1, 1, 0.5, 1.0 / 6, 1.0 / 24};
    PadeApproximant P = build_pade(c, 2, 2);
    CHECK(std::fabs(eval_pade(P, 1.0) - 19.0 / 7.0) < 1e-6);
    // Hand solution: Q = 1 - z/2 + z^2/12, P = 1 + z/2 + z^2/12.
    CHECK(P.q[1] == doctest::Approx(-0.5));
    CHECK(P.q[2] == doctest::Approx(1.0 / 12));
    CHECK(P.p[1] == doctest::Approx(0.5));
    CHECK(P.p[2] == doctest::Approx(1.0 / 12));
    CHECK(eval_pade(P, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("M = 0 is the truncated series") {
    std::vector<double> c{0.3, -1.2, 2.5, 0.7};
    PadeApproximant P = build_pade(c, 3, 0);
    for (int i = 0; i < 4; ++i) CHECK(P.p[i] == c[i]);
    CHECK(eval_pade(P, 0.5) == doctest::Approx(poly(c, 0.5)));
}

TEST_CASE("geometric and Grandi series") {
    std::vector<double> g{1, -1, 1, -1, 1, -1};
    PadeApproximant P = build_pade(g, 0, 1);
    CHECK(P.q[1] == doctest::Approx(1.0));
    CHECK(eval_pade(P, 1.0) == doctest::Approx(0.5));
    SeriesSum s = sum_series(g);
    CHECK(std::fabs(s.value - 0.5) < 1e-14);
    CHECK_FALSE(s.diag.pole_flag());

    std::vector<double> d{1, -2, 4, -8, 16};
    CHECK(std::fabs(sum_series(d).value - 1.0 / 3.0) < 1e-10);
    CHECK(sum_series({0.42}).value == 0.42);
}

TEST_CASE("rational series are reconstructed exactly") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        // Types contained in the near-diagonal order that sum_series picks for K.
        const int K = 2 + static_cast<int>(gen() % 6);
        const int L = static_cast<int>(gen() % ((K + 1) / 2 + 1)), M = 1 + static_cast<int>(gen() % (K / 2));
        std::vector<double> p(L + 1), q(M + 1);
        for (auto& v : p) v = U(gen);
        q[0] = 1.0;
        for (int j = 1; j <= M; ++j) q[j] = 0.6 * U(gen) / M;
        if (std::fabs(poly(q, 1.0)) < 0.2) continue;
        auto c = taylor(p, q, K);
        const double target = poly(p, 1.0) / poly(q, 1.0);
        SeriesSum s = sum_series(c);
        CHECK(std::fabs(s.value - target) <= 1e-10 * std::max(1.0, std::fabs(target)));
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("poles and degeneracy") {
    // 1/(1 - 2z) has its pole at z = 1/2.
    std::vector<double> c{1, 2, 4, 8};
    SeriesSum s = sum_series(c, std::make_pair(0, 1));
    CHECK(s.diag.pole_flag());
    CHECK(s.diag.poles.at(0) == doctest::Approx(0.5));

    // 1/(1 - z): exact pole at the evaluation point.
    PadeApproximant P = build_pade({1, 1, 1}, 0, 1);
    CHECK_THROWS_AS(eval_pade(P, 1.0), PoleError);

    // All-zero higher coefficients make every M >= 1 table singular.
    CHECK_THROWS_AS(build_pade({1, 0, 0, 0, 0}, 2, 2), DegenerateTableError);
    SeriesSum f = sum_series({1, 0, 0, 0, 0});
    CHECK(f.diag.fallback);
    CHECK(f.value == doctest::Approx(1.0));
}

TEST_CASE("coefficient perturbation stability") {
    // Frozen strategy-B coefficients of ex1 at (0, 0.5).
    const std::vector<double> c{0.22936010808703097, -0.027057282917587838, 0.0032434395416531636,
                                -0.00038905455010853956};
    const double base = sum_series(c).value;
    double cmax = 0.0;
    for (double v : c) cmax = std::max(cmax, std::fabs(v));
    const double eps = 1e-3 * cmax;
    std::mt19937_64 gen(3);
    double kmin = 1e300, kmax = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto d = c;
        for (auto& v : d) v += (gen() & 1 ? eps : -eps);
        double k = std::fabs(sum_series(d).value - base) / eps;
        CHECK(std::isfinite(k));
        kmin = std::min(kmin, k);
        kmax = std::max(kmax, k);
    }
    CHECK(kmax < 10.0);
}
