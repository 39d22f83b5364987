#include <doctest.h>

#include <cmath>
#include <vector>

#include "treepde/estimator.hpp"
#include "treepde/fdm.hpp"

using namespace treepde;

namespace {

// Taylor coefficients in eps of u' = eps * f(u), u(0) = u0, by RK4 on the
// coefficient hierarchy. f(u) = sum c_j u^j with constant c_j.
std::vector<double> ode_coefficients(double u0, const std::vector<std::pair<int, double>>& f,
                                     double t, int K) {
    auto rhs = [&](const std::vector<double>& a) {
        std::vector<double> d(K + 1, 0.0);
        for (const auto& [j, c] : f) {
            // Coefficients of (sum a_k eps^k)^j up to eps^(K-1).
            std::vector<double> pw(K + 1, 0.0);
            pw[0] = 1.0;
            for (int r = 0; r < j; ++r) {
                std::vector<double> nx(K + 1, 0.0);
                for (int i = 0; i <= K; ++i)
                    for (int k = 0; i + k <= K; ++k) nx[i + k] += pw[i] * a[k];
                pw = nx;
            }
            for (int n = 1; n <= K; ++n) d[n] += c * pw[n - 1];
        }
        return d;
    };
    std::vector<double> a(K + 1, 0.0);
    a[0] = u0;
    const int steps = 2000;
    const double h = t / steps;
    for (int s = 0; s < steps; ++s) {
        auto k1 = rhs(a);
        auto tmp = a;
        for (int i = 0; i <= K; ++i) tmp[i] = a[i] + 0.5 * h * k1[i];
        auto k2 = rhs(tmp);
        for (int i = 0; i <= K; ++i) tmp[i] = a[i] + 0.5 * h * k2[i];
        auto k3 = rhs(tmp);
        for (int i = 0; i <= K; ++i) tmp[i] = a[i] + h * k3[i];
        auto k4 = rhs(tmp);
        for (int i = 0; i <= K; ++i) a[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    return a;
}

Problem homogeneous(double u0) {
    Problem p = builtin_problem("ex3", {{"a", 0.25}});
    p.initial = [u0](const Point&) { return u0; };
    return p;
}

double cn_oracle(const Problem& p, double x, double t) {
    Grid g;
    g.x_lo = -20;
    g.x_hi = 20;
    g.dx = 0.05;
    g.dt = 1e-3;
    g.T = t;
    Field f = solve(p, g, zero_dirichlet());
    return f.at(static_cast<int>(std::lround((x - g.x_lo) / g.dx)));
}

EstimatorConfig cfg(Strategy s, long N, int ne_max) {
    EstimatorConfig c;
    c.strategy = s;
    c.N = N;
    c.ne_max = ne_max;
    return c;
}

}  // namespace

TEST_CASE("single-leaf functionals") {
    Problem p = builtin_problem("ex1");
    RandomTree t;
    t.t = 0.4;
    t.k = 1;
    t.nodes.resize(1);
    t.nodes[0].horizon = 0.4;
    t.nodes[0].position_at_event = {0.7, 0.0};
    const double g = p.initial({0.7, 0.0});
    CHECK(evaluate_sample_A(p, t, 0.4).functional == doctest::Approx(std::exp(0.4) * g));
    CHECK(evaluate_sample_B(p, t, 0.4, 0.6).functional == doctest::Approx(g / 0.6));
}

TEST_CASE("accumulate edge cases") {
    BranchSeries e = accumulate({}, 3);
    CHECK(e.n_total == 0);
    for (double v : e.coefficients()) CHECK(v == 0.0);

    std::vector<SampleValue> same(10, SampleValue{0, 1, 2.5, true, false});
    auto c = accumulate(same, 3).coefficients();
    CHECK(c[0] == 2.5);
    CHECK(c[1] == 0.0);
    CHECK(c[3] == 0.0);
}

TEST_CASE("homogeneous problems reproduce the ODE coefficients") {
    const std::vector<std::pair<int, double>> f{{2, -1.25}, {3, -1.0}};
    for (double u0 : {-1.0, 0.8}) {
        Problem p = homogeneous(u0);
        auto exact = ode_coefficients(u0, f, 0.5, 3);
        for (Strategy s : {Strategy::A, Strategy::B}) {
            PointEstimate e = estimate_point(p, {0.0, 0.0}, 0.5, cfg(s, 200000, 3), RngStream(4, 0));
            auto se = e.series.coefficient_stderr();
            for (int n = 0; n <= 3; ++n) {
                INFO("u0=", u0, " n=", n);
                CHECK(std::fabs(e.coefficients[n] - exact[n]) <= 4 * se[n] + 1e-12);
            }
        }
    }
}

TEST_CASE("first Duhamel iterate of ex1 by quadrature") {
    // With g the heat kernel at time 1, the n = 1 term at x = 0 reduces to
    // -int_0^t ds / (4 pi sqrt((1+s)(1+s+2(t-s)))).
    const double t = 0.5;
    const int nq = 2000;
    double a1 = 0.0;
    for (int i = 0; i <= nq; ++i) {
        double s = t * i / nq;
        double w = (i == 0 || i == nq) ? 1 : (i % 2 ? 4 : 2);
        a1 += w / (4 * M_PI * std::sqrt((1 + s) * (1 + s + 2 * (t - s))));
    }
    a1 *= -t / (3.0 * nq);
    Problem p = builtin_problem("ex1");
    for (Strategy s : {Strategy::A, Strategy::B}) {
        PointEstimate e = estimate_point(p, {0.0, 0.0}, t, cfg(s, 400000, 3), RngStream(8, 0));
        CHECK(std::fabs(e.coefficients[1] - a1) <= 3 * e.series.coefficient_stderr()[1]);
    }
}

TEST_CASE("ex1 coefficients alternate in sign") {
    Problem p = builtin_problem("ex1");
    PointEstimate e = estimate_point(p, {0.0, 0.0}, 0.5, cfg(Strategy::B, 200000, 3), RngStream(2, 0));
    for (int n = 0; n < 3; ++n) CHECK(e.coefficients[n] * e.coefficients[n + 1] < 0.0);
}

TEST_CASE("point estimates against the finite-difference oracle") {
    struct Case {
        const char* id;
        double t;
    };
    for (Case c : {Case{"ex1", 0.25}, Case{"ex2", 0.5}}) {
        Problem p = builtin_problem(c.id);
        const double ref = cn_oracle(p, 0.0, c.t);
        for (Strategy s : {Strategy::A, Strategy::B}) {
            EstimatorConfig k = cfg(s, 400000, 3);
            if (s == Strategy::B) k.q = 0.5;
            PointEstimate e = estimate_point(p, {0.0, 0.0}, c.t, k, RngStream(7, 0));
            INFO(c.id, " value=", e.value, " ref=", ref, " se=", e.stderr_proxy);
            CHECK(std::isfinite(e.value));
            CHECK(std::fabs(e.value - ref) <= 3 * e.stderr_proxy + 1e-2);
        }
    }
}

TEST_CASE("ex3 strategies agree") {
    Problem p = builtin_problem("ex3", {{"a", 0.25}});
    auto a = estimate_point(p, {0.0, 0.0}, 0.5, cfg(Strategy::A, 200000, 3), RngStream(3, 0));
    auto b = estimate_point(p, {0.0, 0.0}, 0.5, cfg(Strategy::B, 200000, 3), RngStream(3, 0));
    CHECK(std::fabs(a.value - b.value) <=
          3 * std::hypot(a.stderr_proxy, b.stderr_proxy));
}

TEST_CASE("initial-condition limit") {
    Problem p = builtin_problem("ex2");
    const double g = p.initial({0.3, 0.0});
    auto e = estimate_point(p, {0.3, 0.0}, 1e-6, cfg(Strategy::A, 20000, 3), RngStream(1, 0));
    CHECK(std::fabs(e.value - g) < 1e-4);
    // The leaf weight 1/q keeps strategy B noisy even as t -> 0.
    auto b = estimate_point(p, {0.3, 0.0}, 1e-6, cfg(Strategy::B, 20000, 3), RngStream(1, 0));
    CHECK(std::fabs(b.value - g) < 3 * b.stderr_proxy);
    auto z = estimate_point(p, {0.3, 0.0}, 0.0, cfg(Strategy::B, 20000, 3), RngStream(1, 0));
    CHECK(z.value == p.initial({0.3, 0.0}));
}

TEST_CASE("estimates do not depend on worker count") {
    Problem p = builtin_problem("ex3");
    EstimatorConfig c1 = cfg(Strategy::B, 30000, 3);
    c1.block = 1000;
    EstimatorConfig c2 = c1;
    c2.workers = 3;
    auto a = estimate_point(p, {0.2, 0.0}, 0.5, c1, RngStream(12, 5));
    auto b = estimate_point(p, {0.2, 0.0}, 0.5, c2, RngStream(12, 5));
    CHECK(a.coefficients == b.coefficients);
    CHECK(a.value == b.value);
    CHECK(a.stderr_proxy == b.stderr_proxy);
    // Another block size only changes the summation order.
    c2.block = 777;
    auto c = estimate_point(p, {0.2, 0.0}, 0.5, c2, RngStream(12, 5));
    CHECK(c.value == doctest::Approx(a.value).epsilon(1e-12));
}

TEST_CASE("relative stderr of high orders is smallest near the optimal q") {
    Problem p = builtin_problem("ex1");
    const double q0 = optimal_q(p);
    std::vector<std::vector<double>> rel;
    for (double q : {q0, q0 + 0.1, q0 + 0.2}) {
        EstimatorConfig c = cfg(Strategy::B, 200000, 5);
        c.q = q;
        BranchSeries s = sample_series(p, {0.0, 0.0}, 0.5, c, RngStream(6, 0));
        auto a = s.coefficients();
        auto se = s.coefficient_stderr();
        std::vector<double> r;
        for (int n = 0; n <= 5; ++n) r.push_back(se[n] / std::fabs(a[n]));
        rel.push_back(r);
    }
    for (int n = 3; n <= 5; ++n) {
        INFO("n=", n);
        CHECK(std::min(rel[0][n], rel[1][n]) < rel[2][n]);
    }
    CHECK(rel[0][5] < rel[1][5]);
}
