#include "treepde/pade.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>

#include "treepde/errors.hpp"

namespace treepde {

PadeApproximant build_pade(const std::vector<double>& c, int L, int M) {
    if (L < 0 || M < 0 || static_cast<std::size_t>(L + M) >= c.size())
        throw ConfigError("Padé order exceeds available coefficients");
    auto coef = [&](int i) { return i < 0 ? 0.0 : c[static_cast<std::size_t>(i)]; };
    PadeApproximant P;
    P.L = L;
    P.M = M;
    P.q.assign(M + 1, 0.0);
    P.q[0] = 1.0;
    if (M > 0) {
        Eigen::MatrixXd A(M, M);
        Eigen::VectorXd rhs(M);
        for (int i = 1; i <= M; ++i) {
            for (int j = 1; j <= M; ++j) A(i - 1, j - 1) = coef(L + i - j);
            rhs(i - 1) = -coef(L + i);
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
        double rc = lu.rcond();
        if (!(rc >= 1e-12))
            throw DegenerateTableError("degenerate Padé table at [" + std::to_string(L) + "/" +
                                       std::to_string(M) + "]");
        Eigen::VectorXd sol = lu.solve(rhs);
        for (int j = 1; j <= M; ++j) P.q[j] = sol(j - 1);
    }
    P.p.assign(L + 1, 0.0);
    for (int i = 0; i <= L; ++i)
        for (int j = 0; j <= std::min(i, M); ++j) P.p[i] += coef(i - j) * P.q[j];

    double cmax = 0.0;
    for (int i = 0; i <= L + M; ++i) cmax = std::max(cmax, std::fabs(c[i]));
    for (int i = 0; i <= L + M; ++i) {
        double r = 0.0;
        for (int j = 0; j <= std::min(i, M); ++j) r += coef(i - j) * P.q[j];
        if (i <= L) r -= P.p[i];
        if (std::fabs(r) > 1e-10 * std::max(cmax, 1e-300))
            throw DegenerateTableError("Padé order conditions not met at [" + std::to_string(L) +
                                       "/" + std::to_string(M) + "]");
    }
    return P;
}

namespace {

double horner(const std::vector<double>& a, double z) {
    double acc = 0.0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * z + *it;
    return acc;
}

}  // namespace

double eval_pade(const PadeApproximant& P, double z) {
    double num = horner(P.p, z), den = horner(P.q, z);
    if (den == 0.0 || std::fabs(den) < 1e-14 * std::fabs(num))
        throw PoleError("Padé approximant has a pole at z = " + std::to_string(z));
    return num / den;
}

std::vector<double> real_denominator_roots(const PadeApproximant& P, double lo, double hi) {
    std::vector<double> q = P.q;
    while (q.size() > 1 && q.back() == 0.0) q.pop_back();
    std::vector<double> out;
    const int deg = static_cast<int>(q.size()) - 1;
    if (deg < 1) return out;
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) C(i, deg - 1) = -q[i] / q[deg];
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
    for (int i = 0; i < deg; ++i) {
        std::complex<double> r = es.eigenvalues()(i);
        if (std::fabs(r.imag()) <= 1e-9 * (1.0 + std::fabs(r.real())) && r.real() > lo &&
            r.real() <= hi)
            out.push_back(r.real());
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

std::optional<double> try_value(const std::vector<double>& c, int L, int M) {
    if (L < 0 || M < 0 || static_cast<std::size_t>(L + M) >= c.size()) return std::nullopt;
    try {
        return eval_pade(build_pade(c, L, M), 1.0);
    } catch (const NumericalError&) {
        return std::nullopt;
    }
}

}  // namespace

SeriesSum sum_series(const std::vector<double>& c, std::optional<std::pair<int, int>> order) {
    if (c.empty()) throw ConfigError("sum_series needs at least one coefficient");
    SeriesSum out;
    const int K = static_cast<int>(c.size()) - 1;
    if (K == 0) {
        out.value = c[0];
        return out;
    }
    auto [L0, M0] = order.value_or(std::pair<int, int>{(K + 1) / 2, K / 2});

    // An explicit order is honoured as given; only the default order falls back.
    std::vector<std::pair<int, int>> tries{{L0, M0}};
    if (order) {
        PadeApproximant P = build_pade(c, L0, M0);
        out.value = eval_pade(P, 1.0);
        out.diag.L = L0;
        out.diag.M = M0;
        out.diag.poles = real_denominator_roots(P);
        tries.clear();
    }
    for (int tot = L0 + M0; tot >= 0 && !order; --tot)
        for (int M = tot / 2; M >= 0; --M)
            if (!(tot - M == L0 && M == M0)) tries.emplace_back(tot - M, M);

    bool done = order.has_value();
    for (std::size_t i = 0; i < tries.size() && !done; ++i) {
        auto [L, M] = tries[i];
        try {
            PadeApproximant P = build_pade(c, L, M);
            out.value = eval_pade(P, 1.0);
            out.diag.L = L;
            out.diag.M = M;
            out.diag.fallback = i > 0;
            out.diag.poles = real_denominator_roots(P);
            done = true;
        } catch (const NumericalError&) {
        }
    }
    if (!done) throw DegenerateTableError("no usable Padé order");

    const int L = out.diag.L, M = out.diag.M;
    if (L != M) {
        if (auto v = try_value(c, M, L)) out.diag.order_spread = std::fabs(*v - out.value);
        else out.diag.order_spread = -1.0;
    }
    const int tot = L + M;
    if (tot >= 1) {
        if (auto v = try_value(c, tot / 2, (tot - 1) / 2))
            out.diag.lower_spread = std::fabs(*v - out.value);
    }
    return out;
}

}  // namespace treepde
