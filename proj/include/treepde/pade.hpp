#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace treepde {

struct PadeApproximant {
    int L = 0, M = 0;
    std::vector<double> p;  // p_0..p_L
    std::vector<double> q;  // q_0 = 1, q_1..q_M
};

/// [L/M] approximant of sum c_n z^n; requires L + M < c.size().
/// Throws DegenerateTableError when the denominator system is singular or
/// ill-conditioned (reciprocal condition below 1e-12).
PadeApproximant build_pade(const std::vector<double>& c, int L, int M);

/// P(z)/Q(z); throws PoleError when |Q(z)| < 1e-14 |P(z)|.
double eval_pade(const PadeApproximant& P, double z);

/// Real roots of the denominator lying in (lo, hi].
std::vector<double> real_denominator_roots(const PadeApproximant& P, double lo = 0.0,
                                           double hi = 1.0);

struct PadeDiagnostics {
    int L = 0, M = 0;
    bool fallback = false;          // near-diagonal order was degenerate
    std::vector<double> poles;      // real denominator roots in (0, 1]
    double order_spread = 0.0;      // |[L/M] - [M/L]| at z = 1; -1 if [M/L] is unusable
    double lower_spread = -1.0;     // vs. the near-diagonal order of K-1; -1 if unavailable
    bool pole_flag() const { return !poles.empty(); }
};

struct SeriesSum {
    double value = 0.0;
    PadeDiagnostics diag;
};

/// Sums c_0 + c_1 + ... via the near-diagonal Padé approximant at z = 1.
/// An explicit order may be requested; it then replaces the near-diagonal one.
SeriesSum sum_series(const std::vector<double>& c,
                     std::optional<std::pair<int, int>> order = std::nullopt);

}  // namespace treepde
