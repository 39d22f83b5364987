#include <algorithm>
#include <cmath>

#include "treepde/errors.hpp"
#include "treepde/sde.hpp"
#include "treepde/trees.hpp"

namespace treepde {

namespace {

__extension__ typedef unsigned __int128 u128;

// Exact binomial via the multiplicative formula; each partial product is itself
// a binomial coefficient, so the division is exact.
std::uint64_t binomial(std::uint64_t n, std::uint64_t r) {
    r = std::min(r, n - r);
    u128 acc = 1;
    for (std::uint64_t i = 1; i <= r; ++i) {
        acc = acc * (n - r + i) / i;
        if (acc > static_cast<u128>(UINT64_MAX))
            throw NumericalError("binomial coefficient overflows 64 bits");
    }
    return static_cast<std::uint64_t>(acc);
}

}  // namespace

std::uint64_t count_diagrams_binary(int k) {
    if (k < 1) throw ConfigError("count_diagrams_binary requires k >= 1");
    return binomial(2 * static_cast<std::uint64_t>(k) - 2, k - 1) / static_cast<std::uint64_t>(k);
}

std::uint64_t count_diagrams(int Ne, int m) {
    if (Ne < 0 || m < 2) throw ConfigError("count_diagrams requires Ne >= 0, m >= 2");
    std::uint64_t n = static_cast<std::uint64_t>(Ne) * m + 1;
    // C(n, Ne) / n = C(n-1, Ne) / (n - Ne) avoids one overflow-prone product.
    u128 c = binomial(n - 1, Ne);
    return static_cast<std::uint64_t>(c / (n - Ne));
}

double log_count_diagrams(int Ne, int m) {
    double n = static_cast<double>(Ne) * m + 1;
    return std::lgamma(n + 1) - std::lgamma(Ne + 1.0) - std::lgamma(n - Ne + 1) - std::log(n);
}

double tree_probability(int Ne, int m, double q) {
    if (Ne < 0 || m < 2) throw ConfigError("tree_probability requires Ne >= 0, m >= 2");
    double lo = (m - 1.0) / m;
    if (q < lo - 1e-12 || q > 1.0)
        throw ConfigError("q below the admissible bound (m-1)/m");
    if (Ne == 0) return q;
    if (q == 1.0) return 0.0;
    double k = (m - 1.0) * Ne + 1;
    return std::exp(k * std::log(q) + Ne * std::log1p(-q) + log_count_diagrams(Ne, m));
}

double mean_branches(int m, double q) {
    double den = 1.0 - m * (1.0 - q);
    if (!(den > 0.0))
        throw SingularityError("mean branch count diverges for q <= (m-1)/m");
    return q / den;
}

double estimate_tb(double N, double t, double dt, double t_c, int m, double q) {
    return N * t_c * (t / expected_step(dt, t)) * mean_branches(m, q);
}

int BalanceHistogram::mode() const {
    int best = 0;
    long bc = -1;
    for (const auto& [d, c] : counts)
        if (c > bc) {
            bc = c;
            best = d;
        }
    return best;
}

BalanceHistogram children_balance_histogram(const Problem& p, double t, double q, long N,
                                            std::uint64_t seed, int k_filter,
                                            std::size_t node_cap) {
    BalanceHistogram h;
    SampleOptions opt;
    opt.simulate_paths = false;
    opt.node_cap = node_cap;
    RandomTree tree;
    RngStream base(seed, 0x6b616c616e6365ULL);
    for (long i = 0; i < N; ++i) {
        RngStream rng = base.substream(static_cast<std::uint64_t>(i));
        ++h.sampled;
        try {
            sample_tree_into(tree, Strategy::B, p, {0.0, 0.0}, t, q, rng, opt);
        } catch (const TreeCapExceeded&) {
            ++h.aborted;
            continue;
        }
        if (k_filter > 0 && tree.k != k_filter) continue;
        int n2 = 0, n3 = 0;
        for (const auto& n : tree.nodes) {
            if (n.alpha == 2) ++n2;
            if (n.alpha == 3) ++n3;
        }
        ++h.matched;
        ++h.counts[n2 - n3];
    }
    return h;
}

}  // namespace treepde
