#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "treepde/pade.hpp"
#include "treepde/problem.hpp"
#include "treepde/rng.hpp"
#include "treepde/trees.hpp"

namespace treepde {

struct SampleValue {
    int Ne = 0;
    int k = 0;
    double functional = 0.0;
    bool valid = true;
    bool pruned = false;
};

SampleValue evaluate_sample_A(const Problem& p, const RandomTree& tree, double t);
SampleValue evaluate_sample_B(const Problem& p, const RandomTree& tree, double t, double q);

/// Per-Ne sums of the functional; coefficient a_n = coeff_sum[n] / N_total.
struct BranchSeries {
    int ne_max = 0;
    std::vector<double> coeff_sum, sq_sum;
    std::vector<long> count;
    long n_total = 0;
    long pruned = 0;   // Ne > ne_max
    long invalid = 0;  // non-finite functional

    explicit BranchSeries(int ne_max = 0);
    void add(const SampleValue& s);
    /// Appends another accumulator; callers merge in a fixed order.
    void merge(const BranchSeries& o);
    std::vector<double> coefficients() const;
    std::vector<double> coefficient_stderr() const;
};

BranchSeries accumulate(const std::vector<SampleValue>& samples, int ne_max);

struct EstimatorConfig {
    Strategy strategy = Strategy::B;
    long N = 100000;
    double dt = 0.01;
    std::optional<double> q;  // defaults to optimal_q
    int ne_max = 3;
    std::optional<std::pair<int, int>> pade_order;
    std::size_t node_cap = 10000;
    int workers = 1;
    long block = 4096;
    int bootstrap = 20;
};

struct PointEstimate {
    double value = 0.0;
    double stderr_proxy = 0.0;
    BranchSeries series;
    PadeDiagnostics pade_diag;
    bool pole_flag = false;
    std::vector<double> coefficients;
};

/// Called before each sample block; throwing aborts the estimate. Test hook
/// for fault injection.
using BlockHook = std::function<void(long block)>;

/// Sample i is drawn from stream.substream(i), so results do not depend on
/// `workers` or block scheduling.
PointEstimate estimate_point(const Problem& p, const Point& x, double t, const EstimatorConfig& cfg,
                             const RngStream& stream, const BlockHook& hook = {});

/// Raw series only, without Padé or bootstrap.
BranchSeries sample_series(const Problem& p, const Point& x, double t, const EstimatorConfig& cfg,
                           const RngStream& stream, const BlockHook& hook = {});

/// Padé value and bootstrap spread of a finished series.
PointEstimate summarize_series(const BranchSeries& s, const EstimatorConfig& cfg,
                               const RngStream& stream);

double resolve_q(const Problem& p, const EstimatorConfig& cfg);

}  // namespace treepde
