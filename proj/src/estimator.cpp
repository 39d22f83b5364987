#include "treepde/estimator.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "treepde/errors.hpp"

namespace treepde {

SampleValue evaluate_sample_A(const Problem& p, const RandomTree& tree, double t) {
    SampleValue s{tree.Ne, tree.k, 0.0, true, tree.pruned};
    if (tree.pruned) return s;
    const double nterms = static_cast<double>(p.terms.size());
    double w = std::exp(t);
    for (const auto& n : tree.nodes) {
        if (n.is_leaf()) {
            w *= p.initial(n.position_at_event);
        } else {
            double tau = n.horizon - n.split_elapsed;
            w *= nterms * p.terms[n.term].coeff(n.position_at_event, tau) *
                 std::exp((n.alpha - 1) * tau);
        }
    }
    s.functional = w;
    s.valid = std::isfinite(w);
    return s;
}

SampleValue evaluate_sample_B(const Problem& p, const RandomTree& tree, double /*t*/, double q) {
    SampleValue s{tree.Ne, tree.k, 0.0, true, tree.pruned};
    if (tree.pruned) return s;
    const double nterms = static_cast<double>(p.terms.size());
    double w = 1.0;
    for (const auto& n : tree.nodes) {
        if (n.is_leaf()) {
            w *= p.initial(n.position_at_event) / q;
        } else {
            double tau = n.horizon - n.split_elapsed;
            w *= n.horizon * nterms * p.terms[n.term].coeff(n.position_at_event, tau) / (1.0 - q);
        }
    }
    s.functional = w;
    s.valid = std::isfinite(w);
    return s;
}

BranchSeries::BranchSeries(int n)
    : ne_max(n), coeff_sum(n + 1, 0.0), sq_sum(n + 1, 0.0), count(n + 1, 0) {}

void BranchSeries::add(const SampleValue& s) {
    ++n_total;
    if (s.pruned || s.Ne > ne_max) {
        ++pruned;
        return;
    }
    if (!s.valid) {
        ++invalid;
        return;
    }
    coeff_sum[s.Ne] += s.functional;
    sq_sum[s.Ne] += s.functional * s.functional;
    ++count[s.Ne];
}

void BranchSeries::merge(const BranchSeries& o) {
    if (o.ne_max != ne_max) throw ConfigError("merging series with different truncation");
    for (int n = 0; n <= ne_max; ++n) {
        coeff_sum[n] += o.coeff_sum[n];
        sq_sum[n] += o.sq_sum[n];
        count[n] += o.count[n];
    }
    n_total += o.n_total;
    pruned += o.pruned;
    invalid += o.invalid;
}

std::vector<double> BranchSeries::coefficients() const {
    std::vector<double> a(ne_max + 1, 0.0);
    if (n_total == 0) return a;
    for (int n = 0; n <= ne_max; ++n) a[n] = coeff_sum[n] / static_cast<double>(n_total);
    return a;
}

std::vector<double> BranchSeries::coefficient_stderr() const {
    std::vector<double> se(ne_max + 1, 0.0);
    if (n_total < 2) return se;
    const double N = static_cast<double>(n_total);
    for (int n = 0; n <= ne_max; ++n) {
        double mean = coeff_sum[n] / N;
        double var = std::max(0.0, sq_sum[n] / N - mean * mean) * N / (N - 1.0);
        se[n] = std::sqrt(var / N);
    }
    return se;
}

BranchSeries accumulate(const std::vector<SampleValue>& samples, int ne_max) {
    if (ne_max < 0) throw ConfigError("Ne_max must be non-negative");
    BranchSeries s(ne_max);
    for (const auto& v : samples) s.add(v);
    return s;
}

double resolve_q(const Problem& p, const EstimatorConfig& cfg) {
    double q = cfg.q.value_or(optimal_q(p));
    if (cfg.strategy == Strategy::B && !admissible_q_range(p).contains(q))
        throw ConfigError("q = " + std::to_string(q) + " outside the admissible range");
    return q;
}

BranchSeries sample_series(const Problem& p, const Point& x, double t, const EstimatorConfig& cfg,
                           const RngStream& stream, const BlockHook& hook) {
    if (cfg.N < 0 || cfg.block <= 0) throw ConfigError("invalid sample counts");
    if (cfg.ne_max < 0) throw ConfigError("Ne_max must be non-negative");
    const double q = resolve_q(p, cfg);
    SampleOptions opt;
    opt.dt = cfg.dt;
    opt.ne_max = cfg.ne_max;
    opt.node_cap = cfg.node_cap;

    const long nblocks = (cfg.N + cfg.block - 1) / cfg.block;
    std::vector<BranchSeries> parts(static_cast<std::size_t>(nblocks), BranchSeries(cfg.ne_max));

    auto run_block = [&](long b, RandomTree& tree) {
        if (hook) hook(b);
        BranchSeries& acc = parts[static_cast<std::size_t>(b)];
        const long lo = b * cfg.block, hi = std::min(cfg.N, lo + cfg.block);
        for (long i = lo; i < hi; ++i) {
            RngStream rng = stream.substream(static_cast<std::uint64_t>(i));
            sample_tree_into(tree, cfg.strategy, p, x, t, q, rng, opt);
            acc.add(cfg.strategy == Strategy::A ? evaluate_sample_A(p, tree, t)
                                                : evaluate_sample_B(p, tree, t, q));
        }
    };

    const int workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(nblocks)));
    if (workers == 1) {
        RandomTree tree;
        for (long b = 0; b < nblocks; ++b) run_block(b, tree);
    } else {
        std::atomic<long> next{0};
        std::exception_ptr err;
        std::mutex mu;
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                RandomTree tree;
                for (long b; (b = next.fetch_add(1)) < nblocks;) {
                    try {
                        run_block(b, tree);
                    } catch (...) {
                        std::lock_guard<std::mutex> lk(mu);
                        if (!err) err = std::current_exception();
                        next = nblocks;
                    }
                }
            });
        for (auto& th : pool) th.join();
        if (err) std::rethrow_exception(err);
    }
    BranchSeries total(cfg.ne_max);
    for (const auto& part : parts) total.merge(part);
    return total;
}

PointEstimate summarize_series(const BranchSeries& s, const EstimatorConfig& cfg,
                               const RngStream& stream) {
    PointEstimate est;
    est.series = s;
    est.coefficients = s.coefficients();
    SeriesSum central = sum_series(est.coefficients, cfg.pade_order);
    est.value = central.value;
    est.pade_diag = central.diag;
    est.pole_flag = central.diag.pole_flag();

    // Parametric bootstrap: perturb each coefficient by its standard error.
    const auto se = s.coefficient_stderr();
    RngStream zs = stream.substream(0xB00757AAULL);
    double acc = 0.0;
    int used = 0;
    std::vector<double> c(est.coefficients.size());
    for (int b = 0; b < cfg.bootstrap; ++b) {
        for (std::size_t n = 0; n < c.size(); ++n) c[n] = est.coefficients[n] + se[n] * zs.normal();
        try {
            double v = sum_series(c, cfg.pade_order).value;
            acc += (v - est.value) * (v - est.value);
            ++used;
        } catch (const NumericalError&) {
        }
    }
    est.stderr_proxy = used > 0 ? std::sqrt(acc / used) : std::numeric_limits<double>::infinity();
    return est;
}

PointEstimate estimate_point(const Problem& p, const Point& x, double t, const EstimatorConfig& cfg,
                             const RngStream& stream, const BlockHook& hook) {
    if (t < 0.0) throw ConfigError("negative time");
    if (t == 0.0) {
        PointEstimate est;
        est.series = BranchSeries(cfg.ne_max);
        est.value = p.initial(x);
        est.coefficients.assign(cfg.ne_max + 1, 0.0);
        est.coefficients[0] = est.value;
        return est;
    }
    return summarize_series(sample_series(p, x, t, cfg, stream, hook), cfg, stream);
}

}  // namespace treepde
