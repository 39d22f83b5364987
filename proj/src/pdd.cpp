#include "treepde/pdd.hpp"

#include <chrono>
#include <cmath>
#include <optional>

#include "treepde/errors.hpp"

namespace treepde {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> uniform_nodes(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1);
    return v;
}

bool close(double a, double b, double scale) { return std::fabs(a - b) <= 1e-9 * scale; }

constexpr std::uint64_t kBoundaryIdBase = 1ULL << 40;

// Tensor spline evaluation with the last time slice cached; each copy of the
// closure owns its cache, so copies may be used from different threads.
struct CachedTensor {
    std::shared_ptr<const TensorSpline2D> spline;
    double t = std::numeric_limits<double>::quiet_NaN();
    Spline1D slice;

    double operator()(double s, double tt) {
        if (!(tt == t)) {
            slice = spline->slice_t(tt);
            t = tt;
        }
        return slice(s);
    }
};

}  // namespace

PddPlan plan_decomposition(const Problem& p, const PddConfig& cfg) {
    const Grid& g = cfg.grid;
    g.check();
    if (p.dim != g.dim) throw ConfigError("grid and problem dimensions differ");
    if (cfg.n_sub < 1) throw ConfigError("need at least one subdomain");
    const int ncols = g.nx() - 1;
    if (cfg.n_sub > ncols) throw ConfigError("more subdomains than grid columns");
    if (cfg.nodal.n_time < 4 || (g.dim == 2 && cfg.nodal.n_space < 4))
        throw ConfigError("interface splines need at least 4 nodes per direction");

    PddPlan plan;
    plan.grid = g;
    plan.n_sub = cfg.n_sub;
    const double width = g.x_hi - g.x_lo;
    std::vector<double> cuts{g.x_lo};
    for (int k = 1; k < cfg.n_sub; ++k) {
        double xk = g.x_lo + width * k / cfg.n_sub;
        double cols = (xk - g.x_lo) / g.dx;
        if (std::fabs(cols - std::round(cols)) > 1e-9 * std::max(1.0, cols))
            throw ConfigError("interface at x = " + std::to_string(xk) + " is not on a grid line");
        xk = g.x_lo + std::round(cols) * g.dx;
        plan.interfaces.push_back(xk);
        cuts.push_back(xk);
    }
    cuts.push_back(g.x_hi);
    for (int k = 0; k < cfg.n_sub; ++k) {
        Grid s = g;
        s.x_lo = cuts[k];
        s.x_hi = cuts[k + 1];
        plan.subgrids.push_back(s);
    }

    plan.time_nodes = uniform_nodes(0.0, g.T, cfg.nodal.n_time);
    if (g.dim == 2) plan.space_nodes = uniform_nodes(g.y_lo, g.y_hi, cfg.nodal.n_space);
    const double yscale = std::max(1.0, g.y_hi - g.y_lo);

    const std::size_t ns = plan.n_space(), nt = plan.n_time();
    for (std::size_t f = 0; f < plan.interfaces.size(); ++f)
        for (std::size_t iy = 0; iy < ns; ++iy)
            for (std::size_t it = 0; it < nt; ++it) {
                PddTask task;
                task.id = plan.tasks.size();
                task.point = {plan.interfaces[f], g.dim == 2 ? plan.space_nodes[iy] : 0.0};
                task.t = plan.time_nodes[it];
                task.group = static_cast<int>(f);
                task.stream = mix64(task.id);
                if (it == 0) task.kind = TaskKind::initial;
                else if (g.dim == 2 && (close(task.point[1], g.y_lo, yscale) ||
                                        close(task.point[1], g.y_hi, yscale)))
                    task.kind = TaskKind::boundary_copy;
                else task.kind = TaskKind::monte_carlo;
                plan.tasks.push_back(task);
            }

    if (cfg.boundary == BoundaryPolicy::probabilistic_boundary) {
        const int nb = cfg.boundary_space_nodes;
        if (g.dim == 2 && nb < 4) throw ConfigError("boundary splines need at least 4 nodes");
        std::vector<std::pair<Point, std::size_t>> seen;  // shared corner points
        auto find_or_add = [&](const Point& pt, double t, int side) {
            for (const auto& [q, idx] : seen)
                if (q == pt && plan.boundary_tasks[idx].t == t) return idx;
            PddTask task;
            task.id = kBoundaryIdBase + plan.boundary_tasks.size();
            task.point = pt;
            task.t = t;
            task.group = side;
            task.stream = mix64(task.id);
            task.kind = t == 0.0 ? TaskKind::initial : TaskKind::monte_carlo;
            plan.boundary_tasks.push_back(task);
            seen.emplace_back(pt, plan.boundary_tasks.size() - 1);
            return plan.boundary_tasks.size() - 1;
        };
        for (int side = 0; side < (g.dim == 2 ? 4 : 2); ++side) {
            auto& nodes = plan.boundary_space_nodes[side];
            if (g.dim == 1) nodes = {0.0};
            else if (side < 2) nodes = uniform_nodes(g.y_lo, g.y_hi, nb);
            else nodes = uniform_nodes(g.x_lo, g.x_hi, nb);
            for (double s : nodes)
                for (double t : plan.time_nodes) {
                    Point pt;
                    if (side == 0) pt = {g.x_lo, s};
                    else if (side == 1) pt = {g.x_hi, s};
                    else if (side == 2) pt = {s, g.y_lo};
                    else pt = {s, g.y_hi};
                    if (g.dim == 1) pt[1] = 0.0;
                    plan.boundary_index[side].push_back(find_or_add(pt, t, side));
                }
        }
    }
    return plan;
}

NodalTables run_nodal_tasks(const std::vector<PddTask>& tasks, const Problem& p,
                            const EstimatorConfig& mc, int workers, double fault_rate,
                            int max_attempts, std::uint64_t seed) {
    if (fault_rate < 0.0 || fault_rate >= 1.0) throw ConfigError("fault rate must lie in [0, 1)");
    NodalTables tab;
    tab.values.assign(tasks.size(), 0.0);
    tab.stderrs.assign(tasks.size(), 0.0);
    tab.outcomes.assign(tasks.size(), {});
    std::vector<std::size_t> mc_tasks;
    for (std::size_t i = 0; i < tasks.size(); ++i)
        if (tasks[i].kind == TaskKind::monte_carlo) mc_tasks.push_back(i);

    EstimatorConfig cfg = mc;
    cfg.workers = 1;
    const long nblocks = std::max<long>(1, (cfg.N + cfg.block - 1) / cfg.block);
    auto outcomes = run_tasks(mc_tasks.size(), workers, max_attempts,
                              [&](std::size_t j, int attempt, int) {
        const PddTask& task = tasks[mc_tasks[j]];
        BlockHook hook;
        if (inject_fault(seed, task.id, attempt, fault_rate)) {
            long kill_at = static_cast<long>(mix64(task.id, attempt) % nblocks);
            hook = [&task, attempt, kill_at](long b) {
                if (b == kill_at) throw TaskFault{task.id, attempt};
            };
        }
        auto est = estimate_point(p, task.point, task.t, cfg, RngStream(seed, task.stream), hook);
        tab.values[mc_tasks[j]] = est.value;
        tab.stderrs[mc_tasks[j]] = est.stderr_proxy;
    });
    for (std::size_t j = 0; j < mc_tasks.size(); ++j) {
        tab.outcomes[mc_tasks[j]] = outcomes[j];
        tab.max_attempts_used = std::max(tab.max_attempts_used, outcomes[j].attempts);
        tab.faults += outcomes[j].attempts - 1;
    }
    return tab;
}

NodalTables compute_interface_values(const PddPlan& plan, const Problem& p,
                                     const EstimatorConfig& mc, int workers, double fault_rate,
                                     const DirichletData& global_bc, int max_attempts,
                                     std::uint64_t seed) {
    NodalTables tab = run_nodal_tasks(plan.tasks, p, mc, workers, fault_rate, max_attempts, seed);
    for (std::size_t i = 0; i < plan.tasks.size(); ++i) {
        const auto& task = plan.tasks[i];
        if (task.kind == TaskKind::initial) tab.values[i] = p.initial(task.point);
        else if (task.kind == TaskKind::boundary_copy) tab.values[i] = global_bc(task.point, task.t);
    }
    return tab;
}

std::vector<DirichletData> interface_splines(const PddPlan& plan, const NodalTables& tables) {
    std::vector<DirichletData> out;
    const std::size_t ns = plan.n_space(), nt = plan.n_time();
    for (std::size_t f = 0; f < plan.interfaces.size(); ++f) {
        auto first = tables.values.begin() + static_cast<long>(f * ns * nt);
        std::vector<double> vals(first, first + static_cast<long>(ns * nt));
        if (plan.grid.dim == 1) {
            Spline1D s = build_spline(plan.time_nodes, vals);
            out.emplace_back([s](const Point&, double t) { return s(t); });
        } else {
            CachedTensor ct;
            ct.spline = std::make_shared<TensorSpline2D>(plan.space_nodes, plan.time_nodes, vals);
            out.emplace_back([ct](const Point& x, double t) mutable { return ct(x[1], t); });
        }
    }
    return out;
}

DirichletData boundary_splines(const PddPlan& plan, const NodalTables& tables) {
    const Grid g = plan.grid;
    const std::size_t nt = plan.n_time();
    if (g.dim == 1) {
        std::vector<Spline1D> ends;
        for (int side = 0; side < 2; ++side) {
            std::vector<double> v;
            for (std::size_t idx : plan.boundary_index[side]) v.push_back(tables.values[idx]);
            ends.push_back(build_spline(plan.time_nodes, v));
        }
        return [ends, g](const Point& x, double t) {
            return std::fabs(x[0] - g.x_lo) < std::fabs(x[0] - g.x_hi) ? ends[0](t) : ends[1](t);
        };
    }
    std::array<CachedTensor, 4> sides;
    for (int side = 0; side < 4; ++side) {
        std::vector<double> v;
        for (std::size_t idx : plan.boundary_index[side]) v.push_back(tables.values[idx]);
        (void)nt;
        sides[side].spline = std::make_shared<TensorSpline2D>(plan.boundary_space_nodes[side],
                                                              plan.time_nodes, v);
    }
    const double scale = std::max(g.x_hi - g.x_lo, g.y_hi - g.y_lo);
    return [sides, g, scale](const Point& x, double t) mutable {
        if (close(x[0], g.x_lo, scale)) return sides[0](x[1], t);
        if (close(x[0], g.x_hi, scale)) return sides[1](x[1], t);
        if (close(x[1], g.y_lo, scale)) return sides[2](x[0], t);
        if (close(x[1], g.y_hi, scale)) return sides[3](x[0], t);
        throw ConfigError("boundary data requested at an interior point");
    };
}

Field solve_subdomains(const PddPlan& plan, const Problem& p,
                       const std::vector<DirichletData>& interface_data,
                       const DirichletData& global_bc, int workers) {
    if (interface_data.size() != plan.interfaces.size())
        throw ConfigError("one interface data set per interface required");
    const int n = plan.n_sub;
    std::vector<Field> parts(n);
    const double scale = std::max(1.0, plan.grid.x_hi - plan.grid.x_lo);
    run_tasks(n, workers, 1, [&](std::size_t k, int, int) {
        const Grid& sg = plan.subgrids[k];
        std::optional<DirichletData> left, right;
        if (k > 0) left = interface_data[k - 1];
        if (k + 1 < static_cast<std::size_t>(n)) right = interface_data[k];
        DirichletData outer = global_bc;
        DirichletData bc = [left, right, outer, sg, scale](const Point& x, double t) mutable {
            if (left && close(x[0], sg.x_lo, scale)) return (*left)(x, t);
            if (right && close(x[0], sg.x_hi, scale)) return (*right)(x, t);
            return outer(x, t);
        };
        parts[k] = solve(p, sg, bc);
    });

    Field out = sample_initial(p, plan.grid);
    out.t = plan.grid.T;
    for (int k = 0; k < n; ++k) {
        const Field& f = parts[k];
        const int off = static_cast<int>(std::lround((f.grid.x_lo - plan.grid.x_lo) / plan.grid.dx));
        for (int j = 0; j < f.grid.ny(); ++j)
            for (int i = 0; i < f.grid.nx(); ++i) out.at(off + i, j) = f.at(i, j);
    }
    return out;
}

PddResult run_pdd(const Problem& p, const PddConfig& cfg) {
    require_valid(p);
    const auto t_start = Clock::now();
    PddResult res;
    res.plan = plan_decomposition(p, cfg);
    const PddPlan& plan = res.plan;

    auto t0 = Clock::now();
    if (cfg.boundary == BoundaryPolicy::probabilistic_boundary) {
        res.boundary_tables = run_nodal_tasks(plan.boundary_tasks, p, cfg.mc, cfg.workers,
                                              cfg.fault_rate, cfg.max_attempts, cfg.seed);
        for (std::size_t i = 0; i < plan.boundary_tasks.size(); ++i)
            if (plan.boundary_tasks[i].kind == TaskKind::initial)
                res.boundary_tables.values[i] = p.initial(plan.boundary_tasks[i].point);
    }
    res.timing.t_mc = seconds_since(t0);

    t0 = Clock::now();
    if (cfg.boundary == BoundaryPolicy::probabilistic_boundary)
        res.global_bc = boundary_splines(plan, res.boundary_tables);
    else if (cfg.boundary == BoundaryPolicy::zero_dirichlet)
        res.global_bc = zero_dirichlet();
    else
        throw ConfigError("the global boundary cannot use the spline-interface policy");
    res.timing.t_int = seconds_since(t0);

    t0 = Clock::now();
    res.interface_tables = compute_interface_values(plan, p, cfg.mc, cfg.workers, cfg.fault_rate,
                                                    res.global_bc, cfg.max_attempts, cfg.seed);
    res.timing.t_mc += seconds_since(t0);

    t0 = Clock::now();
    auto splines = interface_splines(plan, res.interface_tables);
    res.timing.t_int += seconds_since(t0);

    t0 = Clock::now();
    res.field = solve_subdomains(plan, p, splines, res.global_bc, cfg.workers);
    res.timing.t_local = seconds_since(t0);
    res.timing.t_total = seconds_since(t_start);
    return res;
}

}  // namespace treepde
