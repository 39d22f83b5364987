#include "treepde/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "treepde/config.hpp"
#include "treepde/errors.hpp"
#include "treepde/field_io.hpp"
#include "treepde/pdd.hpp"
#include "treepde/task_pool.hpp"

namespace treepde::cli {

namespace {

// Files registered here are deleted unless commit() is reached.
class Outputs {
public:
    std::string add(const std::string& path) {
        paths_.push_back(path);
        return path;
    }
    void commit() { committed_ = true; }
    ~Outputs() {
        if (committed_) return;
        for (const auto& p : paths_) {
            std::error_code ec;
            std::filesystem::remove(p, ec);
        }
    }

private:
    std::vector<std::string> paths_;
    bool committed_ = false;
};

struct Flag {
    std::string key;
    std::string value;
    CLI::Option* opt = nullptr;
};

struct Command {
    CLI::App* app = nullptr;
    std::vector<std::unique_ptr<Flag>> flags;
    std::string config_path;
    bool desk_scale = false;
    int balance_k = 0;
    std::string coeffs;

    void flag(const std::string& name, const std::string& key, const std::string& help) {
        auto f = std::make_unique<Flag>();
        f->key = key;
        f->opt = app->add_option(name, f->value, help);
        flags.push_back(std::move(f));
    }
};

void add_common(Command& c) {
    c.app->add_option("--config", c.config_path, "key = value run-config file");
    c.app->add_flag("--desk-scale", c.desk_scale, "Example 4 desk-scale preset");
    c.flag("--problem", "problem", "builtin problem id (ex1..ex5)");
    c.flag("--x", "point.x", "x coordinate");
    c.flag("--y", "point.y", "y coordinate");
    c.flag("--t", "point.t", "final time");
    c.flag("--strategy", "mc.strategy", "A or B");
    c.flag("--n", "mc.n", "trees per point");
    c.flag("--dt", "mc.dt", "Euler step of the path simulation");
    c.flag("--q", "mc.q", "leaf probability for strategy B");
    c.flag("--ne-max", "mc.ne_max", "largest splitting count kept in the series");
    c.flag("--pade", "mc.pade", "explicit Padé order L/M");
    c.flag("--subdomains", "pdd.subdomains", "number of subdomains");
    c.flag("--workers", "pdd.workers", "worker threads");
    c.flag("--fault-rate", "pdd.fault_rate", "injected failure probability per task attempt");
    c.flag("--seed", "run.seed", "master seed");
    c.flag("--out", "run.out", "output path");
    c.flag("--dx", "grid.dx", "grid spacing");
    c.flag("--grid-dt", "grid.dt", "finite-difference time step");
    c.flag("--boundary", "grid.boundary",
           "zero-dirichlet | probabilistic-boundary");
}

RunConfig resolve(const Command& c) {
    RunConfig rc;
    rc.workers = default_workers();
    std::vector<std::pair<std::string, std::string>> kv;
    bool desk = c.desk_scale;
    if (!c.config_path.empty()) {
        for (const auto& [k, v] : load_config_file(c.config_path)) {
            if (k == "run.desk_scale") {
                RunConfig probe;
                probe.set(k, v);
                desk = desk || probe.desk_scale;
            } else {
                kv.emplace_back(k, v);
            }
        }
    }
    for (const auto& f : c.flags)
        if (f->opt->count() > 0) kv.emplace_back(f->key, f->value);
    if (desk) apply_desk_scale(rc);
    for (const auto& [k, v] : kv) rc.set(k, v);
    return rc;
}

std::string header(const RunConfig& rc) { return "# config_hash=" + rc.hash(); }

void write_field(const std::string& path, const Field& f, const RunConfig& rc) {
    auto ext = std::filesystem::path(path).extension().string();
    if (ext == ".bin" || ext == ".fld") write_field_binary(path, f);
    else write_field_csv(path, f, header(rc).substr(2));
}

std::ofstream open_csv(const std::string& path, const RunConfig& rc) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open '" + path + "' for writing");
    os << header(rc) << "\n";
    return os;
}

std::string strategy_name(Strategy s) { return s == Strategy::A ? "A" : "B"; }

void print_diag(std::ostream& os, const PointEstimate& e) {
    os << "pade=[" << e.pade_diag.L << "/" << e.pade_diag.M << "]"
       << (e.pade_diag.fallback ? " (fallback)" : "") << " poles_in_(0,1]=";
    if (e.pade_diag.poles.empty()) os << "none";
    for (std::size_t i = 0; i < e.pade_diag.poles.size(); ++i)
        os << (i ? ";" : "") << fmt17(e.pade_diag.poles[i]);
    os << " order_spread=" << fmt17(e.pade_diag.order_spread)
       << " lower_spread=" << fmt17(e.pade_diag.lower_spread) << "\n";
    os << "pruned=" << e.series.pruned << " invalid=" << e.series.invalid
       << " N=" << e.series.n_total << "\ncoefficients:";
    auto se = e.series.coefficient_stderr();
    for (std::size_t n = 0; n < e.coefficients.size(); ++n)
        os << " " << fmt17(e.coefficients[n]) << "(+-" << fmt17(se[n]) << ")";
    os << "\n";
}

int cmd_solve_point(const RunConfig& rc) {
    Outputs outs;
    Problem p = rc.make_problem();
    const Point x{rc.x, rc.y};
    auto est = estimate_point(p, x, rc.t, rc.estimator(), RngStream(rc.seed, 0));
    std::cout << "value=" << fmt17(est.value) << " stderr=" << fmt17(est.stderr_proxy)
              << (est.pole_flag ? " WARNING: Padé pole in (0,1]" : "") << "\n";
    print_diag(std::cout, est);
    if (!rc.out.empty()) {
        auto os = open_csv(outs.add(rc.out), rc);
        os << (p.dim == 2 ? "x,y,t,strategy,N,Ne_max,value,stderr,pade_pole_flag\n"
                          : "x,t,strategy,N,Ne_max,value,stderr,pade_pole_flag\n");
        os << fmt17(rc.x) << ",";
        if (p.dim == 2) os << fmt17(rc.y) << ",";
        os << fmt17(rc.t) << "," << strategy_name(rc.strategy) << "," << rc.N << "," << rc.ne_max
           << "," << fmt17(est.value) << "," << fmt17(est.stderr_proxy) << ","
           << (est.pole_flag ? 1 : 0) << "\n";
        if (!os) throw ConfigError("failed writing '" + rc.out + "'");
    }
    outs.commit();
    return ok;
}

// Boundary data for a single-domain solve under the configured policy.
DirichletData reference_boundary(const Problem& p, const RunConfig& rc) {
    if (rc.boundary == BoundaryPolicy::zero_dirichlet) return zero_dirichlet();
    if (rc.boundary == BoundaryPolicy::spline_interface)
        throw ConfigError("spline-interface applies to subdomain sides only");
    PddConfig cfg = rc.pdd(p.dim);
    PddPlan plan = plan_decomposition(p, cfg);
    NodalTables tab = run_nodal_tasks(plan.boundary_tasks, p, cfg.mc, cfg.workers, cfg.fault_rate,
                                      cfg.max_attempts, cfg.seed);
    for (std::size_t i = 0; i < plan.boundary_tasks.size(); ++i)
        if (plan.boundary_tasks[i].kind == TaskKind::initial)
            tab.values[i] = p.initial(plan.boundary_tasks[i].point);
    return boundary_splines(plan, tab);
}

void print_field_summary(const Field& f) {
    auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.end());
    std::cout << "nx=" << f.grid.nx() << " ny=" << f.grid.ny() << " T=" << fmt17(f.t)
              << " min=" << fmt17(*lo) << " max=" << fmt17(*hi) << "\n";
}

int cmd_solve_reference(const RunConfig& rc) {
    Outputs outs;
    Problem p = rc.make_problem();
    Grid g = rc.grid(p.dim);
    Field f = solve(p, g, reference_boundary(p, rc));
    print_field_summary(f);
    if (!rc.out.empty()) write_field(outs.add(rc.out), f, rc);
    outs.commit();
    return ok;
}

void write_pdd_outputs(Outputs& outs, const RunConfig& rc, const PddResult& res) {
    if (rc.out.empty()) return;
    write_field(outs.add(rc.out), res.field, rc);
    {
        auto os = open_csv(outs.add(rc.out + ".timing.csv"), rc);
        os << "phase,seconds\n"
           << "T_MC," << fmt17(res.timing.t_mc) << "\n"
           << "T_INT," << fmt17(res.timing.t_int) << "\n"
           << "T_LOCAL," << fmt17(res.timing.t_local) << "\n"
           << "T_total," << fmt17(res.timing.t_total) << "\n";
    }
    auto os = open_csv(outs.add(rc.out + ".interfaces.csv"), rc);
    os << "interface,y,t,value,stderr\n";
    for (std::size_t i = 0; i < res.plan.tasks.size(); ++i) {
        const auto& task = res.plan.tasks[i];
        os << fmt17(task.point[0]) << "," << fmt17(task.point[1]) << "," << fmt17(task.t) << ","
           << fmt17(res.interface_tables.values[i]) << ","
           << fmt17(res.interface_tables.stderrs[i]) << "\n";
    }
}

void print_timing(const PddResult& res) {
    std::cout << "T_MC=" << fmt17(res.timing.t_mc) << " T_INT=" << fmt17(res.timing.t_int)
              << " T_LOCAL=" << fmt17(res.timing.t_local)
              << " T_total=" << fmt17(res.timing.t_total) << "\n"
              << "tasks=" << res.plan.tasks.size()
              << " boundary_tasks=" << res.plan.boundary_tasks.size()
              << " retries=" << res.interface_tables.faults + res.boundary_tables.faults << "\n";
}

int cmd_solve_pdd(const RunConfig& rc) {
    Outputs outs;
    Problem p = rc.make_problem();
    PddResult res = run_pdd(p, rc.pdd(p.dim));
    print_field_summary(res.field);
    print_timing(res);
    write_pdd_outputs(outs, rc, res);
    outs.commit();
    return ok;
}

int cmd_compare(const RunConfig& rc) {
    Outputs outs;
    Problem p = rc.make_problem();
    PddResult res = run_pdd(p, rc.pdd(p.dim));
    Field ref = solve(p, res.plan.grid, res.global_bc);
    double worst = 0.0;
    for (std::size_t i = 0; i < ref.values.size(); ++i)
        worst = std::max(worst, std::fabs(ref.values[i] - res.field.values[i]));
    print_timing(res);
    std::cout << "max_discrepancy=" << fmt17(worst) << "\n";
    if (!rc.out.empty()) {
        auto os = open_csv(outs.add(rc.out), rc);
        const Grid& g = ref.grid;
        os << (g.dim == 2 ? "x,y,pdd,reference,abs_diff\n" : "x,pdd,reference,abs_diff\n");
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                os << fmt17(g.x(i)) << ",";
                if (g.dim == 2) os << fmt17(g.y(j)) << ",";
                os << fmt17(res.field.at(i, j)) << "," << fmt17(ref.at(i, j)) << ","
                   << fmt17(std::fabs(res.field.at(i, j) - ref.at(i, j))) << "\n";
            }
    }
    outs.commit();
    return ok;
}

int cmd_tree_stats(const RunConfig& rc0, int balance_k) {
    Outputs outs;
    RunConfig rc = rc0;
    if (rc.tree_m > 0) rc.problem = "synthetic";
    Problem p = rc.make_problem();
    const double q = resolve_q(p, rc.estimator());
    if (balance_k > 0) {
        auto h = children_balance_histogram(p, rc.t, q, rc.N, rc.seed, balance_k,
                                            static_cast<std::size_t>(rc.node_cap));
        std::cout << "sampled=" << h.sampled << " matched=" << h.matched
                  << " aborted=" << h.aborted << " mode=" << h.mode() << "\n";
        if (!rc.out.empty()) {
            auto os = open_csv(outs.add(rc.out), rc);
            os << "n2_minus_n3,count\n";
            for (const auto& [d, c] : h.counts) os << d << "," << c << "\n";
        }
        outs.commit();
        return ok;
    }

    SampleOptions opt;
    opt.simulate_paths = false;
    opt.node_cap = static_cast<std::size_t>(rc.node_cap);
    std::map<int, long> by_ne;
    std::map<int, double> k_sum;
    long aborted = 0;
    double leaves = 0.0;
    RandomTree tree;
    RngStream base(rc.seed, 0x7472656573ULL);
    for (long i = 0; i < rc.N; ++i) {
        RngStream rng = base.substream(static_cast<std::uint64_t>(i));
        try {
            sample_tree_into(tree, rc.strategy, p, {0.0, 0.0}, rc.t, q, rng, opt);
        } catch (const TreeCapExceeded&) {
            ++aborted;
            continue;
        }
        ++by_ne[tree.Ne];
        k_sum[tree.Ne] += tree.k;
        leaves += tree.k;
    }
    const double kept = static_cast<double>(rc.N - aborted);
    const int m = p.max_power();
    const bool analytic = rc.strategy == Strategy::B && p.single_term();
    std::cout << "trees=" << rc.N << " aborted=" << aborted
              << " mean_k=" << fmt17(kept > 0 ? leaves / kept : 0.0);
    if (analytic) {
        std::string mk = "inf";
        try {
            mk = fmt17(mean_branches(m, q));
        } catch (const SingularityError&) {
        }
        std::cout << " analytic_mean_k=" << mk;
    }
    std::cout << "\n";
    if (!rc.out.empty()) {
        auto os = open_csv(outs.add(rc.out), rc);
        os << "Ne,k,analytic_P,empirical_P,stderr\n";
        const double N = static_cast<double>(rc.N);
        for (const auto& [ne, c] : by_ne) {
            double pe = c / N;
            os << ne << "," << fmt17(k_sum[ne] / c) << ","
               << (analytic ? fmt17(tree_probability(ne, m, q)) : std::string("nan")) << ","
               << fmt17(pe) << "," << fmt17(std::sqrt(pe * (1.0 - pe) / N)) << "\n";
        }
    }
    outs.commit();
    return ok;
}

std::vector<double> parse_coeff_list(const std::string& text) {
    std::vector<double> c;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ',')) {
        auto b = item.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) continue;
        try {
            c.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("bad coefficient '" + item + "'");
        }
    }
    return c;
}

int cmd_pade_sum(const RunConfig& rc, const std::string& inline_coeffs) {
    Outputs outs;
    std::vector<double> c;
    if (!inline_coeffs.empty()) {
        c = parse_coeff_list(inline_coeffs);
    } else {
        if (rc.input.empty()) throw ConfigError("pade-sum needs --input or --coeffs");
        std::ifstream is(rc.input);
        if (!is) throw ConfigError("cannot read '" + rc.input + "'");
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty() || line[0] == '#') continue;
            if (line.find_first_of("abcdfghijklmnopqrstuvwxyz") != std::string::npos) continue;
            // Last column holds the coefficient, so "n,c_n" and bare "c_n" both work.
            auto comma = line.rfind(',');
            auto cs = parse_coeff_list(comma == std::string::npos ? line : line.substr(comma + 1));
            c.insert(c.end(), cs.begin(), cs.end());
        }
    }
    if (c.empty()) throw ConfigError("no coefficients given");
    SeriesSum s = sum_series(c, rc.pade);
    std::cout << "value=" << fmt17(s.value) << " pade=[" << s.diag.L << "/" << s.diag.M << "]"
              << (s.diag.fallback ? " (fallback)" : "") << " poles=" << s.diag.poles.size()
              << " order_spread=" << fmt17(s.diag.order_spread)
              << " lower_spread=" << fmt17(s.diag.lower_spread) << "\n";
    if (!rc.out.empty()) {
        auto os = open_csv(outs.add(rc.out), rc);
        os << "value,L,M,fallback,poles,order_spread,lower_spread\n"
           << fmt17(s.value) << "," << s.diag.L << "," << s.diag.M << ","
           << (s.diag.fallback ? 1 : 0) << "," << s.diag.poles.size() << ","
           << fmt17(s.diag.order_spread) << "," << fmt17(s.diag.lower_spread) << "\n";
    }
    outs.commit();
    return ok;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Branching-tree Monte Carlo and domain decomposition for semilinear parabolic PDEs"};
    app.require_subcommand(1);
    app.allow_extras(false);

    const char* names[] = {"solve-point", "solve-pdd", "solve-reference",
                           "tree-stats",  "pade-sum",  "compare"};
    const char* help[] = {"pointwise estimate with Padé summation",
                          "probabilistic domain decomposition",
                          "single-domain Crank-Nicolson solve",
                          "empirical law of the random trees",
                          "sum a coefficient series",
                          "solve-pdd against solve-reference"};
    std::vector<Command> cmds(6);
    for (int i = 0; i < 6; ++i) {
        cmds[i].app = app.add_subcommand(names[i], help[i]);
        add_common(cmds[i]);
    }
    cmds[3].flag("--m", "trees.m", "single-term power for a synthetic problem");
    cmds[3].app->add_option("--balance-k", cmds[3].balance_k,
                            "histogram of n2 - n3 over trees with this many leaves");
    cmds[4].flag("--input", "run.input", "CSV with one coefficient per line (last column)");
    cmds[4].app->add_option("--coeffs", cmds[4].coeffs, "comma-separated coefficients");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? ok : config_error;
    }

    try {
        for (int i = 0; i < 6; ++i) {
            if (!cmds[i].app->parsed()) continue;
            RunConfig rc = resolve(cmds[i]);
            switch (i) {
                case 0:
                    return cmd_solve_point(rc);
                case 1:
                    return cmd_solve_pdd(rc);
                case 2:
                    return cmd_solve_reference(rc);
                case 3:
                    return cmd_tree_stats(rc, cmds[3].balance_k);
                case 4:
                    return cmd_pade_sum(rc, cmds[4].coeffs);
                case 5:
                    return cmd_compare(rc);
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return numerical_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return failure;
    }
    return failure;
}

}  // namespace treepde::cli
