#include "treepde/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "treepde/errors.hpp"
#include "treepde/field_io.hpp"

namespace treepde {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
    }
}

long to_long(const std::string& key, const std::string& v) {
    // Accept 1e6-style spellings for sample counts.
    double d = to_double(key, v);
    if (d != std::floor(d) || std::fabs(d) > 9e18)
        throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
    return static_cast<long>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("'" + key + "' expects a boolean, got '" + v + "'");
}

std::pair<int, int> to_order(const std::string& key, const std::string& v) {
    int L, M;
    char slash;
    std::istringstream is(v);
    if (!(is >> L >> slash >> M) || slash != '/' || L < 0 || M < 0 || !is.eof())
        throw ConfigError("'" + key + "' expects L/M, got '" + v + "'");
    return {L, M};
}

std::string num(double v) { return std::isnan(v) ? "default" : fmt17(v); }

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": bad section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        out[section.empty() ? key : section + "." + key] = val;
    }
    return out;
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

void RunConfig::set(const std::string& key, const std::string& v) {
    if (key == "problem" || key == "problem.id") problem = v;
    else if (key == "problem.a" || key == "problem.A_x" || key == "problem.A_y")
        problem_params[key.substr(8)] = to_double(key, v);
    else if (key == "problem.terms") terms = v;
    else if (key == "problem.diffusion") diffusion = to_double(key, v);
    else if (key == "problem.drift") drift = to_double(key, v);
    else if (key == "mc.strategy") {
        if (v == "A" || v == "a") strategy = Strategy::A;
        else if (v == "B" || v == "b") strategy = Strategy::B;
        else throw ConfigError("strategy must be A or B");
    } else if (key == "mc.n") N = to_long(key, v);
    else if (key == "mc.dt") dt = to_double(key, v);
    else if (key == "mc.q") q = to_double(key, v);
    else if (key == "mc.ne_max") ne_max = static_cast<int>(to_long(key, v));
    else if (key == "mc.pade") pade = to_order(key, v);
    else if (key == "mc.node_cap") node_cap = to_long(key, v);
    else if (key == "mc.block") block = to_long(key, v);
    else if (key == "mc.bootstrap") bootstrap = static_cast<int>(to_long(key, v));
    else if (key == "point.x") x = to_double(key, v);
    else if (key == "point.y") y = to_double(key, v);
    else if (key == "point.t") t = to_double(key, v);
    else if (key == "grid.x_lo") x_lo = to_double(key, v);
    else if (key == "grid.x_hi") x_hi = to_double(key, v);
    else if (key == "grid.y_lo") y_lo = to_double(key, v);
    else if (key == "grid.y_hi") y_hi = to_double(key, v);
    else if (key == "grid.dx") dx = to_double(key, v);
    else if (key == "grid.dt") grid_dt = to_double(key, v);
    else if (key == "grid.boundary") boundary = parse_boundary_policy(v);
    else if (key == "pdd.subdomains") n_sub = static_cast<int>(to_long(key, v));
    else if (key == "pdd.space_nodes") nodal.n_space = static_cast<int>(to_long(key, v));
    else if (key == "pdd.time_nodes") nodal.n_time = static_cast<int>(to_long(key, v));
    else if (key == "pdd.boundary_nodes") boundary_nodes = static_cast<int>(to_long(key, v));
    else if (key == "pdd.workers") workers = static_cast<int>(to_long(key, v));
    else if (key == "pdd.fault_rate") fault_rate = to_double(key, v);
    else if (key == "pdd.max_attempts") max_attempts = static_cast<int>(to_long(key, v));
    else if (key == "run.seed") seed = static_cast<std::uint64_t>(to_long(key, v));
    else if (key == "run.out") out = v;
    else if (key == "run.input") input = v;
    else if (key == "run.desk_scale") {
        desk_scale = to_bool(key, v);
    } else if (key == "trees.m") tree_m = static_cast<int>(to_long(key, v));
    else throw ConfigError("unknown config key '" + key + "'");

    if (N < 0 || block <= 0 || bootstrap < 0 || node_cap <= 0)
        throw ConfigError("sample counts must be positive");
    if (!(dt > 0.0) || !(dx > 0.0) || !(grid_dt > 0.0)) throw ConfigError("steps must be positive");
    if (ne_max < 0) throw ConfigError("Ne_max must be non-negative");
    if (workers < 1) throw ConfigError("workers must be at least 1");
    if (max_attempts < 1) throw ConfigError("max_attempts must be at least 1");
    if (fault_rate < 0.0 || fault_rate >= 1.0) throw ConfigError("fault rate must lie in [0, 1)");
    if (t < 0.0) throw ConfigError("time must be non-negative");
}

std::vector<std::pair<std::string, std::string>> RunConfig::canonical() const {
    std::vector<std::pair<std::string, std::string>> kv{
        {"problem", problem},
        {"problem.terms", terms},
        {"problem.diffusion", diffusion ? fmt17(*diffusion) : "default"},
        {"problem.drift", drift ? fmt17(*drift) : "default"},
        {"mc.strategy", strategy == Strategy::A ? "A" : "B"},
        {"mc.n", std::to_string(N)},
        {"mc.dt", fmt17(dt)},
        {"mc.q", q ? fmt17(*q) : "default"},
        {"mc.ne_max", std::to_string(ne_max)},
        {"mc.pade", pade ? std::to_string(pade->first) + "/" + std::to_string(pade->second)
                         : "default"},
        {"mc.node_cap", std::to_string(node_cap)},
        {"mc.block", std::to_string(block)},
        {"mc.bootstrap", std::to_string(bootstrap)},
        {"point.x", fmt17(x)},
        {"point.y", fmt17(y)},
        {"point.t", fmt17(t)},
        {"grid.x_lo", num(x_lo)},
        {"grid.x_hi", num(x_hi)},
        {"grid.y_lo", num(y_lo)},
        {"grid.y_hi", num(y_hi)},
        {"grid.dx", fmt17(dx)},
        {"grid.dt", fmt17(grid_dt)},
        {"grid.boundary", to_string(boundary)},
        {"pdd.subdomains", std::to_string(n_sub)},
        {"pdd.space_nodes", std::to_string(nodal.n_space)},
        {"pdd.time_nodes", std::to_string(nodal.n_time)},
        {"pdd.boundary_nodes", std::to_string(boundary_nodes)},
        {"pdd.max_attempts", std::to_string(max_attempts)},
        {"run.seed", std::to_string(seed)},
        {"trees.m", std::to_string(tree_m)},
    };
    for (const auto& [k, v] : problem_params) kv.emplace_back("problem." + k, fmt17(v));
    // Workers and fault rate do not change results, so they stay out of the hash.
    std::sort(kv.begin(), kv.end());
    return kv;
}

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string RunConfig::hash() const {
    std::string s;
    for (const auto& [k, v] : canonical()) s += k + "=" + v + "\n";
    return fnv1a_hex(s);
}

Problem RunConfig::make_problem() const {
    Problem p;
    if (tree_m > 0 && problem == "synthetic") {
        p.name = "single-term-m" + std::to_string(tree_m);
        p.terms = {{tree_m, Coefficient::constant(-1.0)}};
        p.initial = [](const Point&) { return 1.0; };
    } else {
        p = builtin_problem(problem, problem_params);
    }
    if (!terms.empty()) {
        p.terms.clear();
        std::istringstream is(terms);
        std::string item;
        while (std::getline(is, item, ',')) {
            auto colon = item.find(':');
            if (colon == std::string::npos)
                throw ConfigError("problem.terms entries must look like power:coeff");
            Term term;
            term.power = static_cast<int>(to_long("problem.terms", trim(item.substr(0, colon))));
            term.coeff = Coefficient::constant(to_double("problem.terms", trim(item.substr(colon + 1))));
            p.terms.push_back(term);
        }
        p.name += "+terms";
    }
    if (diffusion) p.diffusion = {Coefficient::constant(*diffusion), Coefficient::constant(*diffusion)};
    if (drift) p.drift = {Coefficient::constant(*drift), Coefficient::constant(*drift)};
    require_valid(p);
    return p;
}

Grid default_grid(int dim, double T) {
    Grid g;
    g.dim = dim;
    g.x_lo = -40.0;
    g.x_hi = 40.0;
    if (dim == 2) {
        g.y_lo = -160.0;
        g.y_hi = 160.0;
    }
    g.dx = 0.25;
    g.dt = 1e-3;
    g.T = T;
    return g;
}

Grid RunConfig::grid(int dim) const {
    Grid g = default_grid(dim, t);
    if (!std::isnan(x_lo)) g.x_lo = x_lo;
    if (!std::isnan(x_hi)) g.x_hi = x_hi;
    if (dim == 2) {
        if (!std::isnan(y_lo)) g.y_lo = y_lo;
        if (!std::isnan(y_hi)) g.y_hi = y_hi;
    }
    g.dx = dx;
    g.dt = grid_dt;
    g.check();
    return g;
}

EstimatorConfig RunConfig::estimator() const {
    EstimatorConfig c;
    c.strategy = strategy;
    c.N = N;
    c.dt = dt;
    c.q = q;
    c.ne_max = ne_max;
    c.pade_order = pade;
    c.node_cap = static_cast<std::size_t>(node_cap);
    c.block = block;
    c.bootstrap = bootstrap;
    c.workers = workers;
    return c;
}

PddConfig RunConfig::pdd(int dim) const {
    PddConfig c;
    c.grid = grid(dim);
    c.n_sub = n_sub;
    c.nodal = nodal;
    c.mc = estimator();
    c.mc.workers = 1;
    c.boundary = boundary;
    c.boundary_space_nodes = boundary_nodes;
    c.workers = workers;
    c.fault_rate = fault_rate;
    c.max_attempts = max_attempts;
    c.seed = seed;
    return c;
}

void apply_desk_scale(RunConfig& rc) {
    rc.problem = "ex4";
    rc.x_lo = -10.0;
    rc.x_hi = 10.0;
    rc.y_lo = -10.0;
    rc.y_hi = 10.0;
    rc.dx = 0.25;
    rc.grid_dt = 1e-3;
    rc.t = 0.5;
    rc.boundary = BoundaryPolicy::probabilistic_boundary;
    rc.strategy = Strategy::A;
    rc.N = 2000000;
    rc.ne_max = 2;
    rc.dt = 0.05;
    rc.desk_scale = true;
}

}  // namespace treepde
