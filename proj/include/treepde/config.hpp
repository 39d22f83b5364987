#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "treepde/estimator.hpp"
#include "treepde/fdm.hpp"
#include "treepde/pdd.hpp"
#include "treepde/problem.hpp"

namespace treepde {

/// Flat `key = value` text; `[section]` lines prefix following keys with
/// "section.". Blank lines and `#` comments are ignored.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> load_config_file(const std::string& path);

/// Everything a subcommand needs, resolved from file keys and flags.
struct RunConfig {
    std::string problem = "ex1";
    std::map<std::string, double> problem_params;
    std::string terms;           // explicit "power:coeff, ..." list, replaces the builtin's
    std::optional<double> diffusion, drift;

    Strategy strategy = Strategy::B;
    long N = 100000;
    double dt = 0.01;
    std::optional<double> q;
    int ne_max = 3;
    std::optional<std::pair<int, int>> pade;
    long node_cap = 10000;
    long block = 4096;
    int bootstrap = 20;

    double x = 0.0, y = 0.0, t = 0.5;

    // Grid extents left NaN take the defaults of default_grid().
    double x_lo = NAN, x_hi = NAN, y_lo = NAN, y_hi = NAN;
    double dx = 0.25, grid_dt = 1e-3;
    BoundaryPolicy boundary = BoundaryPolicy::zero_dirichlet;
    int n_sub = 4;
    NodalConfig nodal;
    int boundary_nodes = 9;
    int workers = 1;
    double fault_rate = 0.0;
    int max_attempts = 5;
    std::uint64_t seed = 1;

    int tree_m = 0;  // tree-stats: synthetic single-term problem of this power
    std::string input;
    std::string out;
    bool desk_scale = false;

    /// Applies one dotted key; throws ConfigError on unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    /// Canonical key=value lines, sorted, used for hashing and echoing.
    std::vector<std::pair<std::string, std::string>> canonical() const;
    std::string hash() const;

    Problem make_problem() const;
    /// Final time is `t`.
    Grid grid(int dim) const;
    EstimatorConfig estimator() const;
    PddConfig pdd(int dim) const;
};

/// Example 4 desk-scale preset: box, grid, boundary policy and Monte Carlo budget.
void apply_desk_scale(RunConfig& rc);

/// Default grid for a problem: [-40, 40] (and [-160, 160] in y), dx 0.25, dt 1e-3.
Grid default_grid(int dim, double T);

std::string fnv1a_hex(const std::string& s);

}  // namespace treepde
