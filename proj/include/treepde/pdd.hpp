#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treepde/estimator.hpp"
#include "treepde/fdm.hpp"
#include "treepde/interp.hpp"
#include "treepde/task_pool.hpp"

namespace treepde {

struct NodalConfig {
    int n_space = 9;  // per interface, along y (2D only)
    int n_time = 6;   // per interface, over [0, T]
};

enum class TaskKind { initial, boundary_copy, monte_carlo };

struct PddTask {
    std::uint64_t id = 0;
    Point point{0.0, 0.0};
    double t = 0.0;
    TaskKind kind = TaskKind::monte_carlo;
    int group = 0;  // interface index, or boundary side
    std::uint64_t stream = 0;
};

/// Geometry and task list of a decomposition along x.
struct PddPlan {
    Grid grid;
    int n_sub = 1;
    std::vector<double> interfaces;   // x coordinates
    std::vector<double> space_nodes;  // y nodes per interface (2D)
    std::vector<double> time_nodes;
    std::vector<Grid> subgrids;
    /// Interface tasks, index (interface * n_space + iy) * n_time + it.
    std::vector<PddTask> tasks;
    /// Global-boundary nodal tasks when the boundary is probabilistic.
    std::vector<PddTask> boundary_tasks;
    std::vector<double> boundary_space_nodes[4];  // sides x_lo, x_hi, y_lo, y_hi
    std::vector<std::size_t> boundary_index[4];    // side node -> boundary task (times inner)

    std::size_t n_space() const { return grid.dim == 2 ? space_nodes.size() : 1; }
    std::size_t n_time() const { return time_nodes.size(); }
};

struct PddConfig {
    Grid grid;
    int n_sub = 4;
    NodalConfig nodal;
    EstimatorConfig mc;
    BoundaryPolicy boundary = BoundaryPolicy::zero_dirichlet;
    int boundary_space_nodes = 9;
    int workers = 1;
    double fault_rate = 0.0;
    int max_attempts = 5;
    std::uint64_t seed = 1;
};

PddPlan plan_decomposition(const Problem& p, const PddConfig& cfg);

struct NodalTables {
    std::vector<double> values, stderrs;  // indexed like the task list
    std::vector<TaskOutcome> outcomes;    // monte-carlo tasks only, same indexing
    int max_attempts_used = 0;
    long faults = 0;
};

/// Runs the Monte Carlo tasks of `tasks` (others are left at zero) on a
/// fault-tolerant worker pool.
NodalTables run_nodal_tasks(const std::vector<PddTask>& tasks, const Problem& p,
                            const EstimatorConfig& mc, int workers, double fault_rate,
                            int max_attempts, std::uint64_t seed);

/// Interface values: t = 0 from g, global-boundary points from `global_bc`,
/// the rest by Monte Carlo.
NodalTables compute_interface_values(const PddPlan& plan, const Problem& p,
                                     const EstimatorConfig& mc, int workers, double fault_rate,
                                     const DirichletData& global_bc, int max_attempts = 5,
                                     std::uint64_t seed = 1);

/// Dirichlet data for interface i built from the nodal tables.
std::vector<DirichletData> interface_splines(const PddPlan& plan, const NodalTables& tables);

/// Boundary data spliced together from boundary nodal values.
DirichletData boundary_splines(const PddPlan& plan, const NodalTables& tables);

Field solve_subdomains(const PddPlan& plan, const Problem& p,
                       const std::vector<DirichletData>& interface_data,
                       const DirichletData& global_bc, int workers = 1);

struct PddTiming {
    double t_mc = 0.0, t_int = 0.0, t_local = 0.0, t_total = 0.0;
};

struct PddResult {
    PddPlan plan;
    Field field;
    NodalTables interface_tables;
    NodalTables boundary_tables;
    DirichletData global_bc;
    PddTiming timing;
};

PddResult run_pdd(const Problem& p, const PddConfig& cfg);

}  // namespace treepde
