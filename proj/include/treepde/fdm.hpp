#pragma once

#include <functional>
#include <string>
#include <vector>

#include "treepde/banded.hpp"
#include "treepde/problem.hpp"

namespace treepde {

struct Grid {
    int dim = 1;
    double x_lo = -10.0, x_hi = 10.0;
    double y_lo = 0.0, y_hi = 0.0;
    double dx = 0.25;  // same spacing on both axes
    double dt = 1e-3;
    double T = 0.5;

    int nx() const;
    int ny() const;  // 1 in 1D
    double x(int i) const { return x_lo + i * dx; }
    double y(int j) const { return dim == 1 ? 0.0 : y_lo + j * dx; }
    int steps() const;
    double step_dt() const;  // T / steps()
    /// Throws ConfigError unless extents are integral multiples of dx.
    void check() const;
};

/// Nodal values, y outer and x inner: values[j * nx + i].
struct Field {
    Grid grid;
    double t = 0.0;
    std::vector<double> values;

    double& at(int i, int j = 0) { return values[static_cast<std::size_t>(j) * grid.nx() + i]; }
    double at(int i, int j = 0) const {
        return values[static_cast<std::size_t>(j) * grid.nx() + i];
    }
    bool on_boundary(int i, int j) const;
};

/// Dirichlet values on the outer ring of the grid.
using DirichletData = std::function<double(const Point&, double t)>;

DirichletData zero_dirichlet();
/// Boundary values from the spatially homogeneous reaction ODE u' = f(u)
/// started at g(x), integrated by classical RK4 with `substeps` per unit dt.
DirichletData reaction_ode_dirichlet(const Problem& p, double dt);

Field sample_initial(const Problem& p, const Grid& g);

/// Crank-Nicolson with a two-stage Picard treatment of the nonlinearity;
/// the linear operator is frozen at the step midpoint.
class CrankNicolson {
public:
    CrankNicolson(const Problem& p, const Grid& g);
    /// Advances `field` by one step of size grid.step_dt() from time field.t.
    void step(Field& field, const DirichletData& bc);

private:
    void assemble(double t_mid);
    void apply_explicit(const Field& f, double t_mid, std::vector<double>& out) const;
    int interior_index(int i, int j) const;

    const Problem& p_;
    Grid g_;
    int nx_, ny_, nix_, niy_;
    double dt_;
    BandedMatrix lhs_;
    bool assembled_ = false;
    bool frozen_;
    Field pred_;
    std::vector<double> rhs_base_, rhs_;
    std::vector<double> bc_next_;
};

Field step_cn(const Problem& p, const Field& field, const DirichletData& bc);

/// Called after every completed step (and once for the initial field).
using LevelHook = std::function<void(const Field&)>;

Field solve(const Problem& p, const Grid& g, const DirichletData& bc, const LevelHook& hook = {});

enum class BoundaryPolicy { zero_dirichlet, spline_interface, probabilistic_boundary };
BoundaryPolicy parse_boundary_policy(const std::string& s);
std::string to_string(BoundaryPolicy b);

}  // namespace treepde
