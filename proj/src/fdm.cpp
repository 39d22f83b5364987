#include "treepde/fdm.hpp"

#include <cmath>

#include "treepde/errors.hpp"

namespace treepde {

namespace {

int intervals(double lo, double hi, double h) {
    double r = (hi - lo) / h;
    long n = std::lround(r);
    if (n < 2 || std::fabs(r - static_cast<double>(n)) > 1e-9 * std::max(1.0, r))
        throw ConfigError("grid extent is not an integral multiple of the spacing");
    return static_cast<int>(n);
}

}  // namespace

int Grid::nx() const { return intervals(x_lo, x_hi, dx) + 1; }
int Grid::ny() const { return dim == 1 ? 1 : intervals(y_lo, y_hi, dx) + 1; }

int Grid::steps() const {
    if (T <= 0.0) return 0;
    return static_cast<int>(std::ceil(T / dt - 1e-9));
}

double Grid::step_dt() const { return steps() == 0 ? dt : T / steps(); }

void Grid::check() const {
    if (dim != 1 && dim != 2) throw ConfigError("grid dimension must be 1 or 2");
    if (!(dx > 0.0) || !(dt > 0.0) || T < 0.0) throw ConfigError("grid spacings must be positive");
    (void)nx();
    (void)ny();
}

bool Field::on_boundary(int i, int j) const {
    if (i == 0 || i == grid.nx() - 1) return true;
    return grid.dim == 2 && (j == 0 || j == grid.ny() - 1);
}

DirichletData zero_dirichlet() {
    return [](const Point&, double) { return 0.0; };
}

DirichletData reaction_ode_dirichlet(const Problem& p, double dt) {
    const Problem* pp = &p;
    return [pp, dt](const Point& x, double t) {
        double u = pp->initial(x);
        int n = static_cast<int>(std::ceil(t / dt - 1e-9));
        if (n == 0) return u;
        double h = t / n, s = 0.0;
        auto f = [&](double v, double tt) { return pp->nonlinearity(v, x, tt); };
        for (int i = 0; i < n; ++i, s += h) {
            double k1 = f(u, s), k2 = f(u + 0.5 * h * k1, s + 0.5 * h);
            double k3 = f(u + 0.5 * h * k2, s + 0.5 * h), k4 = f(u + h * k3, s + h);
            u += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        }
        return u;
    };
}

Field sample_initial(const Problem& p, const Grid& g) {
    g.check();
    Field f;
    f.grid = g;
    f.t = 0.0;
    const int nx = g.nx(), ny = g.ny();
    f.values.resize(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) f.at(i, j) = p.initial({g.x(i), g.y(j)});
    return f;
}

CrankNicolson::CrankNicolson(const Problem& p, const Grid& g)
    : p_(p), g_(g), nx_(g.nx()), ny_(g.ny()), nix_(nx_ - 2), niy_(g.dim == 1 ? 1 : ny_ - 2),
      dt_(g.step_dt()), frozen_(p.linear_operator_time_independent()) {
    if (p.dim != g.dim) throw ConfigError("grid and problem dimensions differ");
    if (nix_ < 1 || niy_ < 1) throw ConfigError("grid has no interior points");
    const std::size_t n = static_cast<std::size_t>(nix_) * niy_;
    rhs_base_.resize(n);
    rhs_.resize(n);
}

int CrankNicolson::interior_index(int i, int j) const {
    return g_.dim == 1 ? i - 1 : (j - 1) * nix_ + (i - 1);
}

namespace {

// Central-difference weights of a u_xx + b u_x along one axis.
struct AxisStencil {
    double lo, mid, hi;
};

AxisStencil axis_stencil(double a, double b, double h) {
    double r = a / (h * h), s = b / (2.0 * h);
    return {r - s, -2.0 * r, r + s};
}

}  // namespace

void CrankNicolson::assemble(double t_mid) {
    const int n = nix_ * niy_;
    const int bw = g_.dim == 1 ? 1 : nix_;
    lhs_ = BandedMatrix(n, bw, bw);
    const double h = g_.dx, c = 0.5 * dt_;
    for (int j = (g_.dim == 1 ? 0 : 1); j < (g_.dim == 1 ? 1 : ny_ - 1); ++j)
        for (int i = 1; i < nx_ - 1; ++i) {
            const Point x{g_.x(i), g_.y(j)};
            const int r = interior_index(i, j);
            double diag = 1.0;
            auto couple = [&](int ii, int jj, double w) {
                bool inside = ii > 0 && ii < nx_ - 1 && (g_.dim == 1 || (jj > 0 && jj < ny_ - 1));
                if (inside) lhs_.set(r, interior_index(ii, jj), -c * w);
            };
            auto sx = axis_stencil(p_.diffusion[0](x, t_mid), p_.drift[0](x, t_mid), h);
            diag -= c * sx.mid;
            couple(i - 1, j, sx.lo);
            couple(i + 1, j, sx.hi);
            if (g_.dim == 2) {
                auto sy = axis_stencil(p_.diffusion[1](x, t_mid), p_.drift[1](x, t_mid), h);
                diag -= c * sy.mid;
                couple(i, j - 1, sy.lo);
                couple(i, j + 1, sy.hi);
            }
            lhs_.set(r, r, diag);
        }
    lhs_.factorize();
    assembled_ = true;
}

// out = u^n + dt/2 L u^n + dt/2 (boundary couplings at t^{n+1}) on interior nodes.
void CrankNicolson::apply_explicit(const Field& f, double t_mid, std::vector<double>& out) const {
    const double h = g_.dx, c = 0.5 * dt_;
    const Field& nb = pred_;  // carries boundary values at t^{n+1}
    for (int j = (g_.dim == 1 ? 0 : 1); j < (g_.dim == 1 ? 1 : ny_ - 1); ++j)
        for (int i = 1; i < nx_ - 1; ++i) {
            const Point x{g_.x(i), g_.y(j)};
            double acc = f.at(i, j);
            auto term = [&](int ii, int jj, double w) {
                acc += c * w * f.at(ii, jj);
                bool boundary = ii == 0 || ii == nx_ - 1 || (g_.dim == 2 && (jj == 0 || jj == ny_ - 1));
                if (boundary) acc += c * w * nb.at(ii, jj);
            };
            auto sx = axis_stencil(p_.diffusion[0](x, t_mid), p_.drift[0](x, t_mid), h);
            acc += c * sx.mid * f.at(i, j);
            term(i - 1, j, sx.lo);
            term(i + 1, j, sx.hi);
            if (g_.dim == 2) {
                auto sy = axis_stencil(p_.diffusion[1](x, t_mid), p_.drift[1](x, t_mid), h);
                acc += c * sy.mid * f.at(i, j);
                term(i, j - 1, sy.lo);
                term(i, j + 1, sy.hi);
            }
            out[interior_index(i, j)] = acc;
        }
}

void CrankNicolson::step(Field& field, const DirichletData& bc) {
    const double t0 = field.t, t1 = t0 + dt_, tm = t0 + 0.5 * dt_;
    if (!assembled_ || !frozen_) assemble(tm);

    pred_ = field;
    for (int j = 0; j < ny_; ++j)
        for (int i = 0; i < nx_; ++i)
            if (pred_.on_boundary(i, j)) pred_.at(i, j) = bc({g_.x(i), g_.y(j)}, t1);
    apply_explicit(field, tm, rhs_base_);

    const int jlo = g_.dim == 1 ? 0 : 1, jhi = g_.dim == 1 ? 1 : ny_ - 1;
    // Predictor with f(u^n, t^n).
    for (int j = jlo; j < jhi; ++j)
        for (int i = 1; i < nx_ - 1; ++i) {
            int r = interior_index(i, j);
            rhs_[r] = rhs_base_[r] + dt_ * p_.nonlinearity(field.at(i, j), {g_.x(i), g_.y(j)}, t0);
        }
    lhs_.solve_in_place(rhs_);
    // Corrector with f at the average of u^n and the predictor.
    for (int j = jlo; j < jhi; ++j)
        for (int i = 1; i < nx_ - 1; ++i) {
            int r = interior_index(i, j);
            double um = 0.5 * (field.at(i, j) + rhs_[r]);
            rhs_[r] = rhs_base_[r] + dt_ * p_.nonlinearity(um, {g_.x(i), g_.y(j)}, tm);
        }
    lhs_.solve_in_place(rhs_);

    for (int j = jlo; j < jhi; ++j)
        for (int i = 1; i < nx_ - 1; ++i) pred_.at(i, j) = rhs_[interior_index(i, j)];
    pred_.t = t1;
    std::swap(field, pred_);
}

Field step_cn(const Problem& p, const Field& field, const DirichletData& bc) {
    CrankNicolson cn(p, field.grid);
    Field out = field;
    cn.step(out, bc);
    return out;
}

Field solve(const Problem& p, const Grid& g, const DirichletData& bc, const LevelHook& hook) {
    Field f = sample_initial(p, g);
    if (hook) hook(f);
    const int n = g.steps();
    if (n == 0) return f;
    CrankNicolson cn(p, g);
    for (int s = 0; s < n; ++s) {
        cn.step(f, bc);
        if (s == n - 1) f.t = g.T;
        if (hook) hook(f);
    }
    return f;
}

BoundaryPolicy parse_boundary_policy(const std::string& s) {
    if (s == "zero-dirichlet") return BoundaryPolicy::zero_dirichlet;
    if (s == "spline-interface") return BoundaryPolicy::spline_interface;
    if (s == "probabilistic-boundary") return BoundaryPolicy::probabilistic_boundary;
    throw ConfigError("unknown boundary policy '" + s + "'");
}

std::string to_string(BoundaryPolicy b) {
    switch (b) {
        case BoundaryPolicy::zero_dirichlet:
            return "zero-dirichlet";
        case BoundaryPolicy::spline_interface:
            return "spline-interface";
        case BoundaryPolicy::probabilistic_boundary:
            return "probabilistic-boundary";
    }
    return "";
}

}  // namespace treepde
