#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace treepde {

/// Spatial point; the second coordinate is ignored in 1D.
using Point = std::array<double, 2>;

enum class CoeffKind { constant, gaussian_rational, tabulated, callable };

/// Values on a tensor grid over (x, [y,] t), multilinear in between and
/// clamped at the edges.
struct CoeffTable {
    std::vector<double> xs, ys, ts;  // ys empty in 1D
    std::vector<double> values;      // index: (it * ny + iy) * nx + ix
    double eval(const Point& p, double t) const;
};

/// c(x,t) drawn from a small closed family so configs stay declarative.
/// gaussian_rational: amp * exp(-((x[axis]-center)/width)^2) / (t + tau0).
struct Coefficient {
    CoeffKind kind = CoeffKind::constant;
    double value = 0.0;
    double amp = 0.0, center = 0.0, width = 1.0, tau0 = 1.0;
    int axis = 0;
    std::shared_ptr<const CoeffTable> table;
    std::function<double(const Point&, double)> fn;

    static Coefficient constant(double v);
    static Coefficient gaussian_rational(double amp, double center, double width, double tau0,
                                         int axis = 0);
    static Coefficient tabulated(std::shared_ptr<const CoeffTable> t);
    static Coefficient callable(std::function<double(const Point&, double)> f);

    double operator()(const Point& p, double t) const;
    bool is_constant() const { return kind == CoeffKind::constant; }
    bool time_independent() const;
};

struct Term {
    int power = 2;
    Coefficient coeff;
};

/// u_t = sum_i a_i u_{x_i x_i} + b_i u_{x_i} + sum_j c_j u^j, u(x,0) = g(x).
struct Problem {
    std::string name;
    int dim = 1;
    std::array<Coefficient, 2> diffusion{Coefficient::constant(1.0), Coefficient::constant(1.0)};
    std::array<Coefficient, 2> drift{Coefficient::constant(0.0), Coefficient::constant(0.0)};
    std::vector<Term> terms;
    std::function<double(const Point&)> initial;

    int max_power() const;
    double initial_value(const Point& x) const { return initial(x); }
    double nonlinearity(double u, const Point& x, double t) const;
    bool single_term() const { return terms.size() == 1; }
    bool full_ladder() const;
    bool linear_operator_time_independent() const;
};

struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<std::string> notes;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate(const Problem& p);
/// Throws ConfigError listing every violation.
void require_valid(const Problem& p);

double eval_nonlinearity(const Problem& p, double u, const Point& x, double t);

struct QRange {
    double lo;
    double hi = 1.0;  // open
    bool contains(double q) const { return q >= lo - 1e-12 && q < hi; }
};

QRange admissible_q_range(const Problem& p);
double optimal_q(const Problem& p);

/// Builtins ex1..ex5. Recognized parameters: a (ex3, ex4), A_x, A_y (ex4).
Problem builtin_problem(const std::string& id, const std::map<std::string, double>& params = {});

}  // namespace treepde
