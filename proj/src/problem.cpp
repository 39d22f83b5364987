#include "treepde/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "treepde/errors.hpp"

namespace treepde {

namespace {

// Locate t in a sorted axis; returns lower index and weight, clamped.
std::pair<std::size_t, double> bracket(const std::vector<double>& ax, double v) {
    if (ax.size() == 1 || v <= ax.front()) return {0, 0.0};
    if (v >= ax.back()) return {ax.size() - 2, 1.0};
    auto it = std::upper_bound(ax.begin(), ax.end(), v);
    std::size_t i = static_cast<std::size_t>(it - ax.begin()) - 1;
    return {i, (v - ax[i]) / (ax[i + 1] - ax[i])};
}

}  // namespace

double CoeffTable::eval(const Point& p, double t) const {
    const std::size_t nx = xs.size(), ny = ys.empty() ? 1 : ys.size(), nt = ts.size();
    auto [ix, wx] = bracket(xs, p[0]);
    auto [iy, wy] = ys.empty() ? std::pair<std::size_t, double>{0, 0.0} : bracket(ys, p[1]);
    auto [it, wt] = bracket(ts, t);
    auto at = [&](std::size_t a, std::size_t b, std::size_t c) {
        a = std::min(a, nx - 1);
        b = std::min(b, ny - 1);
        c = std::min(c, nt - 1);
        return values[(c * ny + b) * nx + a];
    };
    double acc = 0.0;
    for (int dc = 0; dc < 2; ++dc)
        for (int db = 0; db < 2; ++db)
            for (int da = 0; da < 2; ++da) {
                double w = (da ? wx : 1 - wx) * (db ? wy : 1 - wy) * (dc ? wt : 1 - wt);
                if (w != 0.0) acc += w * at(ix + da, iy + db, it + dc);
            }
    return acc;
}

Coefficient Coefficient::constant(double v) {
    Coefficient c;
    c.kind = CoeffKind::constant;
    c.value = v;
    return c;
}

Coefficient Coefficient::gaussian_rational(double amp, double center, double width, double tau0,
                                           int axis) {
    Coefficient c;
    c.kind = CoeffKind::gaussian_rational;
    c.amp = amp;
    c.center = center;
    c.width = width;
    c.tau0 = tau0;
    c.axis = axis;
    return c;
}

Coefficient Coefficient::tabulated(std::shared_ptr<const CoeffTable> t) {
    Coefficient c;
    c.kind = CoeffKind::tabulated;
    c.table = std::move(t);
    return c;
}

Coefficient Coefficient::callable(std::function<double(const Point&, double)> f) {
    Coefficient c;
    c.kind = CoeffKind::callable;
    c.fn = std::move(f);
    return c;
}

double Coefficient::operator()(const Point& p, double t) const {
    switch (kind) {
        case CoeffKind::constant:
            return value;
        case CoeffKind::gaussian_rational: {
            double z = (p[axis] - center) / width;
            return amp * std::exp(-z * z) / (t + tau0);
        }
        case CoeffKind::tabulated:
            return table->eval(p, t);
        case CoeffKind::callable:
            return fn(p, t);
    }
    return 0.0;
}

bool Coefficient::time_independent() const {
    switch (kind) {
        case CoeffKind::constant:
            return true;
        case CoeffKind::tabulated:
            return table && table->ts.size() <= 1;
        default:
            return false;
    }
}

int Problem::max_power() const {
    int m = 0;
    for (const auto& t : terms) m = std::max(m, t.power);
    return m;
}

double Problem::nonlinearity(double u, const Point& x, double t) const {
    double acc = 0.0;
    for (const auto& term : terms) acc += term.coeff(x, t) * std::pow(u, term.power);
    return acc;
}

bool Problem::full_ladder() const {
    if (terms.empty()) return false;
    for (std::size_t i = 0; i < terms.size(); ++i)
        if (terms[i].power != static_cast<int>(i) + 2) return false;
    return true;
}

bool Problem::linear_operator_time_independent() const {
    for (int d = 0; d < dim; ++d)
        if (!diffusion[d].time_independent() || !drift[d].time_independent()) return false;
    return true;
}

ValidationReport validate(const Problem& p) {
    ValidationReport r;
    if (p.dim != 1 && p.dim != 2) r.violations.push_back("dimension must be 1 or 2");
    if (p.terms.empty()) r.violations.push_back("no nonlinear terms (m < 2)");
    int prev = 1;
    for (const auto& t : p.terms) {
        if (t.power < 2) r.violations.push_back("power below 2");
        else if (t.power <= prev) r.violations.push_back("powers not strictly increasing");
        prev = std::max(prev, t.power);
        if (t.coeff.kind == CoeffKind::tabulated && !t.coeff.table)
            r.violations.push_back("tabulated coefficient without table");
        if (t.coeff.kind == CoeffKind::callable && !t.coeff.fn)
            r.violations.push_back("callable coefficient without function");
    }
    if (!p.initial) r.violations.push_back("missing initial data");

    // Positivity can only be probed for non-constant kinds.
    bool positive = true;
    const double probes[] = {-1.0, 0.0, 1.0};
    for (int d = 0; d < std::max(1, std::min(p.dim, 2)) && positive; ++d) {
        const auto& a = p.diffusion[d];
        if (a.kind == CoeffKind::callable && !a.fn) {
            positive = false;
            break;
        }
        for (double x : probes)
            for (double t : {0.0, 0.5, 1.0})
                if (!(a({x, x}, t) > 0.0)) positive = false;
    }
    if (!positive) r.violations.push_back("non-positive diffusion");

    if (r.ok() && !p.single_term() && !p.full_ladder())
        r.notes.push_back("sparse ladder: conservative q bound (m-1)/m applied");
    return r;
}

void require_valid(const Problem& p) {
    auto r = validate(p);
    if (r.ok()) return;
    std::ostringstream os;
    os << "invalid problem";
    if (!p.name.empty()) os << " '" << p.name << "'";
    os << ":";
    for (const auto& v : r.violations) os << " " << v << ";";
    throw ConfigError(os.str());
}

double eval_nonlinearity(const Problem& p, double u, const Point& x, double t) {
    return p.nonlinearity(u, x, t);
}

QRange admissible_q_range(const Problem& p) {
    const double m = p.max_power();
    if (p.single_term()) return {(m - 1.0) / m};
    if (p.full_ladder()) return {m / (m + 2.0)};
    return {std::max((m - 1.0) / m, m / (m + 2.0))};
}

double optimal_q(const Problem& p) { return admissible_q_range(p).lo; }

namespace {

double param(const std::map<std::string, double>& ps, const std::string& key, double dflt) {
    auto it = ps.find(key);
    return it == ps.end() ? dflt : it->second;
}

double heat_gaussian(double x) {
    return std::exp(-x * x / 4.0) / std::sqrt(4.0 * std::numbers::pi);
}

}  // namespace

Problem builtin_problem(const std::string& id, const std::map<std::string, double>& params) {
    using std::numbers::pi;
    Problem p;
    p.name = id;
    if (id == "ex1") {
        p.terms = {{2, Coefficient::constant(-1.0)}};
        p.initial = [](const Point& x) { return heat_gaussian(x[0]); };
    } else if (id == "ex2") {
        p.terms = {{2, Coefficient::constant(1.0)}};
        p.initial = [](const Point& x) { return -6.0 * heat_gaussian(x[0]); };
    } else if (id == "ex3") {
        double a = param(params, "a", 0.25);
        p.terms = {{2, Coefficient::constant(-(1.0 + a))}, {3, Coefficient::constant(-1.0)}};
        p.initial = [](const Point& x) { return 1.0 / (1.0 + std::exp(-x[0] / std::sqrt(2.0))); };
    } else if (id == "ex4") {
        double a = param(params, "a", 0.25);
        double ax = param(params, "A_x", 10.0), ay = param(params, "A_y", 40.0);
        p.dim = 2;
        p.terms = {{2, Coefficient::constant(-(1.0 + a))}, {3, Coefficient::constant(-1.0)}};
        p.initial = [ax, ay](const Point& x) {
            double cx = std::cos(pi * x[0] / (2.0 * ax)), cy = std::cos(pi * x[1] / (2.0 * ay));
            return -2.0 * cx * cx * cy * cy;
        };
    } else if (id == "ex5") {
        p.dim = 2;
        p.terms = {{2, Coefficient::gaussian_rational(-1.0, 0.0, 1.0, 0.1, 0)}};
        p.initial = [](const Point& x) { return heat_gaussian(x[0]); };
    } else {
        throw ConfigError("unknown builtin problem '" + id + "'");
    }
    for (const auto& kv : params) {
        static const char* known[] = {"a", "A_x", "A_y"};
        if (std::find(std::begin(known), std::end(known), kv.first) == std::end(known))
            throw ConfigError("unknown parameter '" + kv.first + "' for builtin " + id);
    }
    return p;
}

}  // namespace treepde
