#include "treepde/interp.hpp"

#include <algorithm>
#include <cmath>

#include "treepde/errors.hpp"

namespace treepde {

SplineBasis::SplineBasis(std::vector<double> nodes) : x_(std::move(nodes)) {
    const int n = static_cast<int>(x_.size());
    if (n < 4) throw ConfigError("not-a-knot spline needs at least 4 nodes");
    for (int i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1])) throw ConfigError("spline nodes must be strictly increasing");
    std::vector<double> h(n - 1);
    for (int i = 0; i + 1 < n; ++i) h[i] = x_[i + 1] - x_[i];

    lu_ = BandedMatrix(n, 1, 1);
    lu_.set(0, 0, h[1]);
    lu_.set(0, 1, h[0] + h[1]);
    for (int i = 1; i + 1 < n; ++i) {
        lu_.set(i, i - 1, h[i]);
        lu_.set(i, i, 2.0 * (h[i - 1] + h[i]));
        lu_.set(i, i + 1, h[i - 1]);
    }
    lu_.set(n - 1, n - 2, h[n - 2] + h[n - 3]);
    lu_.set(n - 1, n - 1, h[n - 3]);
    lu_.factorize();
}

std::vector<double> SplineBasis::slopes(const std::vector<double>& y) const {
    const int n = static_cast<int>(x_.size());
    if (static_cast<int>(y.size()) != n) throw ConfigError("spline value count mismatch");
    std::vector<double> h(n - 1), d(n - 1), b(n);
    for (int i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        d[i] = (y[i + 1] - y[i]) / h[i];
    }
    double w = h[0] + h[1];
    b[0] = ((h[0] + 2.0 * w) * h[1] * d[0] + h[0] * h[0] * d[1]) / w;
    for (int i = 1; i + 1 < n; ++i) b[i] = 3.0 * (h[i] * d[i - 1] + h[i - 1] * d[i]);
    w = h[n - 2] + h[n - 3];
    b[n - 1] = (h[n - 2] * h[n - 2] * d[n - 3] + (2.0 * w + h[n - 2]) * h[n - 3] * d[n - 2]) / w;
    lu_.solve_in_place(b);
    return b;
}

Spline1D::Spline1D(std::shared_ptr<const SplineBasis> basis, std::vector<double> values)
    : basis_(std::move(basis)), y_(std::move(values)) {
    s_ = basis_->slopes(y_);
}

double Spline1D::operator()(double x) const {
    const auto& xs = basis_->nodes();
    const double span = xs.back() - xs.front(), tol = 1e-9 * span;
    if (x < xs.front() - tol || x > xs.back() + tol)
        throw ConfigError("spline query outside node range");
    x = std::clamp(x, xs.front(), xs.back());
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
    i = std::min(i, xs.size() - 2);
    const double h = xs[i + 1] - xs[i], dx = x - xs[i];
    const double d = (y_[i + 1] - y_[i]) / h;
    const double c2 = (3.0 * d - 2.0 * s_[i] - s_[i + 1]) / h;
    const double c3 = (s_[i] + s_[i + 1] - 2.0 * d) / (h * h);
    return y_[i] + dx * (s_[i] + dx * (c2 + dx * c3));
}

Spline1D build_spline(const std::vector<double>& nodes, const std::vector<double>& values) {
    return {std::make_shared<SplineBasis>(nodes), values};
}

double eval_spline(const Spline1D& s, double x) { return s(x); }

TensorSpline2D::TensorSpline2D(std::vector<double> ys, std::vector<double> ts,
                               const std::vector<double>& values)
    : ybasis_(std::make_shared<SplineBasis>(std::move(ys))),
      tbasis_(std::make_shared<SplineBasis>(std::move(ts))) {
    const std::size_t ny = ybasis_->nodes().size(), nt = tbasis_->nodes().size();
    if (values.size() != ny * nt) throw ConfigError("tensor spline value count mismatch");
    for (std::size_t iy = 0; iy < ny; ++iy)
        tsplines_.emplace_back(tbasis_, std::vector<double>(values.begin() + iy * nt,
                                                            values.begin() + (iy + 1) * nt));
}

Spline1D TensorSpline2D::slice_t(double t) const {
    std::vector<double> v(tsplines_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = tsplines_[i](t);
    return {ybasis_, std::move(v)};
}

double TensorSpline2D::operator()(double y, double t) const { return slice_t(t)(y); }

double eval_tensor(const TensorSpline2D& s, double y, double t) { return s(y, t); }

}  // namespace treepde
