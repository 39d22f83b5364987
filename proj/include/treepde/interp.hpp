#pragma once

#include <memory>
#include <vector>

#include "treepde/banded.hpp"

namespace treepde {

/// Factorized not-a-knot slope system for a fixed node set; reusable across
/// value vectors.
class SplineBasis {
public:
    explicit SplineBasis(std::vector<double> nodes);
    const std::vector<double>& nodes() const { return x_; }
    /// Node slopes for the given values.
    std::vector<double> slopes(const std::vector<double>& y) const;

private:
    std::vector<double> x_;
    mutable BandedMatrix lu_;  // factorized once in the constructor
};

class Spline1D {
public:
    Spline1D() = default;
    Spline1D(std::shared_ptr<const SplineBasis> basis, std::vector<double> values);

    double operator()(double x) const;
    double lo() const { return basis_->nodes().front(); }
    double hi() const { return basis_->nodes().back(); }
    const std::vector<double>& values() const { return y_; }

private:
    std::shared_ptr<const SplineBasis> basis_;
    std::vector<double> y_, s_;
};

/// Throws ConfigError for fewer than 4 nodes or non-increasing nodes.
Spline1D build_spline(const std::vector<double>& nodes, const std::vector<double>& values);
double eval_spline(const Spline1D& s, double x);

/// Tensor product spline on a (y, t) node grid: splines in t per y node,
/// then a spline in y through their values.
class TensorSpline2D {
public:
    TensorSpline2D() = default;
    /// values[iy * nt + it]
    TensorSpline2D(std::vector<double> ys, std::vector<double> ts, const std::vector<double>& values);
    double operator()(double y, double t) const;
    /// Values along all y nodes at time t, then the y-spline through them.
    Spline1D slice_t(double t) const;

private:
    std::shared_ptr<const SplineBasis> ybasis_, tbasis_;
    std::vector<Spline1D> tsplines_;
};

double eval_tensor(const TensorSpline2D& s, double y, double t);

}  // namespace treepde
