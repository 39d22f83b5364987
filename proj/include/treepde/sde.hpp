#pragma once

#include "treepde/problem.hpp"
#include "treepde/rng.hpp"

namespace treepde {

struct PathState {
    Point position{0.0, 0.0};
    double t_elapsed = 0.0;
};

/// Euler scheme for dX = b dt + sqrt(2a) dW, so the generator is a d_xx + b d_x.
/// `root_t` is the PDE time at which the path started; coefficients are
/// evaluated at PDE time root_t - t_elapsed. The last step is shortened so
/// t_elapsed advances by exactly `duration`.
PathState advance_path(PathState s, const Problem& p, double duration, double dt, RngStream& rng,
                       double root_t);

/// Euler stepping for the problem's linear operator, without a Problem lookup
/// per step when coefficients are constant.
class PathStepper {
public:
    PathStepper(const Problem& p, double dt);
    void advance(PathState& s, double duration, RngStream& rng, double root_t) const;
    double dt() const { return dt_; }

private:
    const Problem* p_;
    double dt_;
    bool constant_;
    int dim_;
    double sigma_[2]{}, drift_[2]{};
};

/// Most probable Euler step when the target time is uniformly placed in [0, t].
double expected_step(double dt, double t);

}  // namespace treepde
