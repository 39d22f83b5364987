#include "treepde/sde.hpp"

#include <cmath>

#include "treepde/errors.hpp"

namespace treepde {

PathStepper::PathStepper(const Problem& p, double dt) : p_(&p), dt_(dt), dim_(p.dim) {
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    constant_ = true;
    for (int d = 0; d < dim_; ++d) {
        if (!p.diffusion[d].is_constant() || !p.drift[d].is_constant()) constant_ = false;
        if (constant_) {
            sigma_[d] = std::sqrt(2.0 * p.diffusion[d].value);
            drift_[d] = p.drift[d].value;
        }
    }
}

void PathStepper::advance(PathState& s, double duration, RngStream& rng, double root_t) const {
    if (duration < 0.0) throw ConfigError("negative path duration");
    const double target = s.t_elapsed + duration;
    // Whole steps first, then one partial step for the remainder.
    auto full = static_cast<long>(std::floor(duration / dt_ * (1.0 + 1e-12)));
    double rest = duration - static_cast<double>(full) * dt_;
    if (rest < 1e-12 * dt_) rest = 0.0;
    for (long i = 0; i <= full; ++i) {
        double h = i < full ? dt_ : rest;
        if (h == 0.0) break;
        double sq = std::sqrt(h);
        if (constant_) {
            for (int d = 0; d < dim_; ++d)
                s.position[d] += drift_[d] * h + sigma_[d] * sq * rng.normal();
        } else {
            double tp = root_t - s.t_elapsed;
            Point x = s.position;
            for (int d = 0; d < dim_; ++d) {
                double a = p_->diffusion[d](x, tp), b = p_->drift[d](x, tp);
                s.position[d] += b * h + std::sqrt(2.0 * a) * sq * rng.normal();
            }
        }
        s.t_elapsed += h;
    }
    s.t_elapsed = target;
}

PathState advance_path(PathState s, const Problem& p, double duration, double dt, RngStream& rng,
                       double root_t) {
    PathStepper(p, dt).advance(s, duration, rng, root_t);
    return s;
}

double expected_step(double dt, double t) {
    if (!(dt > 0.0) || dt > t) throw ConfigError("expected_step requires 0 < dt <= t");
    return dt - dt * dt / (2.0 * t);
}

}  // namespace treepde
