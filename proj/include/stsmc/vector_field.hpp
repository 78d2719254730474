#pragma once

#include <cmath>

#include "stsmc/errors.hpp"
#include "stsmc/perturbation.hpp"

namespace stsmc {

/// Super-twisting gains of the normalised loop
///   x1' = -k1 |x1|^{1/2} sgn(x1) + x2
///   x2' = -k2 sgn(x1) + q(t)
struct Gains {
    double k1 = 0.0;
    double k2 = 0.0;
};

struct State {
    double x1 = 0.0;
    double x2 = 0.0;
};

/// Phase-plane coordinates (w1, w2) = (x1, x1').
struct WState {
    double w1 = 0.0;
    double w2 = 0.0;
};

enum class FieldKind { Discontinuous, Regularized, Averaged };

inline double signum(double v) {
    return (v > 0.0) ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
}

/// Continuous ramp replacing sgn: clamps v/delta to [-1, 1].
inline double phi_delta(double v, double delta) {
    if (!(delta > 0.0)) throw ConfigError("phi_delta: delta must be positive");
    if (v >= delta) return 1.0;
    if (v <= -delta) return -1.0;
    return v / delta;
}

/// Regularisation residual sgn(v) - phi_delta(v, delta). Zero for |v| >= delta.
inline double rho(double v, double delta) {
    return signum(v) - phi_delta(v, delta);
}

inline State eval_discontinuous(const State& s, const Gains& g, double q_t) {
    const double sg = signum(s.x1);
    return {-g.k1 * std::sqrt(std::fabs(s.x1)) * sg + s.x2, -g.k2 * sg + q_t};
}

/// Agrees exactly with eval_discontinuous whenever |x1| >= delta.
inline State eval_regularized(const State& s, const Gains& g, double q_t, double delta) {
    const double ph = phi_delta(s.x1, delta);
    return {-g.k1 * std::sqrt(std::fabs(s.x1)) * ph + s.x2, -g.k2 * ph + q_t};
}

/// Averaged field: the regularised field with q(t) replaced by its period mean.
inline State eval_averaged(const State& s, const Gains& g, double q_bar, double delta) {
    return eval_regularized(s, g, q_bar, delta);
}

inline WState to_w(const State& s, const Gains& g, double delta) {
    return {s.x1, eval_regularized(s, g, 0.0, delta).x1};
}

}  // namespace stsmc
