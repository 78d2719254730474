#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "stsmc/perturbation.hpp"
#include "stsmc/vector_field.hpp"

namespace stsmc {

/// Any state component beyond this magnitude counts as divergence.
inline constexpr double kDivergenceThreshold = 1e12;

struct SimConfig {
    double delta = 1e-5;
    double dt = 0.0;        // 0 -> use stability_cap
    double t_end = 0.0;
    State x0;
    FieldKind field_kind = FieldKind::Regularized;
    int record_stride = 1;
};

struct DivergencePoint {
    double t = 0.0;
    State state;
};

/// Uniformly sampled solution. dt_sample = dt * record_stride. If divergence
/// is set, samples stop at the last finite in-range state.
struct Trajectory {
    double t0 = 0.0;
    double dt_sample = 0.0;
    std::vector<State> samples;
    std::optional<DivergencePoint> divergence;

    double t_at(std::size_t i) const { return t0 + dt_sample * static_cast<double>(i); }
    double t_last() const {
        return samples.empty() ? t0 : t_at(samples.size() - 1);
    }
    /// Linear interpolation of the state at time t (clamped to sample range).
    State at_time(double t) const;
};

enum class CrossingAxis { X1Zero, X2Zero, W2Zero };
enum class CrossingDirection { Rising, Falling };

struct CrossingEvent {
    double t_cross = 0.0;
    CrossingDirection direction = CrossingDirection::Rising;
    CrossingAxis axis = CrossingAxis::X1Zero;
};

/// Largest step size accepted for the regularised field:
/// min(T/2000, 0.2*delta/(k2+L), 0.2*sqrt(delta)/k1). The period term is
/// dropped for non-periodic (constant-rate) specs.
double stability_cap(const Gains& g, double delta, double rate_bound,
                     std::optional<double> period);

/// delta default: 1e-5 * max(1, |x0|_inf).
double default_delta(const State& x0);

/// Classical 4th-order fixed-step integration. Divergence is recorded, not
/// thrown. Throws ConfigError for invalid configuration (including dt above
/// the stability cap).
Trajectory integrate(const SimConfig& cfg, const Gains& g, const PerturbationSpec& p);

std::vector<CrossingEvent> find_crossings(const Trajectory& traj, CrossingAxis axis,
                                          const Gains& g, double delta);

/// CSV export, header "t,x1,x2,w1,w2", 17 significant digits. Lines in
/// `header_comment` (if any) are emitted first, each prefixed with "# ".
std::string trajectory_to_csv(const Trajectory& traj, const Gains& g, double delta,
                              const std::vector<std::string>& header_comment = {});

}  // namespace stsmc
