#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stsmc/integrator.hpp"
#include "stsmc/perturbation.hpp"
#include "stsmc/vector_field.hpp"

namespace stsmc {

struct LimitCycleReport {
    bool converged = false;
    double return_map_residual = 0.0;  // sup-norm of x(t+T)-x(t), last analysed period
    double period = 0.0;
    double w1_max = 0.0;
    double w1_min = 0.0;
    double w2_max_abs = 0.0;
    int n_transient_periods = 0;
};

struct BoundSet {
    double prop3_bound = 0.0;          // (1/8)(k2+L)T^2
    std::optional<double> W1;          // tuning bound; absent if k1 <= sqrt(2(L-k2))
    double chatter_bound = 0.0;        // (k2+L)T/2
    double n_fraction = 0.5;
};

/// Finite-time regime: k2 > L and k1 >= 1.8*sqrt(k2+L).
bool check_finite_time_gains(const Gains& g, double L);

/// Limit-cycle convergence conditions: k2 > |q_bar| and k1 >= 1.8*sqrt(k2+|q_bar|).
bool check_limit_cycle_gains(const Gains& g, double q_bar);

/// Applicability of the W1 bound: k2 >= L, or k1 > sqrt(2(L-k2)).
bool check_w1_bound_gain(const Gains& g, double L);

double prop3_bound(const Gains& g, double L, double T);

/// W1 = (L-k2)^2 n^2 T^2 / (k1 - 2(L-k2)/k1)^2 for k2 < L; 0 for k2 >= L.
/// Throws BoundInapplicableError when k1 <= sqrt(2(L-k2)), ConfigError for
/// n outside (0, 1/2].
double w1_tuning_bound(const Gains& g, double L, double T, double n);

double chatter_bound(const Gains& g, double L, double T);

BoundSet make_bound_set(const Gains& g, double L, double T, double n_fraction);

/// Period-T return-map scan from the trajectory end backwards. Converged when
/// the sup-norm residual over one period is <= tol*(1 + cycle amplitude).
/// Amplitudes are measured over the last 2 periods with parabolic refinement
/// of extrema. Throws InsufficientDataError (< 6 periods of data) and
/// DivergenceError (divergent or non-periodic input).
LimitCycleReport detect_limit_cycle(const Trajectory& traj, const Gains& g, double delta,
                                    double T, double tol = 1e-3);

// ---- parameter sweeps ----------------------------------------------------

/// Gain rule for sweep grids: either fixed gains, or scaled with the grid's
/// L as k2 = k2_over_L * L, k1 = 1.8*sqrt(k2 + L) (under-tuned, satisfies
/// the limit-cycle conditions for zero-mean perturbations). k2_over_L below
/// ~0.77 keeps k2 under the ripple's true rate maximum, so the cycle survives
/// the discontinuous limit instead of collapsing with delta.
struct GainRule {
    bool scaled = true;
    double k2_over_L = 0.5;
    Gains fixed;  // used when scaled == false

    Gains gains_for(double L) const;
};

struct SweepSettings {
    GainRule gain_rule;
    double delta_rel = 1e-3;   // delta = delta_rel * prop3_bound
    double periods = 20.0;     // t_end = periods * T
    double tol = 1e-3;
    double n_fraction = 0.5;
};

struct SweepRow {
    double param = 0.0;
    double L = 0.0;
    double T = 0.0;
    Gains gains;
    double delta = 0.0;
    double dt = 0.0;
    std::optional<LimitCycleReport> report;
    BoundSet bounds;
    bool diverged = false;
    std::string error;  // empty on success
};

/// Builds the perturbation used at a sweep grid point.
using SpecBuilder = std::function<PerturbationSpec(double L, double T)>;

/// One full simulate+detect per grid point, rows in grid order. Per-point
/// failures are recorded in-row, never thrown.
std::vector<SweepRow> sweep_L(const std::vector<double>& L_grid, double T,
                              const SpecBuilder& build_spec, const SweepSettings& settings);
std::vector<SweepRow> sweep_T(const std::vector<double>& T_grid, double L,
                              const SpecBuilder& build_spec, const SweepSettings& settings);
std::vector<SweepRow> sweep_gains(const std::vector<Gains>& gain_grid, double L, double T,
                                  const SpecBuilder& build_spec, const SweepSettings& settings);

/// CSV: "param,w1_max,w1_min,w2_max,prop3_bound,W1,chatter_bound,converged,residual".
std::string sweep_to_csv(const std::vector<SweepRow>& rows,
                         const std::vector<std::string>& header_comment = {});

struct FitSummary {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

FitSummary linear_fit(const std::vector<double>& x, const std::vector<double>& y);
FitSummary loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace stsmc
