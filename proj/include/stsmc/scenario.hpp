#pragma once

#include <string>
#include <vector>

#include "stsmc/analysis.hpp"
#include "stsmc/perturbation.hpp"
#include "stsmc/vector_field.hpp"

namespace stsmc {

/// PMSM velocity-loop parameters. Friction is feed-forward-cancelled by the
/// control law, so these only exercise the cancellation path.
struct MotorParams {
    double J = 1.0;        // kg m^2
    double omega_r = 0.0;  // rad/s, constant velocity set point
    double T_C = 0.5;      // N m, Coulomb level
    double alpha = 1000.0; // arctan steepness, > 100
    double beta = 0.01;    // N m s, viscous coefficient
    double T_L = 0.0;      // N m, known load
};

/// T_C*(2/pi)*arctan(alpha*omega) + beta*omega.
double friction_torque(double omega, const MotorParams& m);

/// Torque-ripple perturbation d(t) = L1 cos(w_r t) + L2 cos(3 w_r t) with
/// L1 = 3 L2 = -L*J/(2*w_r); period 2*pi/w_r; the induced normalised rate is
/// q(t) = d'(t)/J = (L/2)[sin(w_r t) + sin(3 w_r t)] with declared bound L.
PerturbationSpec ripple_perturbation(double L, const MotorParams& m);

/// Normalised ripple spec for J = 1 and omega_r = 2*pi/T (the q(t) actually
/// fed to the normalised closed loop).
PerturbationSpec normalized_ripple(double L, double T);

struct MotorClosedLoop {
    Gains gains;            // (k1p/J, k2p/J)
    PerturbationSpec spec;  // normalised rate spec (q = d'/J)
    MotorParams motor;
    double delta = 0.0;
};

MotorClosedLoop motor_closed_loop(const MotorParams& m, double k1p, double k2p,
                                  double L, double delta);

/// Error-dynamics field of the physical motor loop,
///   e' = (1/J)[u - T_F(omega) + d(t)],
/// under the feed-forward-cancelling super-twisting law with integrator state
/// sigma' = phi_delta(e, delta). Must equal eval_regularized with the
/// normalised gains, sample for sample.
State motor_error_field(const MotorClosedLoop& loop, double t, const State& s);

/// Full simulate+detect pipeline for the normalised motor-ripple loop,
/// starting at the origin, t_end = periods * T, dt at the stability cap.
LimitCycleReport simulate_ripple_cycle(double L, double T, const Gains& g, double delta,
                                       double periods = 20.0, double tol = 1e-3);

struct Table1Row {
    double T = 0.0;
    double L = 0.0;
    double kbar1 = 0.0;
    double kbar2 = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;
    double sim_abs_x1 = 0.0;
    double W1 = 0.0;
    bool target_unmet = false;
};

/// Finite-time reference gains: kbar2 = 1.1*L, kbar1 = 1.8*sqrt(kbar2 + L).
Gains finite_time_reference_gains(double L);

/// The four (T, L) motor-ripple cases tuned to eta = 0.01 and re-simulated.
std::vector<Table1Row> reproduce_table1(double n_fraction);

std::string table1_to_csv(const std::vector<Table1Row>& rows,
                          const std::vector<std::string>& header_comment = {});

}  // namespace stsmc
