#include "stsmc/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "stsmc/errors.hpp"
#include "stsmc/integrator.hpp"
#include "stsmc/tuning.hpp"

namespace stsmc {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double friction_torque(double omega, const MotorParams& m) {
    return m.T_C * (2.0 / std::numbers::pi) * std::atan(m.alpha * omega) + m.beta * omega;
}

PerturbationSpec ripple_perturbation(double L, const MotorParams& m) {
    if (!(L > 0.0)) throw ConfigError("ripple_perturbation: L must be positive");
    if (m.omega_r == 0.0) throw ConfigError("ripple_perturbation: omega_r must be nonzero");
    const double L1 = -L * m.J / (2.0 * m.omega_r);
    PerturbationSpec spec;
    spec.terms = {{L1, m.omega_r, 0.0}, {L1 / 3.0, 3.0 * m.omega_r, 0.0}};
    spec.period = kTwoPi / std::fabs(m.omega_r);
    spec.rate_bound = L * m.J;  // |d'(t)| = J*(L/2)|sin + sin3| <= J*L
    return spec;
}

PerturbationSpec normalized_ripple(double L, double T) {
    MotorParams m;
    m.J = 1.0;
    m.omega_r = kTwoPi / T;
    return ripple_perturbation(L, m);
}

MotorClosedLoop motor_closed_loop(const MotorParams& m, double k1p, double k2p, double L,
                                  double delta) {
    if (!(m.J > 0.0)) throw ConfigError("motor_closed_loop: J must be positive");
    if (!(k1p > 0.0 && k2p > 0.0)) throw ConfigError("motor_closed_loop: gains must be positive");
    MotorClosedLoop loop;
    loop.gains = {k1p / m.J, k2p / m.J};
    loop.motor = m;
    loop.delta = delta;
    // The normalised rate is d'(t)/J: divide the physical ripple amplitudes by J.
    loop.spec = ripple_perturbation(L, m);
    for (auto& term : loop.spec.terms) term.amp /= m.J;
    loop.spec.rate_bound = L;
    return loop;
}

State motor_error_field(const MotorClosedLoop& loop, double t, const State& s) {
    const MotorParams& m = loop.motor;
    const double e = s.x1;
    const double omega = m.omega_r + e;
    const double d_t = eval_d(loop.spec, t) * m.J;  // physical perturbation torque
    const double q_t = eval_q(loop.spec, t);        // normalised rate d'(t)/J

    const double k1p = loop.gains.k1 * m.J;
    const double k2p = loop.gains.k2 * m.J;
    const double ph = phi_delta(e, loop.delta);

    // x2 = -(k2p/J) * integral(phi) + d/J; recover the integrator state from it.
    const double integral_phi = (d_t / m.J - s.x2) * m.J / k2p;

    const double u = -k1p * std::sqrt(std::fabs(e)) * ph - k2p * integral_phi +
                     friction_torque(omega, m);
    const double e_dot = (u - friction_torque(omega, m) + d_t) / m.J;
    const double x2_dot = -(k2p / m.J) * ph + q_t;
    return {e_dot, x2_dot};
}

Gains finite_time_reference_gains(double L) {
    const double kbar2 = 1.1 * L;
    return {1.8 * std::sqrt(kbar2 + L), kbar2};
}

LimitCycleReport simulate_ripple_cycle(double L, double T, const Gains& g, double delta,
                                       double periods, double tol) {
    const PerturbationSpec spec = normalized_ripple(L, T);
    SimConfig cfg;
    cfg.delta = delta;
    cfg.dt = stability_cap(g, delta, L, T);
    cfg.t_end = periods * T;
    cfg.x0 = {0.0, 0.0};
    cfg.record_stride = std::max(1, static_cast<int>(std::floor(T / (cfg.dt * 4000.0))));
    const Trajectory traj = integrate(cfg, g, spec);
    return detect_limit_cycle(traj, g, delta, T, tol);
}

std::vector<Table1Row> reproduce_table1(double n_fraction) {
    const std::pair<double, double> cases[] = {{2.0, 2.5}, {2.0, 25.0}, {0.25, 2.5}, {0.25, 25.0}};
    std::vector<Table1Row> rows;
    for (const auto& [T, L] : cases) {
        Table1Row row;
        row.T = T;
        row.L = L;
        const Gains ref = finite_time_reference_gains(L);
        row.kbar1 = ref.k1;
        row.kbar2 = ref.k2;

        TuningProblem problem;
        problem.L = L;
        problem.T = T;
        problem.eta = 0.01;
        problem.eps = 1e-3;
        problem.n_fraction = n_fraction;
        const TuningResult tuned = tune_gains(problem);
        row.k1 = tuned.gains.k1;
        row.k2 = tuned.gains.k2;
        row.W1 = tuned.W1;
        row.target_unmet = tuned.target_unmet;

        const ValidationOutcome v = validate_tuning(tuned, problem);
        row.sim_abs_x1 = v.simulated_w1_max;
        rows.push_back(row);
    }
    return rows;
}

std::string table1_to_csv(const std::vector<Table1Row>& rows,
                          const std::vector<std::string>& header_comment) {
    std::ostringstream out;
    for (const auto& line : header_comment) out << "# " << line << "\n";
    out << "T,L,kbar1,kbar2,k1,k2,sim_abs_x1,W1,target_unmet\n";
    char buf[320];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n",
                      row.T, row.L, row.kbar1, row.kbar2, row.k1, row.k2, row.sim_abs_x1, row.W1,
                      row.target_unmet ? "true" : "false");
        out << buf;
    }
    return out.str();
}

}  // namespace stsmc
