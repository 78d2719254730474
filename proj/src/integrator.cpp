#include "stsmc/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "stsmc/errors.hpp"

namespace stsmc {

State Trajectory::at_time(double t) const {
    if (samples.empty()) throw InsufficientDataError("at_time: empty trajectory");
    const double pos = (t - t0) / dt_sample;
    if (pos <= 0.0) return samples.front();
    const auto last = static_cast<double>(samples.size() - 1);
    if (pos >= last) return samples.back();
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    const State& a = samples[i];
    const State& b = samples[i + 1];
    return {a.x1 + frac * (b.x1 - a.x1), a.x2 + frac * (b.x2 - a.x2)};
}

double stability_cap(const Gains& g, double delta, double rate_bound,
                     std::optional<double> period) {
    double cap = std::min(0.2 * delta / (g.k2 + rate_bound), 0.2 * std::sqrt(delta) / g.k1);
    if (period) cap = std::min(cap, *period / 2000.0);
    return cap;
}

double default_delta(const State& x0) {
    return 1e-5 * std::max({1.0, std::fabs(x0.x1), std::fabs(x0.x2)});
}

namespace {

bool out_of_range(const State& s) {
    return !std::isfinite(s.x1) || !std::isfinite(s.x2) ||
           std::fabs(s.x1) > kDivergenceThreshold || std::fabs(s.x2) > kDivergenceThreshold;
}

template <class Field>
Trajectory run_rk4(const SimConfig& cfg, double dt, const Field& f) {
    Trajectory traj;
    traj.t0 = 0.0;
    traj.dt_sample = dt * cfg.record_stride;

    const auto n_steps = static_cast<long long>(std::llround(cfg.t_end / dt));
    traj.samples.reserve(static_cast<std::size_t>(n_steps / cfg.record_stride) + 2);

    State s = cfg.x0;
    traj.samples.push_back(s);
    const double h = dt;
    for (long long step = 0; step < n_steps; ++step) {
        const double t = step * h;
        const State k1 = f(t, s);
        const State k2 = f(t + 0.5 * h, {s.x1 + 0.5 * h * k1.x1, s.x2 + 0.5 * h * k1.x2});
        const State k3 = f(t + 0.5 * h, {s.x1 + 0.5 * h * k2.x1, s.x2 + 0.5 * h * k2.x2});
        const State k4 = f(t + h, {s.x1 + h * k3.x1, s.x2 + h * k3.x2});
        s.x1 += h / 6.0 * (k1.x1 + 2.0 * k2.x1 + 2.0 * k3.x1 + k4.x1);
        s.x2 += h / 6.0 * (k1.x2 + 2.0 * k2.x2 + 2.0 * k3.x2 + k4.x2);
        if (out_of_range(s)) {
            traj.divergence = DivergencePoint{(step + 1) * h, s};
            break;
        }
        if ((step + 1) % cfg.record_stride == 0) traj.samples.push_back(s);
    }
    return traj;
}

}  // namespace

Trajectory integrate(const SimConfig& cfg, const Gains& g, const PerturbationSpec& p) {
    if (!(cfg.delta > 0.0)) throw ConfigError("integrate: delta must be positive");
    if (!(cfg.t_end > 0.0)) throw ConfigError("integrate: t_end must be positive");
    if (cfg.record_stride < 1) throw ConfigError("integrate: record_stride must be >= 1");
    validate_spec(p);

    const std::optional<double> period =
        p.is_periodic() ? std::optional<double>(p.period) : std::nullopt;
    const double cap = stability_cap(g, cfg.delta, p.rate_bound, period);
    double dt = cfg.dt;
    if (dt == 0.0) {
        dt = cap;
    } else if (!(dt > 0.0)) {
        throw ConfigError("integrate: dt must be positive");
    } else if (dt > cap * (1.0 + 1e-12)) {
        throw ConfigError("integrate: dt exceeds the stability cap " + std::to_string(cap));
    }

    switch (cfg.field_kind) {
        case FieldKind::Discontinuous:
            return run_rk4(cfg, dt, [&](double t, const State& s) {
                return eval_discontinuous(s, g, eval_q(p, t));
            });
        case FieldKind::Averaged: {
            const double q_bar = mean_rate(p);
            return run_rk4(cfg, dt, [&](double, const State& s) {
                return eval_averaged(s, g, q_bar, cfg.delta);
            });
        }
        case FieldKind::Regularized:
        default:
            return run_rk4(cfg, dt, [&](double t, const State& s) {
                return eval_regularized(s, g, eval_q(p, t), cfg.delta);
            });
    }
}

std::vector<CrossingEvent> find_crossings(const Trajectory& traj, CrossingAxis axis,
                                          const Gains& g, double delta) {
    std::vector<CrossingEvent> events;
    if (traj.samples.size() < 2) return events;

    auto value = [&](const State& s) {
        switch (axis) {
            case CrossingAxis::X1Zero: return s.x1;
            case CrossingAxis::X2Zero: return s.x2;
            case CrossingAxis::W2Zero: return to_w(s, g, delta).w2;
        }
        return s.x1;
    };

    double prev = value(traj.samples[0]);
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        const double cur = value(traj.samples[i]);
        if ((prev < 0.0 && cur >= 0.0) || (prev > 0.0 && cur <= 0.0)) {
            const double frac = prev / (prev - cur);
            events.push_back({traj.t_at(i - 1) + frac * traj.dt_sample,
                              prev < 0.0 ? CrossingDirection::Rising : CrossingDirection::Falling,
                              axis});
        }
        prev = cur;
    }
    return events;
}

std::string trajectory_to_csv(const Trajectory& traj, const Gains& g, double delta,
                              const std::vector<std::string>& header_comment) {
    std::ostringstream out;
    for (const auto& line : header_comment) out << "# " << line << "\n";
    out << "t,x1,x2,w1,w2\n";
    char buf[160];
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const State& s = traj.samples[i];
        const WState w = to_w(s, g, delta);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", traj.t_at(i), s.x1,
                      s.x2, w.w1, w.w2);
        out << buf;
    }
    return out.str();
}

}  // namespace stsmc
