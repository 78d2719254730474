#include "stsmc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "stsmc/errors.hpp"

namespace stsmc {

bool check_finite_time_gains(const Gains& g, double L) {
    return g.k2 > L && g.k1 >= 1.8 * std::sqrt(g.k2 + L);
}

bool check_limit_cycle_gains(const Gains& g, double q_bar) {
    const double a = std::fabs(q_bar);
    return g.k2 > a && g.k1 >= 1.8 * std::sqrt(g.k2 + a);
}

bool check_w1_bound_gain(const Gains& g, double L) {
    if (g.k2 >= L) return true;
    return g.k1 > std::sqrt(2.0 * (L - g.k2));
}

double prop3_bound(const Gains& g, double L, double T) {
    return 0.125 * (g.k2 + L) * T * T;
}

double w1_tuning_bound(const Gains& g, double L, double T, double n) {
    if (!(n > 0.0 && n <= 0.5)) throw ConfigError("w1_tuning_bound: n must be in (0, 1/2]");
    if (g.k2 >= L) return 0.0;
    if (!(g.k1 > std::sqrt(2.0 * (L - g.k2))))
        throw BoundInapplicableError("w1_tuning_bound: requires k1 > sqrt(2(L-k2))");
    const double lead = L - g.k2;
    const double denom = g.k1 - 2.0 * lead / g.k1;
    return lead * lead * n * n * T * T / (denom * denom);
}

double chatter_bound(const Gains& g, double L, double T) {
    return 0.5 * (g.k2 + L) * T;
}

BoundSet make_bound_set(const Gains& g, double L, double T, double n_fraction) {
    BoundSet b;
    b.prop3_bound = prop3_bound(g, L, T);
    b.chatter_bound = chatter_bound(g, L, T);
    b.n_fraction = n_fraction;
    if (check_w1_bound_gain(g, L)) b.W1 = w1_tuning_bound(g, L, T, n_fraction);
    return b;
}

namespace {

// Sup-norm of x(t+T) - x(t) over the period window ending T before t_ref.
double period_residual(const Trajectory& traj, double T, double t_ref) {
    const double start = t_ref - 2.0 * T;
    double res = 0.0;
    const auto first =
        static_cast<std::size_t>(std::max(0.0, std::ceil((start - traj.t0) / traj.dt_sample)));
    for (std::size_t i = first; i < traj.samples.size(); ++i) {
        const double t = traj.t_at(i);
        if (t > t_ref - T) break;
        const State a = traj.samples[i];
        const State b = traj.at_time(t + T);
        res = std::max(res, std::max(std::fabs(b.x1 - a.x1), std::fabs(b.x2 - a.x2)));
    }
    return res;
}

struct Extrema {
    double max_val;
    double min_val;
};

// Local extrema over [t_lo, t_ref] refined through a 3-point parabola.
Extrema refined_extrema(const std::vector<double>& values, const Trajectory& traj, double t_lo) {
    const auto first =
        static_cast<std::size_t>(std::max(0.0, std::ceil((t_lo - traj.t0) / traj.dt_sample)));
    double max_val = values[first];
    double min_val = values[first];
    for (std::size_t i = first; i < values.size(); ++i) {
        double v = values[i];
        if (i > first && i + 1 < values.size()) {
            const double a = values[i - 1], b = values[i], c = values[i + 1];
            const double curv = a - 2.0 * b + c;
            const bool is_max = b >= a && b >= c && curv < 0.0;
            const bool is_min = b <= a && b <= c && curv > 0.0;
            if ((is_max || is_min) && std::fabs(curv) > 0.0) {
                const double off = 0.5 * (a - c) / curv;
                if (std::fabs(off) <= 1.0) v = b - 0.25 * (a - c) * off;
            }
        }
        max_val = std::max(max_val, v);
        min_val = std::min(min_val, v);
    }
    return {max_val, min_val};
}

}  // namespace

LimitCycleReport detect_limit_cycle(const Trajectory& traj, const Gains& g, double delta,
                                    double T, double tol) {
    if (traj.divergence)
        throw DivergenceError("detect_limit_cycle: trajectory diverged at t = " +
                              std::to_string(traj.divergence->t));
    if (!(T > 0.0)) throw ConfigError("detect_limit_cycle: period must be positive");
    const double duration = traj.t_last() - traj.t0;
    if (duration < 6.0 * T)
        throw InsufficientDataError("detect_limit_cycle: need at least 6 periods of data");

    const double t_ref = traj.t_last();

    // Cycle amplitude scale from the last period, for the relative tolerance.
    double amp = 0.0;
    {
        const auto first = static_cast<std::size_t>(
            std::max(0.0, std::ceil((t_ref - T - traj.t0) / traj.dt_sample)));
        for (std::size_t i = first; i < traj.samples.size(); ++i)
            amp = std::max(amp, std::fabs(traj.samples[i].x1));
    }
    const double threshold = tol * (1.0 + amp);

    LimitCycleReport report;
    report.period = T;
    report.return_map_residual = period_residual(traj, T, t_ref);
    report.converged = report.return_map_residual <= threshold;

    // Count consecutive converged periods scanning backwards from the end.
    const int n_windows = static_cast<int>(std::floor(duration / T)) - 1;
    int settled = 0;
    for (int j = 0; j < n_windows; ++j) {
        if (period_residual(traj, T, t_ref - j * T) <= threshold)
            ++settled;
        else
            break;
    }
    report.n_transient_periods = n_windows - settled;

    // Amplitudes over the last two periods.
    std::vector<double> x1_series(traj.samples.size());
    std::vector<double> w2_series(traj.samples.size());
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        x1_series[i] = traj.samples[i].x1;
        w2_series[i] = to_w(traj.samples[i], g, delta).w2;
    }
    const double t_lo = t_ref - 2.0 * T;
    const Extrema ex1 = refined_extrema(x1_series, traj, t_lo);
    const Extrema ew2 = refined_extrema(w2_series, traj, t_lo);
    report.w1_max = ex1.max_val;
    report.w1_min = ex1.min_val;
    report.w2_max_abs = std::max(std::fabs(ew2.max_val), std::fabs(ew2.min_val));
    return report;
}

Gains GainRule::gains_for(double L) const {
    if (!scaled) return fixed;
    const double k2 = k2_over_L * L;
    return {1.8 * std::sqrt(k2 + L), k2};
}

namespace {

SweepRow run_sweep_point(double param, double L, double T, const SpecBuilder& build_spec,
                         const SweepSettings& settings, const Gains& g) {
    SweepRow row;
    row.param = param;
    row.L = L;
    row.T = T;
    row.gains = g;
    row.bounds = make_bound_set(g, L, T, settings.n_fraction);
    row.delta = settings.delta_rel * row.bounds.prop3_bound;
    try {
        if (!(row.delta > 0.0)) throw ConfigError("sweep: nonpositive delta at grid point");
        const PerturbationSpec spec = build_spec(L, T);
        if (!spec.is_periodic())
            throw ConfigError("sweep: constant-rate specs are not admissible");
        SimConfig cfg;
        cfg.delta = row.delta;
        cfg.dt = stability_cap(g, row.delta, L, T);
        cfg.t_end = settings.periods * T;
        cfg.x0 = {0.0, 0.0};
        cfg.record_stride =
            std::max(1, static_cast<int>(std::floor(T / (cfg.dt * 4000.0))));
        row.dt = cfg.dt;
        const Trajectory traj = integrate(cfg, g, spec);
        if (traj.divergence) {
            row.diverged = true;
            row.error = "diverged at t = " + std::to_string(traj.divergence->t);
            return row;
        }
        row.report = detect_limit_cycle(traj, g, row.delta, T, settings.tol);
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

}  // namespace

std::vector<SweepRow> sweep_L(const std::vector<double>& L_grid, double T,
                              const SpecBuilder& build_spec, const SweepSettings& settings) {
    std::vector<SweepRow> rows;
    rows.reserve(L_grid.size());
    for (double L : L_grid)
        rows.push_back(run_sweep_point(L, L, T, build_spec, settings,
                                       settings.gain_rule.gains_for(L)));
    return rows;
}

std::vector<SweepRow> sweep_T(const std::vector<double>& T_grid, double L,
                              const SpecBuilder& build_spec, const SweepSettings& settings) {
    std::vector<SweepRow> rows;
    rows.reserve(T_grid.size());
    const Gains g = settings.gain_rule.gains_for(L);
    for (double T : T_grid) rows.push_back(run_sweep_point(T, L, T, build_spec, settings, g));
    return rows;
}

std::vector<SweepRow> sweep_gains(const std::vector<Gains>& gain_grid, double L, double T,
                                  const SpecBuilder& build_spec, const SweepSettings& settings) {
    std::vector<SweepRow> rows;
    rows.reserve(gain_grid.size());
    for (std::size_t i = 0; i < gain_grid.size(); ++i)
        rows.push_back(run_sweep_point(static_cast<double>(i), L, T, build_spec, settings,
                                       gain_grid[i]));
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows,
                         const std::vector<std::string>& header_comment) {
    std::ostringstream out;
    for (const auto& line : header_comment) out << "# " << line << "\n";
    out << "param,w1_max,w1_min,w2_max,prop3_bound,W1,chatter_bound,converged,residual\n";
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& row : rows) {
        const bool ok = row.report.has_value();
        out << num(row.param) << ',' << (ok ? num(row.report->w1_max) : "nan") << ','
            << (ok ? num(row.report->w1_min) : "nan") << ','
            << (ok ? num(row.report->w2_max_abs) : "nan") << ',' << num(row.bounds.prop3_bound)
            << ',' << (row.bounds.W1 ? num(*row.bounds.W1) : "") << ','
            << num(row.bounds.chatter_bound) << ','
            << (ok && row.report->converged ? "true" : "false") << ','
            << (ok ? num(row.report->return_map_residual) : "nan") << '\n';
    }
    return out.str();
}

FitSummary linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("linear_fit: need >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    FitSummary fit;
    const double denom = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double pred = fit.slope * x[i] + fit.intercept;
        ss_res += (y[i] - pred) * (y[i] - pred);
        ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

FitSummary loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw ConfigError("loglog_fit: values must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return linear_fit(lx, ly);
}

}  // namespace stsmc
