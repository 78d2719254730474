#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "stsmc/analysis.hpp"
#include "stsmc/errors.hpp"
#include "stsmc/scenario.hpp"

using namespace stsmc;

TEST_CASE("gain condition predicates") {
    const double L = 2.5;
    CHECK(check_finite_time_gains({4.125, 2.75}, L));        // 1.8*sqrt(5.25) = 4.1243
    CHECK_FALSE(check_finite_time_gains({1.76, 1.08}, L));   // under-tuned
    CHECK_FALSE(check_finite_time_gains({1.0, 2.75}, L));    // k1 too small

    CHECK(check_limit_cycle_gains({1.9, 1.08}, 0.0));        // 1.8*sqrt(1.08) = 1.8706
    CHECK_FALSE(check_limit_cycle_gains({1.76, 1.08}, 0.0));
    CHECK_FALSE(check_limit_cycle_gains({1.9, 1.08}, 1.1));  // k2 <= |q_bar|
    CHECK_FALSE(check_limit_cycle_gains({0.1, 1.08}, 0.0));

    CHECK(check_w1_bound_gain({4.0, 3.0}, L));               // k2 >= L
    CHECK(check_w1_bound_gain({2.01, 0.5}, L));              // sqrt(2(L-k2)) = 2
    CHECK_FALSE(check_w1_bound_gain({2.0, 0.5}, L));
    CHECK_FALSE(check_w1_bound_gain({1.99, 0.5}, L));
}

TEST_CASE("bound arithmetic against frozen values") {
    const double L = 2.5, T = 0.25;
    CHECK(prop3_bound({1.0, 2.0}, L, T) == doctest::Approx(0.03515625).epsilon(1e-15));
    CHECK(chatter_bound({1.0, 2.0}, L, T) == doctest::Approx(0.5625).epsilon(1e-15));
    CHECK(w1_tuning_bound({1.76, 1.08}, L, T, 0.5) ==
          doctest::Approx(1.4707211334439258).epsilon(1e-14));
    CHECK(w1_tuning_bound({4.12, 0.43}, L, T, 0.5) ==
          doctest::Approx(0.0068992837701672221).epsilon(1e-14));
}

TEST_CASE("w1_tuning_bound structure") {
    const double L = 2.5, T = 0.25;
    CHECK(w1_tuning_bound({1.0, 3.0}, L, T, 0.5) == 0.0);  // k2 >= L
    CHECK(w1_tuning_bound({1.0, L}, L, T, 0.5) == 0.0);
    CHECK_THROWS_AS(w1_tuning_bound({2.0, 0.5}, L, T, 0.5), BoundInapplicableError);
    CHECK_THROWS_AS(w1_tuning_bound({1.76, 1.08}, L, T, 0.0), ConfigError);
    CHECK_THROWS_AS(w1_tuning_bound({1.76, 1.08}, L, T, 0.6), ConfigError);

    // quadratic in n and in T
    const double base = w1_tuning_bound({1.76, 1.08}, L, T, 0.5);
    CHECK(w1_tuning_bound({1.76, 1.08}, L, T, 0.25) == doctest::Approx(base / 4.0));
    CHECK(w1_tuning_bound({1.76, 1.08}, L, 2.0 * T, 0.5) == doctest::Approx(4.0 * base));

    // strictly decreasing in k1 past the pole
    double prev = w1_tuning_bound({2.1, 0.5}, L, T, 0.5);
    for (double k1 = 2.2; k1 < 8.0; k1 += 0.1) {
        const double cur = w1_tuning_bound({k1, 0.5}, L, T, 0.5);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("make_bound_set") {
    const double L = 2.5, T = 0.25;
    const BoundSet bs = make_bound_set({1.76, 1.08}, L, T, 0.5);
    CHECK(bs.prop3_bound == doctest::Approx(prop3_bound({1.76, 1.08}, L, T)));
    REQUIRE(bs.W1.has_value());
    CHECK(*bs.W1 == doctest::Approx(1.4707211334439258).epsilon(1e-14));
    CHECK(bs.chatter_bound == doctest::Approx(chatter_bound({1.76, 1.08}, L, T)));

    const BoundSet na = make_bound_set({1.0, 0.5}, L, T, 0.5);
    CHECK_FALSE(na.W1.has_value());
}

TEST_CASE("detect_limit_cycle on the motor ripple") {
    const double L = 2.5, T = 0.25;
    const Gains g{1.76, 1.08};

    SUBCASE("settled cycle converges, is symmetric, shrinks with tighter tol") {
        const LimitCycleReport rep = simulate_ripple_cycle(L, T, g, 1e-4, 20.0, 1e-3);
        CHECK(rep.converged);
        CHECK(rep.period == doctest::Approx(T));
        CHECK(rep.w1_max > 0.0);
        CHECK(rep.w1_min < 0.0);
        // odd symmetry of the closed loop makes the cycle symmetric
        CHECK(rep.w1_max == doctest::Approx(-rep.w1_min).epsilon(0.05));
        CHECK(rep.w2_max_abs > 0.0);
        CHECK(rep.return_map_residual <= 1e-3 * (1.0 + rep.w1_max));
        // under-tuned amplitude stays at the 1e-4 scale seen in the motor case
        CHECK(rep.w1_max > 5e-5);
        CHECK(rep.w1_max < 5e-4);
    }
    SUBCASE("amplitude is delta-independent once delta is small") {
        const double a1 = simulate_ripple_cycle(L, T, g, 1e-4).w1_max;
        const double a2 = simulate_ripple_cycle(L, T, g, 1e-5).w1_max;
        CHECK(a1 == doctest::Approx(a2).epsilon(0.05));
    }
    SUBCASE("too little data") {
        SimConfig cfg;
        cfg.delta = 1e-4;
        cfg.dt = 0.0;
        cfg.t_end = 4.0 * T;  // below the 6-period minimum
        cfg.x0 = {0.0, 0.0};
        cfg.record_stride = 1;
        const Trajectory traj = integrate(cfg, g, normalized_ripple(L, T));
        CHECK_THROWS_AS(detect_limit_cycle(traj, g, 1e-4, T), InsufficientDataError);
    }
    SUBCASE("divergent trajectory") {
        PerturbationSpec ramp;
        ramp.constant_rate = L;
        ramp.rate_bound = L;
        SimConfig cfg;
        cfg.delta = 1.0;
        cfg.t_end = 2e6;
        cfg.x0 = {0.0, 0.0};
        cfg.record_stride = 1000;
        const Trajectory traj = integrate(cfg, {1.0, 1.25}, ramp);
        REQUIRE(traj.divergence.has_value());
        CHECK_THROWS_AS(detect_limit_cycle(traj, {1.0, 1.25}, 1.0, T), DivergenceError);
    }
}

TEST_CASE("gain rule") {
    GainRule rule;  // scaled, k2 = 0.5 L
    const Gains g = rule.gains_for(2.0);
    CHECK(g.k2 == doctest::Approx(1.0));
    CHECK(g.k1 == doctest::Approx(1.8 * std::sqrt(3.0)));

    GainRule fixed;
    fixed.scaled = false;
    fixed.fixed = {1.76, 1.08};
    CHECK(fixed.gains_for(100.0).k1 == 1.76);
    CHECK(fixed.gains_for(100.0).k2 == 1.08);
}

TEST_CASE("sweep_L amplitudes grow quadratically in L") {
    const std::vector<double> grid{1.0, 2.0, 4.0};
    SweepSettings settings;
    const auto rows = sweep_L(grid, 0.25, normalized_ripple, settings);
    REQUIRE(rows.size() == 3);
    std::vector<double> L_vals, amps;
    for (const auto& row : rows) {
        REQUIRE(row.error.empty());
        REQUIRE(row.report.has_value());
        CHECK(row.report->converged);
        CHECK(row.bounds.W1.has_value());
        CHECK(row.report->w1_max < row.bounds.prop3_bound);
        L_vals.push_back(row.L);
        amps.push_back(row.report->w1_max);
    }
    CHECK(amps[0] < amps[1]);
    CHECK(amps[1] < amps[2]);
    // scale invariance of the scaled gain rule: amplitude exactly linear in L
    const FitSummary fit = linear_fit(L_vals, amps);
    CHECK(fit.r_squared > 0.99999);
}

TEST_CASE("sweep_T slope is 2 on a log-log fit") {
    const std::vector<double> grid{0.1, 0.2, 0.4, 0.8};
    SweepSettings settings;
    const auto rows = sweep_T(grid, 2.5, normalized_ripple, settings);
    std::vector<double> T_vals, amps;
    for (const auto& row : rows) {
        REQUIRE(row.error.empty());
        REQUIRE(row.report.has_value());
        T_vals.push_back(row.T);
        amps.push_back(row.report->w1_max);
    }
    const FitSummary fit = loglog_fit(T_vals, amps);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(fit.r_squared > 0.99999);
}

TEST_CASE("sweep records per-point failures in-row") {
    SweepSettings settings;
    const SpecBuilder bad_builder = [](double L, double) {
        PerturbationSpec spec;
        spec.constant_rate = L;
        spec.rate_bound = L;
        return spec;
    };
    const auto rows = sweep_L({2.5}, 0.25, bad_builder, settings);
    REQUIRE(rows.size() == 1);
    CHECK_FALSE(rows[0].error.empty());
    CHECK_FALSE(rows[0].report.has_value());
}

TEST_CASE("sweep_to_csv") {
    SweepSettings settings;
    const auto rows = sweep_L({1.0}, 0.25, normalized_ripple, settings);
    const std::string csv = sweep_to_csv(rows, {"note"});
    CHECK(csv.rfind("# note\n", 0) == 0);
    CHECK(csv.find("param,") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // comment + header + 1 row
}

TEST_CASE("fits") {
    SUBCASE("exact line") {
        const FitSummary f = linear_fit({1.0, 2.0, 3.0, 4.0}, {3.0, 5.0, 7.0, 9.0});
        CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(f.intercept == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("power law") {
        std::vector<double> x{0.5, 1.0, 2.0, 4.0}, y;
        for (double v : x) y.push_back(3.0 * v * v);
        const FitSummary f = loglog_fit(x, y);
        CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
    }
    SUBCASE("degenerate input") {
        CHECK_THROWS_AS(linear_fit({1.0}, {2.0}), ConfigError);
        CHECK_THROWS_AS(linear_fit({1.0, 2.0}, {2.0}), ConfigError);
        CHECK_THROWS_AS(loglog_fit({-1.0, 2.0}, {1.0, 1.0}), ConfigError);
    }
}
