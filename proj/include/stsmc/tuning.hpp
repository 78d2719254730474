#pragma once

#include <string>

#include "stsmc/analysis.hpp"
#include "stsmc/vector_field.hpp"

namespace stsmc {

struct TuningProblem {
    double L = 0.0;               // perturbation rate bound, > 0
    double T = 0.0;               // perturbation period, > 0
    double eta = 0.0;             // target accuracy bound, > 0
    double eps = 1e-3;            // tolerance on |W1 - eta|
    double n_fraction = 0.5;      // n in (0, 1/2]
    double k1_max = 0.0;          // 0 -> default 20*sqrt(L)
    double k2_max_fraction = 0.5; // k2 <= k2_max_fraction * (1.1*L), in (0, 1)

    double k1_cap() const;
    double k2_cap() const;
};

struct ConstraintReport {
    bool eq18_mean_rate = false;   // k2 > |q_bar|
    bool eq19_k1 = false;          // k1 >= 1.8*sqrt(k2 + |q_bar|)
    bool eq27_w1_applicable = false;
    bool assumption1_under_tuned = false;  // 0 < k2 < L
    bool k1_saturation = false;
    bool k2_saturation = false;

    bool all() const {
        return eq18_mean_rate && eq19_k1 && eq27_w1_applicable &&
               assumption1_under_tuned && k1_saturation && k2_saturation;
    }
};

struct TuningResult {
    Gains gains;
    double W1 = 0.0;
    ConstraintReport constraints;
    bool feasible = false;
    bool target_unmet = false;  // saturations prevented |W1 - eta| <= eps
    std::string note;
};

ConstraintReport evaluate_constraints(const Gains& g, const TuningProblem& p,
                                      double q_bar = 0.0);

/// Coarse logarithmic grid over the feasible (k1, k2) box followed by
/// k1-bisection on |W1 - eta|. Deterministic; ties broken by smaller k2,
/// then smaller k1. Returns feasible = false when the feasible set is empty.
TuningResult tune_gains(const TuningProblem& p);

struct ValidationOutcome {
    double simulated_w1_max = 0.0;
    bool within_W1 = false;
    LimitCycleReport report;
};

/// Simulates the motor-ripple scenario (L, T from the problem) with the tuned
/// gains and checks the measured w1 amplitude against W1.
ValidationOutcome validate_tuning(const TuningResult& result, const TuningProblem& p);

std::string tuning_problem_to_json(const TuningProblem& p);
TuningProblem tuning_problem_from_json(const std::string& json_text);
std::string tuning_result_to_json(const TuningResult& r);

}  // namespace stsmc
