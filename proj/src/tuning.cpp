#include "stsmc/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "stsmc/errors.hpp"
#include "stsmc/scenario.hpp"

namespace stsmc {

double TuningProblem::k1_cap() const { return k1_max > 0.0 ? k1_max : 20.0 * std::sqrt(L); }

double TuningProblem::k2_cap() const {
    return std::min(k2_max_fraction * 1.1 * L, L * (1.0 - 1e-12));
}

namespace {

void validate_problem(const TuningProblem& p) {
    if (!(p.L > 0.0)) throw ConfigError("tuning: L must be positive");
    if (!(p.T > 0.0)) throw ConfigError("tuning: T must be positive");
    if (!(p.eta > 0.0)) throw ConfigError("tuning: eta must be positive");
    if (!(p.eps > 0.0)) throw ConfigError("tuning: eps must be positive");
    if (!(p.n_fraction > 0.0 && p.n_fraction <= 0.5))
        throw ConfigError("tuning: n_fraction must be in (0, 1/2]");
    if (!(p.k2_max_fraction > 0.0 && p.k2_max_fraction < 1.0))
        throw ConfigError("tuning: k2_max_fraction must be in (0, 1)");
}

// Smallest admissible k1 for a given k2: conditions (19) and (27).
double k1_floor(double k2, double L) {
    double lo = 1.8 * std::sqrt(k2);
    if (k2 < L) lo = std::max(lo, std::sqrt(2.0 * (L - k2)) * (1.0 + 1e-9));
    return lo;
}

double w1_at(const Gains& g, const TuningProblem& p) {
    return w1_tuning_bound(g, p.L, p.T, p.n_fraction);
}

}  // namespace

ConstraintReport evaluate_constraints(const Gains& g, const TuningProblem& p, double q_bar) {
    ConstraintReport r;
    const double a = std::fabs(q_bar);
    r.eq18_mean_rate = g.k2 > a;
    r.eq19_k1 = g.k1 >= 1.8 * std::sqrt(g.k2 + a);
    r.eq27_w1_applicable = check_w1_bound_gain(g, p.L);
    r.assumption1_under_tuned = g.k2 > 0.0 && g.k2 < p.L;
    r.k1_saturation = g.k1 <= p.k1_cap();
    r.k2_saturation = g.k2 <= p.k2_cap();
    return r;
}

TuningResult tune_gains(const TuningProblem& p) {
    validate_problem(p);
    TuningResult result;

    const double k2_cap = p.k2_cap();
    const double k1_cap = p.k1_cap();
    const double k2_lo = k2_cap * 1e-4;

    // Coarse logarithmic grid over the feasible box.
    constexpr int kGrid = 60;
    double best_score = std::numeric_limits<double>::infinity();
    Gains best;
    bool found = false;
    for (int i = 0; i < kGrid; ++i) {
        const double k2 =
            k2_lo * std::pow(k2_cap / k2_lo, static_cast<double>(i) / (kGrid - 1));
        const double lo = k1_floor(k2, p.L);
        if (lo > k1_cap) continue;
        for (int j = 0; j < kGrid; ++j) {
            const double k1 = lo * std::pow(k1_cap / lo, static_cast<double>(j) / (kGrid - 1));
            const Gains g{k1, k2};
            if (!evaluate_constraints(g, p).all()) continue;
            const double score = std::fabs(w1_at(g, p) - p.eta);
            const bool better =
                score < best_score ||
                (score == best_score && (k2 < best.k2 || (k2 == best.k2 && k1 < best.k1)));
            if (better) {
                best_score = score;
                best = g;
                found = true;
            }
        }
    }
    if (!found) {
        result.feasible = false;
        result.note = "empty feasible set";
        return result;
    }

    // W1 is strictly decreasing in k1 on the admissible range, so bisect k1
    // towards W1 = eta at the selected k2; then, if still clamped, bisect k2.
    auto bisect_k1 = [&](double k2) {
        const double lo = k1_floor(k2, p.L);
        double a = lo, b = k1_cap;
        if (w1_at({a, k2}, p) <= p.eta) return a;  // bound already below target
        if (w1_at({b, k2}, p) >= p.eta) return b;  // saturation binding
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            (w1_at({mid, k2}, p) > p.eta ? a : b) = mid;
        }
        return 0.5 * (a + b);
    };

    double k2 = best.k2;
    double k1 = bisect_k1(k2);
    if (std::fabs(w1_at({k1, k2}, p) - p.eta) > p.eps) {
        // Larger k2 lowers W1 (smaller L - k2); bisect k2 at the clamped k1.
        double a = k2, b = k2_cap;
        if (w1_at({std::max(k1, k1_floor(b, p.L)), b}, p) <= p.eta) {
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (a + b);
                const double k1m = std::max(k1, k1_floor(mid, p.L));
                (w1_at({k1m, mid}, p) > p.eta ? a : b) = mid;
            }
            k2 = 0.5 * (a + b);
            k1 = std::max(k1, k1_floor(k2, p.L));
            k1 = bisect_k1(k2);
        }
    }

    result.gains = {k1, k2};
    result.W1 = w1_at(result.gains, p);
    result.constraints = evaluate_constraints(result.gains, p);
    result.feasible = result.constraints.all();
    result.target_unmet = std::fabs(result.W1 - p.eta) > p.eps;
    if (result.target_unmet)
        result.note = "target_unmet: saturation constraints prevent |W1 - eta| <= eps";
    return result;
}

ValidationOutcome validate_tuning(const TuningResult& result, const TuningProblem& p) {
    if (!result.feasible) throw ConfigError("validate_tuning: result is not feasible");
    ValidationOutcome out;
    const double amp_scale = std::min(result.W1, prop3_bound(result.gains, p.L, p.T));
    const double delta = std::max(1e-12, 1e-3 * amp_scale);
    out.report = simulate_ripple_cycle(p.L, p.T, result.gains, delta);
    out.simulated_w1_max = std::max(out.report.w1_max, -out.report.w1_min);
    out.within_W1 = out.simulated_w1_max <= result.W1;
    return out;
}

std::string tuning_problem_to_json(const TuningProblem& p) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["L"] = p.L;
    j["T"] = p.T;
    j["eta"] = p.eta;
    j["eps"] = p.eps;
    j["n_fraction"] = p.n_fraction;
    j["k1_max"] = p.k1_cap();
    j["k2_max_fraction"] = p.k2_max_fraction;
    return j.dump(2);
}

TuningProblem tuning_problem_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("tuning problem: invalid JSON: ") + e.what());
    }
    TuningProblem p;
    try {
        p.L = j.at("L").get<double>();
        p.T = j.at("T").get<double>();
        p.eta = j.at("eta").get<double>();
        p.eps = j.value("eps", 1e-3);
        p.n_fraction = j.value("n_fraction", 0.5);
        p.k1_max = j.value("k1_max", 0.0);
        p.k2_max_fraction = j.value("k2_max_fraction", 0.5);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("tuning problem: missing field: ") + e.what());
    }
    validate_problem(p);
    return p;
}

std::string tuning_result_to_json(const TuningResult& r) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["feasible"] = r.feasible;
    j["target_unmet"] = r.target_unmet;
    j["gains"] = {{"k1", r.gains.k1}, {"k2", r.gains.k2}};
    j["W1"] = r.W1;
    j["constraints"] = {{"eq18_mean_rate", r.constraints.eq18_mean_rate},
                        {"eq19_k1", r.constraints.eq19_k1},
                        {"eq27_w1_applicable", r.constraints.eq27_w1_applicable},
                        {"assumption1_under_tuned", r.constraints.assumption1_under_tuned},
                        {"k1_saturation", r.constraints.k1_saturation},
                        {"k2_saturation", r.constraints.k2_saturation}};
    if (!r.note.empty()) j["note"] = r.note;
    return j.dump(2);
}

}  // namespace stsmc
