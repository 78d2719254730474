#include "stsmc/perturbation.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "stsmc/errors.hpp"

namespace stsmc {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void validate_spec(const PerturbationSpec& spec) {
    if (spec.constant_rate.has_value()) {
        if (!spec.terms.empty())
            throw ConfigError("constant-rate override cannot carry harmonic terms");
        return;
    }
    if (!(spec.period > 0.0)) throw ConfigError("period must be positive");
    if (!(spec.rate_bound >= 0.0)) throw ConfigError("rate_bound must be non-negative");
    const double base = kTwoPi / spec.period;
    for (const auto& term : spec.terms) {
        const double ratio = term.omega / base;
        const double nearest = std::round(ratio);
        if (nearest == 0.0 || std::fabs(ratio - nearest) > 1e-9 * std::max(1.0, std::fabs(nearest)))
            throw ConfigError("omega must be a nonzero integer multiple of 2*pi/period");
    }
}

double eval_d(const PerturbationSpec& spec, double t) {
    if (spec.constant_rate) return *spec.constant_rate * t;
    double d = 0.0;
    for (const auto& term : spec.terms) d += term.amp * std::cos(term.omega * t + term.phase);
    return d;
}

double eval_q(const PerturbationSpec& spec, double t) {
    if (spec.constant_rate) return *spec.constant_rate;
    double q = 0.0;
    for (const auto& term : spec.terms)
        q -= term.amp * term.omega * std::sin(term.omega * t + term.phase);
    return q;
}

double mean_rate(const PerturbationSpec& spec) {
    if (spec.constant_rate) return *spec.constant_rate;
    return (eval_d(spec, spec.period) - eval_d(spec, 0.0)) / spec.period;
}

namespace {

// Golden-section maximisation of |q| on [a, b].
double refine_max_abs_q(const PerturbationSpec& spec, double a, double b) {
    constexpr double inv_phi = 0.6180339887498949;
    double c = b - (b - a) * inv_phi;
    double d = a + (b - a) * inv_phi;
    double fc = std::fabs(eval_q(spec, c));
    double fd = std::fabs(eval_q(spec, d));
    for (int i = 0; i < 80; ++i) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = std::fabs(eval_q(spec, c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = std::fabs(eval_q(spec, d));
        }
    }
    return std::max(fc, fd);
}

}  // namespace

RateBoundCheck verify_rate_bound(const PerturbationSpec& spec, int n_samples) {
    if (n_samples < 1000) throw ConfigError("verify_rate_bound: n_samples must be >= 1000");
    if (spec.constant_rate) {
        const double m = std::fabs(*spec.constant_rate);
        return {m, m <= spec.rate_bound};
    }
    const double T = spec.period;
    const double h = T / n_samples;
    double best = 0.0;
    int best_i = 0;
    for (int i = 0; i <= n_samples; ++i) {
        const double v = std::fabs(eval_q(spec, i * h));
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    const double a = (best_i - 1) * h;
    const double b = (best_i + 1) * h;
    const double refined = std::max(best, refine_max_abs_q(spec, a, b));
    return {refined, refined <= spec.rate_bound};
}

PerturbationSpec spec_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("perturbation spec: invalid JSON: ") + e.what());
    }
    PerturbationSpec spec;
    try {
        if (j.contains("constant_rate")) {
            spec.constant_rate = j.at("constant_rate").get<double>();
            spec.rate_bound = j.value("rate_bound", std::fabs(*spec.constant_rate));
            return spec;
        }
        spec.period = j.at("period").get<double>();
        spec.rate_bound = j.at("rate_bound").get<double>();
        for (const auto& jt : j.at("terms")) {
            spec.terms.push_back({jt.at("amp").get<double>(), jt.at("omega").get<double>(),
                                  jt.value("phase", 0.0)});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("perturbation spec: missing field: ") + e.what());
    }
    validate_spec(spec);
    return spec;
}

std::string spec_to_json(const PerturbationSpec& spec) {
    nlohmann::json j;
    if (spec.constant_rate) {
        j["constant_rate"] = *spec.constant_rate;
        j["rate_bound"] = spec.rate_bound;
        return j.dump(2);
    }
    j["period"] = spec.period;
    j["rate_bound"] = spec.rate_bound;
    j["terms"] = nlohmann::json::array();
    for (const auto& term : spec.terms)
        j["terms"].push_back({{"amp", term.amp}, {"omega", term.omega}, {"phase", term.phase}});
    return j.dump(2);
}

}  // namespace stsmc
