#pragma once

#include <optional>
#include <string>
#include <vector>

namespace stsmc {

struct HarmonicTerm {
    double amp = 0.0;    // a_i
    double omega = 0.0;  // rad/s, nonzero integer multiple of 2*pi/period
    double phase = 0.0;  // rad
};

/// T-periodic perturbation d(t) = sum a_i cos(omega_i t + phi_i) with rate
/// q(t) = d'(t) and a declared rate bound |q| <= L.
///
/// A constant-rate override (q == c, d = c*t) is supported for the divergence
/// experiment; it is flagged non-periodic and rejected by limit-cycle analysis.
struct PerturbationSpec {
    std::vector<HarmonicTerm> terms;
    double period = 1.0;      // T > 0
    double rate_bound = 0.0;  // L >= 0
    std::optional<double> constant_rate;  // override: q == value, d = value*t

    bool is_periodic() const { return !constant_rate.has_value(); }
};

struct RateBoundCheck {
    double max_abs_q = 0.0;
    bool ok = false;
};

/// Throws ConfigError unless every omega_i is a nonzero integer multiple of
/// 2*pi/period, period > 0 and rate_bound >= 0.
void validate_spec(const PerturbationSpec& spec);

double eval_d(const PerturbationSpec& spec, double t);
double eval_q(const PerturbationSpec& spec, double t);

/// (1/T) * integral of q over one period, computed analytically as
/// (d(T) - d(0)) / T. Zero (to rounding) for any valid periodic spec; equals
/// the constant for a constant-rate override.
double mean_rate(const PerturbationSpec& spec);

/// Samples |q| on a uniform grid over one period (n_samples >= 1000) and
/// refines the grid maximum by golden-section search.
RateBoundCheck verify_rate_bound(const PerturbationSpec& spec, int n_samples);

/// JSON: {"terms":[{"amp":..,"omega":..,"phase":..}],"period":..,"rate_bound":..}
/// plus optional "constant_rate". Throws ConfigError on malformed input.
PerturbationSpec spec_from_json(const std::string& json_text);
std::string spec_to_json(const PerturbationSpec& spec);

}  // namespace stsmc
