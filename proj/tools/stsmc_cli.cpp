#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stsmc/analysis.hpp"
#include "stsmc/errors.hpp"
#include "stsmc/integrator.hpp"
#include "stsmc/scenario.hpp"
#include "stsmc/tuning.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "stsmc 0.1.0";

struct GlobalOpts {
    std::string config_path;
    std::string out_dir = ".";
    double delta = 0.0;       // 0 -> from config / default
    double dt = 0.0;          // 0 -> stability cap
    double n_fraction = 0.5;
};

std::vector<std::string> manifest_lines(const std::string& command, const GlobalOpts& opts) {
    return {std::string("tool: ") + kToolVersion, "command: " + command,
            "config: " + (opts.config_path.empty() ? "(none)" : opts.config_path),
            "out: " + opts.out_dir};
}

json load_config(const GlobalOpts& opts) {
    if (opts.config_path.empty()) throw stsmc::ConfigError("missing --config");
    std::ifstream in(opts.config_path);
    if (!in) throw stsmc::ConfigError("cannot open config file: " + opts.config_path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw stsmc::ConfigError(std::string("invalid config JSON: ") + e.what());
    }
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path);
    if (!out) throw stsmc::ConfigError("cannot write output file: " + path.string());
    out << content;
}

json report_to_json(const stsmc::LimitCycleReport& r) {
    return {{"converged", r.converged},
            {"return_map_residual", r.return_map_residual},
            {"period", r.period},
            {"w1_max", r.w1_max},
            {"w1_min", r.w1_min},
            {"w2_max_abs", r.w2_max_abs},
            {"n_transient_periods", r.n_transient_periods}};
}

int cmd_simulate(const GlobalOpts& opts) {
    const json cfg = load_config(opts);
    if (cfg.empty()) throw stsmc::ConfigError("config is empty");

    stsmc::PerturbationSpec spec;
    double T = 0.0;
    stsmc::Gains gains;
    double J = 1.0;
    if (cfg.contains("motor")) J = cfg["motor"].value("J", 1.0);
    if (!cfg.contains("gains")) throw stsmc::ConfigError("config: missing field \"gains\"");
    gains.k1 = cfg["gains"].value("k1p", 0.0) / J;
    gains.k2 = cfg["gains"].value("k2p", 0.0) / J;
    if (!(gains.k1 > 0.0 && gains.k2 > 0.0))
        throw stsmc::ConfigError("config: gains.k1p and gains.k2p must be positive");

    double L = 0.0;
    if (cfg.contains("constant_rate")) {
        spec.constant_rate = cfg["constant_rate"].get<double>();
        spec.rate_bound = std::fabs(*spec.constant_rate);
        L = spec.rate_bound;
    } else {
        if (!cfg.contains("L")) throw stsmc::ConfigError("config: missing field \"L\"");
        if (!cfg.contains("T")) throw stsmc::ConfigError("config: missing field \"T\"");
        L = cfg["L"].get<double>();
        T = cfg["T"].get<double>();
        spec = stsmc::normalized_ripple(L, T);
    }

    stsmc::SimConfig sim;
    const json sim_cfg = cfg.value("sim", json::object());
    if (sim_cfg.contains("x0")) {
        sim.x0 = {sim_cfg["x0"][0].get<double>(), sim_cfg["x0"][1].get<double>()};
    }
    sim.delta = opts.delta > 0.0 ? opts.delta
                                 : cfg.value("delta", stsmc::default_delta(sim.x0));
    sim.dt = opts.dt > 0.0 ? opts.dt : sim_cfg.value("dt", 0.0);
    sim.t_end = sim_cfg.value("t_end", spec.is_periodic() ? 40.0 * T : 1e6);
    sim.record_stride = sim_cfg.value("record_stride", 0);
    const std::string field = sim_cfg.value("field", "regularized");
    if (field == "regularized")
        sim.field_kind = stsmc::FieldKind::Regularized;
    else if (field == "discontinuous")
        sim.field_kind = stsmc::FieldKind::Discontinuous;
    else if (field == "averaged")
        sim.field_kind = stsmc::FieldKind::Averaged;
    else
        throw stsmc::ConfigError("config: sim.field must be regularized|discontinuous|averaged");

    const double dt_used =
        sim.dt > 0.0 ? sim.dt
                     : stsmc::stability_cap(gains, sim.delta, L,
                                            spec.is_periodic() ? std::optional<double>(T)
                                                               : std::nullopt);
    if (sim.record_stride <= 0) {
        const double span = spec.is_periodic() ? T : sim.t_end / 40.0;
        sim.record_stride = std::max(1, static_cast<int>(std::floor(span / (dt_used * 4000.0))));
    }

    const stsmc::Trajectory traj = stsmc::integrate(sim, gains, spec);
    const auto manifest = manifest_lines("simulate", opts);
    write_file(fs::path(opts.out_dir) / "trajectory.csv",
               stsmc::trajectory_to_csv(traj, gains, sim.delta, manifest));

    json out;
    out["schema_version"] = 1;
    out["tool"] = kToolVersion;
    if (traj.divergence) {
        out["diverged"] = true;
        out["divergence_time"] = traj.divergence->t;
        out["divergence_state"] = {traj.divergence->state.x1, traj.divergence->state.x2};
        write_file(fs::path(opts.out_dir) / "report.json", out.dump(2) + "\n");
        std::cout << out.dump(2) << "\n";
        return 2;
    }
    out["diverged"] = false;
    if (spec.is_periodic()) {
        const auto report = stsmc::detect_limit_cycle(traj, gains, sim.delta, T);
        out["limit_cycle"] = report_to_json(report);
        out["bounds"] = {{"prop3_bound", stsmc::prop3_bound(gains, L, T)},
                         {"chatter_bound", stsmc::chatter_bound(gains, L, T)}};
        if (stsmc::check_w1_bound_gain(gains, L) && gains.k2 < L)
            out["bounds"]["W1"] = stsmc::w1_tuning_bound(gains, L, T, opts.n_fraction);
    }
    write_file(fs::path(opts.out_dir) / "report.json", out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const GlobalOpts& opts) {
    const json cfg = load_config(opts);
    if (!cfg.contains("sweep")) throw stsmc::ConfigError("config: missing field \"sweep\"");
    const json sc = cfg["sweep"];
    const std::string vary = sc.value("vary", "");
    const std::vector<double> values = sc.value("values", std::vector<double>{});
    if (values.empty()) throw stsmc::ConfigError("config: sweep.values must be non-empty");

    stsmc::SweepSettings settings;
    settings.n_fraction = opts.n_fraction;
    settings.delta_rel = sc.value("delta_rel", 1e-3);
    settings.periods = sc.value("periods", 20.0);
    settings.tol = sc.value("tol", 1e-3);
    if (sc.contains("gain_rule")) {
        const json gr = sc["gain_rule"];
        if (gr.contains("k1") && gr.contains("k2")) {
            settings.gain_rule.scaled = false;
            settings.gain_rule.fixed = {gr["k1"].get<double>(), gr["k2"].get<double>()};
        } else {
            settings.gain_rule.k2_over_L = gr.value("k2_over_L", 0.5);
        }
    }

    const auto build = [](double L, double T) { return stsmc::normalized_ripple(L, T); };
    std::vector<stsmc::SweepRow> rows;
    json fit;
    if (vary == "L") {
        if (!sc.contains("T")) throw stsmc::ConfigError("config: sweep.T required for L sweep");
        rows = stsmc::sweep_L(values, sc["T"].get<double>(), build, settings);
    } else if (vary == "T") {
        if (!sc.contains("L")) throw stsmc::ConfigError("config: sweep.L required for T sweep");
        rows = stsmc::sweep_T(values, sc["L"].get<double>(), build, settings);
    } else {
        throw stsmc::ConfigError("config: sweep.vary must be \"L\" or \"T\"");
    }

    std::vector<double> xs, ys;
    for (const auto& row : rows) {
        if (row.report && row.report->converged) {
            xs.push_back(row.param);
            ys.push_back(row.report->w1_max);
        }
    }
    if (xs.size() >= 2) {
        const stsmc::FitSummary f =
            vary == "L" ? stsmc::linear_fit(xs, ys) : stsmc::loglog_fit(xs, ys);
        fit = {{"kind", vary == "L" ? "linear" : "loglog"},
               {"slope", f.slope},
               {"intercept", f.intercept},
               {"r_squared", f.r_squared}};
    }

    const auto manifest = manifest_lines("sweep", opts);
    write_file(fs::path(opts.out_dir) / "sweep.csv", stsmc::sweep_to_csv(rows, manifest));
    json out;
    out["schema_version"] = 1;
    out["tool"] = kToolVersion;
    out["n_rows"] = rows.size();
    if (!fit.is_null()) out["fit"] = fit;
    write_file(fs::path(opts.out_dir) / "fit.json", out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_tune(const GlobalOpts& opts) {
    const json cfg = load_config(opts);
    stsmc::TuningProblem problem = stsmc::tuning_problem_from_json(cfg.dump());
    if (opts.n_fraction != 0.5) problem.n_fraction = opts.n_fraction;
    const stsmc::TuningResult result = stsmc::tune_gains(problem);
    json out = json::parse(stsmc::tuning_result_to_json(result));
    if (result.feasible && cfg.value("validate", false)) {
        const stsmc::ValidationOutcome v = stsmc::validate_tuning(result, problem);
        out["validation"] = {{"simulated_w1_max", v.simulated_w1_max},
                             {"within_W1", v.within_W1}};
    }
    write_file(fs::path(opts.out_dir) / "tune_result.json", out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_table1(const GlobalOpts& opts) {
    const auto rows = stsmc::reproduce_table1(opts.n_fraction);
    const auto manifest = manifest_lines("table1", opts);
    const std::string csv = stsmc::table1_to_csv(rows, manifest);
    write_file(fs::path(opts.out_dir) / "table1.csv", csv);
    std::cout << csv;
    return 0;
}

int cmd_check_gains(const GlobalOpts& opts, double k1, double k2, double L, double T) {
    const stsmc::Gains g{k1, k2};
    json out;
    out["schema_version"] = 1;
    out["tool"] = kToolVersion;
    out["gains"] = {{"k1", k1}, {"k2", k2}};
    out["L"] = L;
    out["T"] = T;
    out["finite_time"] = stsmc::check_finite_time_gains(g, L);
    out["limit_cycle"] = stsmc::check_limit_cycle_gains(g, 0.0);
    out["under_tuned"] = k2 > 0.0 && k2 < L;
    out["w1_bound_applicable"] = stsmc::check_w1_bound_gain(g, L);
    out["prop3_bound"] = stsmc::prop3_bound(g, L, T);
    out["chatter_bound"] = stsmc::chatter_bound(g, L, T);
    if (stsmc::check_w1_bound_gain(g, L) && k2 < L)
        out["W1"] = stsmc::w1_tuning_bound(g, L, T, opts.n_fraction);

    std::cout << out.dump(2) << "\n";
    std::cout << "finite-time regime: " << (out["finite_time"].get<bool>() ? "yes" : "no")
              << ", under-tuned: " << (out["under_tuned"].get<bool>() ? "yes" : "no")
              << ", limit-cycle conditions: "
              << (out["limit_cycle"].get<bool>() ? "yes" : "no") << "\n";
    write_file(fs::path(opts.out_dir) / "gain_check.json", out.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Super-twisting closed-loop simulation, limit-cycle analysis and gain tuning"};
    app.require_subcommand(1);

    GlobalOpts opts;
    app.add_option("--config", opts.config_path, "Path to a JSON config file");
    app.add_option("--out", opts.out_dir, "Output directory");
    app.add_option("--delta", opts.delta, "Regularisation width override");
    app.add_option("--dt", opts.dt, "Integration step override");
    app.add_option("--n-fraction", opts.n_fraction, "Time-fraction parameter n in (0, 1/2]");

    auto* sim = app.add_subcommand("simulate", "Integrate a scenario and analyse the limit cycle");
    auto* sweep = app.add_subcommand("sweep", "Run an L or T parameter sweep");
    auto* tune = app.add_subcommand("tune", "Search gains for a prescribed accuracy target");
    auto* table1 = app.add_subcommand("table1", "Reproduce the four benchmark tuning cases");
    auto* check = app.add_subcommand("check-gains", "Evaluate gain conditions and bounds");
    double k1 = 0.0, k2 = 0.0, L = 0.0, T = 1.0;
    check->add_option("--k1", k1, "Gain k1")->required();
    check->add_option("--k2", k2, "Gain k2")->required();
    check->add_option("--L", L, "Perturbation rate bound")->required();
    check->add_option("--T", T, "Perturbation period");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(opts);
        if (sweep->parsed()) return cmd_sweep(opts);
        if (tune->parsed()) return cmd_tune(opts);
        if (table1->parsed()) return cmd_table1(opts);
        if (check->parsed()) return cmd_check_gains(opts, k1, k2, L, T);
    } catch (const stsmc::DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
