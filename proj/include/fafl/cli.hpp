#pragma once

// Command-line front end. Exit codes: 0 success, 2 invalid input or
// configuration, 3 numerical failure, 4 Monte Carlo failure cap exceeded.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "fafl/dgp.hpp"
#include "fafl/estimator.hpp"
#include "fafl/json_io.hpp"
#include "fafl/montecarlo.hpp"
#include "fafl/panel_csv.hpp"
#include "fafl/report.hpp"

namespace fafl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitFailureCap = 4;

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
}

struct EstimateOptions {
    std::string input;
    std::string estimator = "fafl";
    double level = 0.95;
    std::string output;
    bool diagnostics = false;
};

inline Json diagnostics_json(const PanelData& data) {
    const Index bound = search_bound(data.n(), data.t());
    return {{"y_u", to_json(spectrum_diagnostics(build_yu(data), bound))},
            {"y_v", to_json(spectrum_diagnostics(build_yv(data), bound))}};
}

/// Fits the requested estimator; shared by the CLI and the round-trip tests.
inline EstimationResult estimate_panel(const PanelData& data, EstimatorKind kind, double level) {
    switch (kind) {
        case EstimatorKind::ls: return fit_ls(data);
        case EstimatorKind::fa: return fit_fa(data, level);
        case EstimatorKind::fafl_pca: return fit_fafl(data, estimate_projectors(data), level);
        case EstimatorKind::fafl_oracle: break;
    }
    throw InvalidArgument("estimator 'fafl_oracle' needs the true factor structure and is simulation-only");
}

inline int cmd_estimate(const EstimateOptions& opt, std::ostream& out, std::ostream& err) {
    std::optional<PanelCsv> panel;
    try {
        std::ifstream in(opt.input);
        if (!in) throw ParseError("cannot open '" + opt.input + "'");
        panel = read_panel_csv(in);
        const EstimatorKind kind = parse_estimator_kind(opt.estimator);
        if (kind == EstimatorKind::fafl_oracle) throw InvalidArgument("estimator must be fafl, fa or ls");
        if (!(opt.level > 0.0 && opt.level < 1.0)) throw InvalidArgument("--level must lie in (0, 1)");

        Json j = to_json(estimate_panel(panel->data, kind, opt.level));
        j["n"] = panel->data.n();
        j["t"] = panel->data.t();
        j["regressors"] = panel->regressor_names;
        if (opt.diagnostics) j["diagnostics"] = diagnostics_json(panel->data);
        const std::string text = j.dump(2) + "\n";
        if (opt.output.empty()) {
            out << text;
        } else {
            std::ofstream file(opt.output);
            if (!file) throw ParseError("cannot write '" + opt.output + "'");
            file << text;
        }
        return kExitOk;
    } catch (const SingularSystemError& e) {
        err << "error: " << e.what() << '\n';
        if (panel) {
            try {
                err << diagnostics_json(panel->data).dump(2) << '\n';
            } catch (const Error&) {
            }
        }
        return kExitNumerical;
    } catch (const DecompositionError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
}

struct SimulateOptions {
    std::string config;
    std::optional<Index> reps;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::string format = "ascii";
    bool timing = false;
};

inline int run_and_render(const McConfig& config, const std::string& format_name, bool timing, std::ostream& out,
                          std::ostream& err) {
    try {
        const TableFormat format = parse_table_format(format_name);
        const MonteCarloReport report = run_mc(config);
        out << render_table(report, format);
        for (const auto& f : report.failed)
            err << "warning: replication " << f.index << " (seed " << f.seed << ") failed: " << f.reason << '\n';
        if (timing) err << "wall time: " << report.wall_time_seconds << " s\n";
        return kExitOk;
    } catch (const FailureCapExceeded& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailureCap;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
}

inline int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
    McConfig config;
    try {
        config = mc_config_from_json(read_json_file(opt.config));
        if (opt.reps) config.reps = *opt.reps;
        if (opt.seed) config.dgp.seed = *opt.seed;
        if (opt.workers) config.workers = *opt.workers;
        config.validate();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return run_and_render(config, opt.format, opt.timing, out, err);
}

struct TableOptions {
    std::string preset = "n50";
    std::optional<Index> reps;
    std::uint64_t seed = 1;
    std::optional<unsigned> workers;
    std::string format = "ascii";
    bool timing = false;
};

/// Presets mirroring the two simulation tables: N = T = 50 and N = T = 150.
inline McConfig table_preset(const std::string& name) {
    McConfig config;
    if (name == "n50") {
        config.dgp = benchmark_spec(50, 50, 1);
        config.reps = 1000;
    } else if (name == "n150") {
        config.dgp = benchmark_spec(150, 150, 1);
        config.reps = 500;
    } else {
        throw InvalidArgument("unknown preset '" + name + "' (expected n50 or n150)");
    }
    config.estimators = {EstimatorKind::ls, EstimatorKind::fa, EstimatorKind::fafl_pca};
    return config;
}

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

inline int cmd_table(const TableOptions& opt, std::ostream& out, std::ostream& err) {
    McConfig config;
    try {
        config = table_preset(opt.preset);
        if (opt.reps) config.reps = *opt.reps;
        config.dgp.seed = opt.seed;
        config.workers = opt.workers.value_or(default_workers());
        config.validate();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return run_and_render(config, opt.format, opt.timing, out, err);
}

struct ExportOptions {
    std::string config;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::string output;
    std::string truth;
};

/// Writes one simulated panel as CSV plus an optional truth sidecar.
inline int cmd_export(const ExportOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        DgpSpec spec;
        if (!opt.config.empty()) {
            const Json j = read_json_file(opt.config);
            spec = dgp_spec_from_json(j.contains("dgp") ? j.at("dgp") : j);
        } else {
            spec = table_preset(opt.preset.empty() ? "n50" : opt.preset).dgp;
        }
        if (opt.seed) spec.seed = *opt.seed;
        const SimulatedPanel sim = simulate(spec);
        if (opt.output.empty()) {
            write_panel_csv(out, sim.data);
        } else {
            std::ofstream file(opt.output);
            if (!file) throw ParseError("cannot write '" + opt.output + "'");
            write_panel_csv(file, sim.data);
        }
        if (!opt.truth.empty()) {
            std::ofstream file(opt.truth);
            if (!file) throw ParseError("cannot write '" + opt.truth + "'");
            file << truth_json(sim, spec).dump(2) << '\n';
        }
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Two-step factor and factor-loading augmented panel regression"};
    app.require_subcommand(1);

    EstimateOptions est;
    auto* estimate = app.add_subcommand("estimate", "Estimate beta on a long-format panel CSV");
    estimate->add_option("--input", est.input, "Panel CSV (unit,time,y,x1,...)")->required();
    estimate->add_option("--estimator", est.estimator, "fafl, fa or ls")->check(CLI::IsMember({"fafl", "fafl_pca", "fa", "ls"}));
    estimate->add_option("--level", est.level, "Confidence level");
    estimate->add_option("--output", est.output, "Write the result JSON here instead of stdout");
    estimate->add_flag("--diagnostics", est.diagnostics, "Include spectrum diagnostics of Y_u and Y_v");

    SimulateOptions sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Run a Monte Carlo experiment from a JSON config");
    simulate_cmd->add_option("--config", sim.config, "McConfig JSON")->required();
    simulate_cmd->add_option("--reps", sim.reps, "Number of replications");
    simulate_cmd->add_option("--seed", sim.seed, "Base seed");
    simulate_cmd->add_option("--workers", sim.workers, "Worker threads");
    simulate_cmd->add_option("--format", sim.format, "ascii, csv or json")->check(CLI::IsMember({"ascii", "csv", "json"}));
    simulate_cmd->add_flag("--timing", sim.timing, "Report wall time on stderr");

    TableOptions tab;
    auto* table = app.add_subcommand("table", "Replicate a simulation table");
    table->add_option("--preset", tab.preset, "n50 (N=T=50) or n150 (N=T=150)");
    table->add_option("--reps", tab.reps, "Number of replications (default 1000 / 500)");
    table->add_option("--seed", tab.seed, "Base seed");
    table->add_option("--workers", tab.workers, "Worker threads");
    table->add_option("--format", tab.format, "ascii, csv or json")->check(CLI::IsMember({"ascii", "csv", "json"}));
    table->add_flag("--timing", tab.timing, "Report wall time on stderr");

    ExportOptions exp;
    auto* export_cmd = app.add_subcommand("export", "Write one simulated panel as CSV");
    export_cmd->add_option("--config", exp.config, "DgpSpec or McConfig JSON");
    export_cmd->add_option("--preset", exp.preset, "n50 or n150 design");
    export_cmd->add_option("--seed", exp.seed, "Seed");
    export_cmd->add_option("--output", exp.output, "CSV path (default stdout)");
    export_cmd->add_option("--truth", exp.truth, "Truth sidecar JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    if (*estimate) return cmd_estimate(est, out, err);
    if (*simulate_cmd) return cmd_simulate(sim, out, err);
    if (*table) return cmd_table(tab, out, err);
    if (*export_cmd) return cmd_export(exp, out, err);
    return kExitInput;
}

}  // namespace fafl::cli
