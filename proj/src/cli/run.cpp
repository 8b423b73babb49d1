#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "lpplab/cli.hpp"

namespace lpplab::cli {

ExperimentResult run_experiment(const RunConfig& c) {
    const ModelParams p(c.q, c.c);
    const auto count = [](std::int64_t v) { return static_cast<std::size_t>(v); };
    const std::string& e = c.experiment;
    if (e == "shape") return run_shape(p, c.xi, c.n, count(c.reps), c.seed, c.tol);
    if (e == "invariance") return run_invariance(p, c.s, c.steps, count(c.N), c.seed, c.tol, int(c.K));
    if (e == "recentered") return run_recentered(p, c.n, count(c.N), int(c.K), c.seed, c.tol);
    if (e == "onef1s") return run_1f1s(p, c.theta, c.n, count(c.N), int(c.K), c.seed, c.tol);
    if (e == "slope") return run_slope_conservation(p, c.theta, c.rows, c.window, c.seed, c.tol);
    if (e == "gibbs") {
        GibbsValidationSizes sizes;
        sizes.finite_chain_samples = count(c.reps);
        sizes.limit_chain_samples = count(c.N);
        return run_gibbs_validation(c.q, c.c, c.seed, c.tol, sizes);
    }
    if (e == "pinning") return run_pinning(p, c.n, count(c.reps), c.seed, c.tol);
    if (e == "direction") return run_direction(p, c.xi, c.n, count(c.reps), c.seed, c.tol);
    throw ConfigError("unknown experiment '" + e + "'");
}

namespace {

const std::vector<std::string> kValueKeys{"q", "c", "s", "theta", "xi", "n", "reps", "N", "K",
                                          "steps", "rows", "window", "seed", "out"};

struct ExperimentCommand {
    CLI::App* app = nullptr;
    std::map<std::string, std::string> values;
    std::string config;
    std::vector<std::string> tol;
    bool timing = false;
};

void print_summary(const ExperimentResult& r, const std::string& out) {
    std::cout << r.report.name << ": " << (r.report.pass() ? "PASS" : "FAIL") << '\n';
    for (const auto& c : r.report.checks)
        std::cout << "  " << c.name << " = " << format_number(c.estimate) << "  [" << rule_name(c.rule)
                  << (c.rule == CheckRule::info ? "" : (c.pass() ? ", ok" : ", FAILED")) << "]\n";
    std::cout << "  runtime_s = " << format_number(r.report.runtime_s) << '\n';
    const std::filesystem::path dir(out);
    std::cout << "  wrote " << (dir / (r.report.name + ".json")).string() << " and "
              << (dir / (r.report.name + ".csv")).string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Half-space geometric last-passage percolation lab"};
    app.require_subcommand(1);

    std::vector<std::unique_ptr<ExperimentCommand>> commands;
    for (const auto& name : experiment_names()) {
        auto cmd = std::make_unique<ExperimentCommand>();
        cmd->app = app.add_subcommand(name, "run the " + name + " experiment");
        for (const auto& key : kValueKeys) cmd->app->add_option("--" + key, cmd->values[key]);
        cmd->app->add_option("--config", cmd->config, "flat key = value file; flags override it");
        cmd->app->add_option("--tol", cmd->tol, "tolerance override name=value (repeatable)");
        cmd->app->add_flag("--timing", cmd->timing, "record wall time in the JSON report");
        commands.push_back(std::move(cmd));
    }
    auto* plot = app.add_subcommand("plot", "render an SVG from an experiment CSV or shape JSON reports");
    std::vector<std::string> plot_inputs;
    std::string plot_out = ".", plot_name = "plot";
    plot->add_option("inputs", plot_inputs, "CSV file or JSON reports");
    plot->add_option("--out", plot_out, "output directory");
    plot->add_option("--name", plot_name, "output file stem");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (plot->parsed()) {
            const std::string svg = render_svg(plot_from_files(plot_inputs));
            std::filesystem::create_directories(plot_out);
            const auto path = std::filesystem::path(plot_out) / (plot_name + ".svg");
            std::ofstream(path, std::ios::binary) << svg;
            std::cout << "wrote " << path.string() << '\n';
            return 0;
        }
        for (const auto& cmd : commands) {
            if (!cmd->app->parsed()) continue;
            KeyValues flags;
            for (const auto& key : kValueKeys)
                if (cmd->app->count("--" + key) > 0) flags[key] = cmd->values[key];
            for (const auto& t : cmd->tol) {
                const auto eq = t.find('=');
                if (eq == std::string::npos) throw ConfigError("--tol expects name=value, got " + t);
                flags["tol_" + t.substr(0, eq)] = t.substr(eq + 1);
            }
            if (cmd->timing) flags["timing"] = "true";
            const std::optional<std::string> file =
                cmd->app->count("--config") > 0 ? std::optional<std::string>(cmd->config) : std::nullopt;
            const RunConfig config = parse_config(cmd->app->get_name(), file, flags);
            const ExperimentResult result = run_experiment(config);
            write_outputs(config.out, result, config.timing);
            print_summary(result, config.out);
            return result.report.pass() ? 0 : 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace lpplab::cli
