#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpplab/experiments.hpp"

namespace lpplab::cli {

// Bad input: unknown keys, malformed values, parameters outside their domain.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"shape", "invariance", "recentered", "onef1s",
                                                "slope", "gibbs", "pinning", "direction"};
    return names;
}

struct RunConfig {
    std::string experiment;
    double q = 0.5;
    double c = 0.0;
    double s = 0.0;
    double theta = 0.0;
    double xi = 0.0;
    std::int64_t n = 0;
    std::int64_t reps = 0;
    std::int64_t N = 0;
    std::int64_t K = 0;
    std::int64_t steps = 0;
    std::int64_t rows = 0;
    std::int64_t window = 0;
    std::uint64_t seed = 1;
    std::string out = ".";
    bool timing = false;
    Tolerances tol;
};

using KeyValues = std::map<std::string, std::string>;

// Flat `key = value` document; blank lines and lines starting with '#' are skipped.
KeyValues parse_kv(const std::string& text);
KeyValues read_kv_file(const std::string& path);

// Keys accepted for an experiment, besides seed, out, timing and tol_<name>.
std::vector<std::string> experiment_keys(const std::string& experiment);

// Applies per-experiment defaults, then `values`, then validates every domain.
RunConfig make_config(const std::string& experiment, const KeyValues& values);

// File values first, flag values override.
RunConfig parse_config(const std::string& experiment, const std::optional<std::string>& file,
                       const KeyValues& flags);

ExperimentResult run_experiment(const RunConfig& config);

std::string report_json(const ExperimentReport& report, bool timing);
void write_outputs(const std::string& out_dir, const ExperimentResult& result, bool timing);

struct PlotSeries {
    enum class Kind { bars, line, points };
    std::string label;
    Kind kind = Kind::line;
    std::vector<double> x, y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
};

std::string render_svg(const PlotSpec& spec);

// Builds a plot from experiment CSVs or a list of JSON reports.
PlotSpec plot_from_files(const std::vector<std::string>& inputs);

// Full command line: parses, dispatches, writes outputs.
// Returns 0 on pass, 2 on fail, 1 on error.
int main(int argc, char** argv);

}  // namespace lpplab::cli
