#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "lpplab/cli.hpp"

namespace lpplab::cli {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

std::string report_json(const ExperimentReport& report, bool timing) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["name"] = report.name;
    ordered_json params = ordered_json::object();
    for (const auto& [k, v] : report.params) params[k] = v;
    j["params"] = params;
    ordered_json estimate = ordered_json::object(), target = ordered_json::object(),
                 tolerance = ordered_json::object();
    for (const auto& c : report.checks) {
        estimate[c.name] = c.estimate;
        target[c.name] = c.target;
        tolerance[c.name] = {{"rule", rule_name(c.rule)}, {"value", c.tolerance}, {"pass", c.pass()}};
    }
    j["estimate"] = estimate;
    j["target"] = target;
    j["tolerance"] = tolerance;
    j["pass"] = report.pass();
    j["runtime_s"] = timing ? ordered_json(report.runtime_s) : ordered_json(nullptr);
    j["seed"] = report.seed;
    return j.dump(2) + "\n";
}

void write_outputs(const std::string& out_dir, const ExperimentResult& result, bool timing) {
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / (result.report.name + ".json"), report_json(result.report, timing));
    write_file(dir / (result.report.name + ".csv"), result.data.str());
}

}  // namespace lpplab::cli
