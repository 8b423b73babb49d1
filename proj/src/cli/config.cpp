#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lpplab/cli.hpp"
#include "lpplab/env.hpp"

namespace lpplab::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v))
        throw ConfigError("invalid number for '" + key + "': " + text);
    return v;
}

std::int64_t to_int(const std::string& key, const std::string& text) {
    std::int64_t v = 0;
    const char* end = text.data() + text.size();
    auto res = std::from_chars(text.data(), end, v);
    if (res.ec == std::errc() && res.ptr == end) return v;
    // Accept integral values written in floating notation, e.g. 1e5.
    const double d = to_double(key, text);
    if (d != std::floor(d) || std::abs(d) > 9.0e15)
        throw ConfigError("expected an integer for '" + key + "': " + text);
    return static_cast<std::int64_t>(d);
}

bool to_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError("expected true/false for '" + key + "': " + text);
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

void apply_defaults(RunConfig& c) {
    const std::string& e = c.experiment;
    if (e == "shape") {
        c.c = 0.0, c.xi = 0.0, c.n = 2000, c.reps = 100;
    } else if (e == "invariance") {
        c.c = 0.5, c.s = 1.2, c.steps = 20, c.N = 100000, c.K = 3;
    } else if (e == "recentered") {
        c.c = 0.5, c.n = 400, c.N = 20000, c.K = 3;
    } else if (e == "onef1s") {
        c.c = 0.5, c.theta = 2.0, c.n = 400, c.N = 20000, c.K = 2;
    } else if (e == "slope") {
        c.c = 0.5, c.theta = 2.0, c.rows = 200, c.window = 2000;
    } else if (e == "gibbs") {
        const GibbsValidationSizes sizes;
        c.c = 0.5, c.reps = std::int64_t(sizes.finite_chain_samples), c.N = std::int64_t(sizes.limit_chain_samples);
    } else if (e == "pinning") {
        c.c = 1.6, c.n = 1000, c.reps = 20;
    } else if (e == "direction") {
        c.c = 0.0, c.xi = 0.5, c.n = 1000, c.reps = 50;
    }
}

void validate(const RunConfig& c) {
    const std::string& e = c.experiment;
    try {
        const ModelParams p(c.q, c.c);
        if (e == "shape") {
            require(c.xi >= 0.0 && c.xi <= 1.0, "xi must lie in [0,1]");
            require(c.n >= 1 && c.reps >= 1, "n and reps must be positive");
        } else if (e == "invariance") {
            require(c.s >= p.r_c() && c.s * c.q < 1.0, "s must lie in [max(c,1), 1/q)");
            require(c.steps >= 0, "steps must be nonnegative");
            require(c.N >= 1, "N must be positive");
            require(c.K >= 1 && c.K <= 3, "K must lie in [1,3]");
        } else if (e == "recentered" || e == "onef1s") {
            require(c.n >= 1 && c.N >= 1, "n and N must be positive");
            require(c.K >= 1 && c.K <= 3, "K must lie in [1,3]");
            if (e == "onef1s") require(c.theta >= 0.0, "theta must be nonnegative");
        } else if (e == "slope") {
            require(c.theta >= 0.0, "theta must be nonnegative");
            require(c.rows >= 0, "rows must be nonnegative");
            require(c.window >= c.rows + 4, "window must exceed rows by at least 4");
        } else if (e == "gibbs") {
            require(c.c < 1.0, "gibbs requires c in [0,1)");
            require(c.reps >= 1 && c.N >= 1, "reps and N must be positive");
        } else if (e == "pinning") {
            require(c.n >= 1 && c.reps >= 1, "n and reps must be positive");
        } else if (e == "direction") {
            require(c.xi > 0.0 && c.xi < 1.0, "xi must lie in (0,1)");
            require(c.n >= 10, "n must be at least 10");
            require(c.reps >= 1, "reps must be positive");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& ex) {
        throw ConfigError(ex.what());
    }
}

}  // namespace

KeyValues parse_kv(const std::string& text) {
    KeyValues out;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(number) + ": empty key");
        if (out.contains(key)) throw ConfigError("duplicate key '" + key + "'");
        out[key] = value;
    }
    return out;
}

KeyValues read_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_kv(ss.str());
}

std::vector<std::string> experiment_keys(const std::string& e) {
    if (e == "shape") return {"q", "c", "xi", "n", "reps"};
    if (e == "invariance") return {"q", "c", "s", "steps", "N", "K"};
    if (e == "recentered") return {"q", "c", "n", "N", "K"};
    if (e == "onef1s") return {"q", "c", "theta", "n", "N", "K"};
    if (e == "slope") return {"q", "c", "theta", "rows", "window"};
    if (e == "gibbs") return {"q", "c", "reps", "N"};
    if (e == "pinning") return {"q", "c", "n", "reps"};
    if (e == "direction") return {"q", "c", "xi", "n", "reps"};
    throw ConfigError("unknown experiment '" + e + "'");
}

RunConfig make_config(const std::string& experiment, const KeyValues& values) {
    RunConfig c;
    c.experiment = experiment;
    const auto keys = experiment_keys(experiment);
    apply_defaults(c);
    for (const auto& [key, value] : values) {
        if (key == "experiment") {
            require(value == experiment, "config names experiment '" + value + "' but '" + experiment +
                                             "' was requested");
        } else if (key == "seed") {
            const std::int64_t s = to_int(key, value);
            require(s >= 0, "seed must be nonnegative");
            c.seed = static_cast<std::uint64_t>(s);
        } else if (key == "out") {
            require(!value.empty(), "out must not be empty");
            c.out = value;
        } else if (key == "timing") {
            c.timing = to_bool(key, value);
        } else if (key.rfind("tol_", 0) == 0) {
            const std::string name = key.substr(4);
            require(c.tol.contains(name), "unknown tolerance '" + name + "'");
            try {
                c.tol.set(name, to_double(key, value));
            } catch (const std::invalid_argument& ex) {
                throw ConfigError(ex.what());
            }
        } else if (std::find(keys.begin(), keys.end(), key) != keys.end()) {
            if (key == "q") c.q = to_double(key, value);
            else if (key == "c") c.c = to_double(key, value);
            else if (key == "s") c.s = to_double(key, value);
            else if (key == "theta") c.theta = to_double(key, value);
            else if (key == "xi") c.xi = to_double(key, value);
            else if (key == "n") c.n = to_int(key, value);
            else if (key == "reps") c.reps = to_int(key, value);
            else if (key == "N") c.N = to_int(key, value);
            else if (key == "K") c.K = to_int(key, value);
            else if (key == "steps") c.steps = to_int(key, value);
            else if (key == "rows") c.rows = to_int(key, value);
            else if (key == "window") c.window = to_int(key, value);
        } else {
            throw ConfigError("unknown key '" + key + "' for experiment '" + experiment + "'");
        }
    }
    validate(c);
    return c;
}

RunConfig parse_config(const std::string& experiment, const std::optional<std::string>& file,
                       const KeyValues& flags) {
    KeyValues merged = file ? read_kv_file(*file) : KeyValues{};
    for (const auto& [k, v] : flags) merged[k] = v;
    return make_config(experiment, merged);
}

}  // namespace lpplab::cli
