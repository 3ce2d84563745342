#include "mvstab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mvstab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void reject_unknown_keys(const json& obj, const std::string& section,
                         const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.contains(it.key()))
            fail("unknown key '" + (section.empty() ? it.key() : section + "." + it.key()) + "'");
}

double require_number(const json& obj, const std::string& section,
                      const std::string& key) {
    if (!obj.contains(key)) fail("missing key '" + section + "." + key + "'");
    if (!obj.at(key).is_number())
        fail("key '" + section + "." + key + "' must be a number");
    return obj.at(key).get<double>();
}

double number_or(const json& obj, const std::string& section,
                 const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_number())
        fail("key '" + section + "." + key + "' must be a number");
    return obj.at(key).get<double>();
}

int int_or(const json& obj, const std::string& section, const std::string& key,
           int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_number_integer())
        fail("key '" + section + "." + key + "' must be an integer");
    return obj.at(key).get<int>();
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into a line number for the diagnostic.
        std::size_t line = 1;
        for (std::size_t i = 0; i < e.byte && i < text.size(); ++i)
            if (text[i] == '\n') ++line;
        fail("malformed config at line " + std::to_string(line) + ": " + e.what());
    }
    if (!root.is_object()) fail("config root must be an object");
    reject_unknown_keys(root, "", {"model", "sim", "constants", "output"});

    RunConfig cfg;

    if (!root.contains("model")) fail("missing section 'model'");
    const json& jm = root.at("model");
    reject_unknown_keys(jm, "model", {"kind", "a", "b", "gdiag", "k1", "k2"});
    if (!jm.contains("kind") || !jm.at("kind").is_string())
        fail("key 'model.kind' must be a string");
    const std::string kind = jm.at("kind").get<std::string>();
    if (kind != "linear") fail("unknown model kind '" + kind + "' (expected \"linear\")");
    cfg.model.a = require_number(jm, "model", "a");
    cfg.model.b = require_number(jm, "model", "b");
    cfg.model.gdiag = require_number(jm, "model", "gdiag");
    cfg.model.k1 = require_number(jm, "model", "k1");
    cfg.model.k2 = require_number(jm, "model", "k2");

    if (!root.contains("sim")) fail("missing section 'sim'");
    const json& js = root.at("sim");
    reject_unknown_keys(js, "sim",
                        {"N", "dt", "delta", "T", "seed", "x0", "record_stride",
                         "snapshot_times", "extra_moment_order", "hold_err_order"});
    cfg.sim.N = int_or(js, "sim", "N", -1);
    if (cfg.sim.N < 0) fail("missing key 'sim.N'");
    cfg.sim.dt = require_number(js, "sim", "dt");
    cfg.sim.delta = require_number(js, "sim", "delta");
    cfg.sim.T = require_number(js, "sim", "T");
    if (!js.contains("seed") || !js.at("seed").is_number_unsigned())
        fail("key 'sim.seed' must be a non-negative integer");
    cfg.sim.seed = js.at("seed").get<std::uint64_t>();
    if (!js.contains("x0") || !js.at("x0").is_array() || js.at("x0").empty())
        fail("key 'sim.x0' must be a non-empty array of numbers");
    for (const auto& v : js.at("x0")) {
        if (!v.is_number()) fail("key 'sim.x0' must contain only numbers");
        cfg.sim.x0.push_back(v.get<double>());
    }
    cfg.sim.record_stride = int_or(js, "sim", "record_stride", 1);
    if (js.contains("snapshot_times")) {
        if (!js.at("snapshot_times").is_array())
            fail("key 'sim.snapshot_times' must be an array");
        for (const auto& v : js.at("snapshot_times")) {
            if (!v.is_number()) fail("key 'sim.snapshot_times' must contain only numbers");
            cfg.sim.snapshot_times.push_back(v.get<double>());
        }
    }
    cfg.sim.extra_moment_order = int_or(js, "sim", "extra_moment_order", 0);
    cfg.sim.hold_err_order = int_or(js, "sim", "hold_err_order", 0);

    if (root.contains("constants")) {
        const json& jc = root.at("constants");
        reject_unknown_keys(jc, "constants",
                            {"L1", "L2", "L3", "lambda1", "lambda2", "decay_coeff",
                             "gamma2", "c1", "c2", "p"});
        ConditionConstants c;
        c.L1 = require_number(jc, "constants", "L1");
        c.L2 = require_number(jc, "constants", "L2");
        c.L3 = require_number(jc, "constants", "L3");
        c.lambda1 = require_number(jc, "constants", "lambda1");
        c.lambda2 = require_number(jc, "constants", "lambda2");
        c.decay_coeff = require_number(jc, "constants", "decay_coeff");
        c.gamma2 = number_or(jc, "constants", "gamma2", 0.0);
        c.c1 = require_number(jc, "constants", "c1");
        c.c2 = require_number(jc, "constants", "c2");
        c.p = int_or(jc, "constants", "p", 2);
        try {
            c.validate();
        } catch (const StabilityError& e) {
            fail(std::string("section 'constants': ") + e.what());
        }
        cfg.constants = c;
    }

    if (root.contains("output")) {
        const json& jo = root.at("output");
        reject_unknown_keys(jo, "output", {"directory", "prefix"});
        if (jo.contains("directory")) {
            if (!jo.at("directory").is_string())
                fail("key 'output.directory' must be a string");
            cfg.output.directory = jo.at("directory").get<std::string>();
        }
        if (jo.contains("prefix")) {
            if (!jo.at("prefix").is_string())
                fail("key 'output.prefix' must be a string");
            cfg.output.prefix = jo.at("prefix").get<std::string>();
        }
    }

    try {
        cfg.sim.validate(static_cast<int>(cfg.sim.x0.size()));
    } catch (const SimError& e) {
        fail(std::string("section 'sim': ") + e.what());
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_run_config(ss.str());
}

std::string run_config_to_json(const RunConfig& cfg) {
    json root;
    root["model"] = {{"kind", "linear"}, {"a", cfg.model.a}, {"b", cfg.model.b},
                     {"gdiag", cfg.model.gdiag}, {"k1", cfg.model.k1},
                     {"k2", cfg.model.k2}};
    json js = {{"N", cfg.sim.N},
               {"dt", cfg.sim.dt},
               {"delta", cfg.sim.delta},
               {"T", cfg.sim.T},
               {"seed", cfg.sim.seed},
               {"x0", cfg.sim.x0},
               {"record_stride", cfg.sim.record_stride},
               {"snapshot_times", cfg.sim.snapshot_times},
               {"extra_moment_order", cfg.sim.extra_moment_order},
               {"hold_err_order", cfg.sim.hold_err_order}};
    root["sim"] = js;
    if (cfg.constants) {
        const ConditionConstants& c = *cfg.constants;
        root["constants"] = {{"L1", c.L1},           {"L2", c.L2},
                             {"L3", c.L3},           {"lambda1", c.lambda1},
                             {"lambda2", c.lambda2}, {"decay_coeff", c.decay_coeff},
                             {"gamma2", c.gamma2},   {"c1", c.c1},
                             {"c2", c.c2},           {"p", c.p}};
    }
    root["output"] = {{"directory", cfg.output.directory},
                      {"prefix", cfg.output.prefix}};
    return root.dump(2) + "\n";
}

}  // namespace mvstab
