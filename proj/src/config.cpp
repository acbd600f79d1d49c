#include "sstkit/config.hpp"

#include <cstdlib>
#include <fstream>

#include "sstkit/error.hpp"
#include "sstkit/strings.hpp"

namespace sst {

void WorkspaceConfig::validate() const {
    if (store_path.empty()) throw Error("store path must not be empty");
    if (period <= 0) throw Error("period must be positive");
    if (slots <= 0) throw Error("slot count must be positive");
    if (period % slots != 0) throw Error("period must be divisible by slot count");
    if (beta <= 0.0) throw Error("beta must be positive");
    if (embedding != "softmax" && embedding != "inverted") {
        throw Error("embedding must be softmax or inverted");
    }
    if (forgetting <= 0.0 || forgetting >= 1.0) throw Error("forgetting factor must lie in (0,1)");
    if (local_window <= 0) throw Error("local window must be positive");
}

namespace {

long long int_value(const std::string& value) {
    auto v = parse_int(value);
    if (!v) throw Error("expected an integer, got \"" + value + "\"");
    return *v;
}

double double_value(const std::string& value) {
    auto v = parse_double(value);
    if (!v) throw Error("expected a number, got \"" + value + "\"");
    return *v;
}

void apply_kv(WorkspaceConfig& cfg, const std::string& key, const std::string& value,
              const std::string& where) {
    try {
        if (key == "store") cfg.store_path = value;
        else if (key == "period") cfg.period = int_value(value);
        else if (key == "slots") cfg.slots = static_cast<int>(int_value(value));
        else if (key == "beta") cfg.beta = double_value(value);
        else if (key == "embedding") cfg.embedding = value;
        else if (key == "forgetting") cfg.forgetting = double_value(value);
        else if (key == "local_window") cfg.local_window = static_cast<int>(int_value(value));
        else throw Error("unknown config key: " + key);
    } catch (const Error& e) {
        throw Error(where + ": " + e.what());
    }
}

}  // namespace

void apply_config_file(WorkspaceConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(lineno, path + ": expected key=value");
        }
        apply_kv(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)),
                 path + ":" + std::to_string(lineno));
    }
}

void apply_env_overrides(WorkspaceConfig& cfg) {
    auto env = [](const char* name) -> const char* { return std::getenv(name); };
    if (const char* v = env("SSTKIT_STORE")) apply_kv(cfg, "store", v, "SSTKIT_STORE");
    if (const char* v = env("SSTKIT_PERIOD")) apply_kv(cfg, "period", v, "SSTKIT_PERIOD");
    if (const char* v = env("SSTKIT_SLOTS")) apply_kv(cfg, "slots", v, "SSTKIT_SLOTS");
    if (const char* v = env("SSTKIT_BETA")) apply_kv(cfg, "beta", v, "SSTKIT_BETA");
    if (const char* v = env("SSTKIT_EMBEDDING")) apply_kv(cfg, "embedding", v, "SSTKIT_EMBEDDING");
    if (const char* v = env("SSTKIT_FORGETTING")) apply_kv(cfg, "forgetting", v, "SSTKIT_FORGETTING");
    if (const char* v = env("SSTKIT_LOCAL_WINDOW")) apply_kv(cfg, "local_window", v, "SSTKIT_LOCAL_WINDOW");
}

}  // namespace sst
