#include <cstdlib>
#include <fstream>
#include <string>

#include "doctest.h"
#include "sstkit/config.hpp"
#include "sstkit/error.hpp"

using namespace sst;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path(std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") + "/" + name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

struct EnvGuard {
    // unsets all SSTKIT_* variables on entry and exit so tests cannot
    // leak overrides into each other
    EnvGuard() { clear(); }
    ~EnvGuard() { clear(); }
    static void clear() {
        for (const char* name : {"SSTKIT_STORE", "SSTKIT_PERIOD", "SSTKIT_SLOTS", "SSTKIT_BETA",
                                 "SSTKIT_EMBEDDING", "SSTKIT_FORGETTING", "SSTKIT_LOCAL_WINDOW"}) {
            unsetenv(name);
        }
    }
};

}  // namespace

TEST_CASE("defaults validate and describe a weekly grid") {
    WorkspaceConfig cfg;
    CHECK(cfg.store_path == "workspace.sst");
    CHECK(cfg.period == 604800);
    CHECK(cfg.slots == 336);
    CHECK(cfg.period % cfg.slots == 0);
    CHECK(cfg.beta == 1.0);
    CHECK(cfg.embedding == "softmax");
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config files override defaults key by key") {
    EnvGuard guard;
    TempFile file("sstkit_cfg_basic.conf",
                  "# workspace tuning\n"
                  "store = data/alt.sst\n"
                  "period=86400   # one day\n"
                  "slots = 24\n"
                  "\n"
                  "beta = 2.5\n"
                  "embedding = inverted\n"
                  "forgetting = 0.8\n"
                  "local_window = 6\n");
    WorkspaceConfig cfg;
    apply_config_file(cfg, file.path);
    CHECK(cfg.store_path == "data/alt.sst");
    CHECK(cfg.period == 86400);
    CHECK(cfg.slots == 24);
    CHECK(cfg.beta == 2.5);
    CHECK(cfg.embedding == "inverted");
    CHECK(cfg.forgetting == 0.8);
    CHECK(cfg.local_window == 6);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config file errors name the offending line") {
    EnvGuard guard;
    WorkspaceConfig cfg;

    TempFile nokv("sstkit_cfg_nokv.conf", "period=100\njust words\n");
    try {
        apply_config_file(cfg, nokv.path);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("expected key=value") != std::string::npos);
    }

    TempFile unknown("sstkit_cfg_unknown.conf", "periods=100\n");
    CHECK_THROWS_WITH_AS(apply_config_file(cfg, unknown.path),
                         doctest::Contains("unknown config key"), Error);

    TempFile badnum("sstkit_cfg_badnum.conf", "slots=twelve\n");
    CHECK_THROWS_WITH_AS(apply_config_file(cfg, badnum.path),
                         doctest::Contains("expected an integer"), Error);

    CHECK_THROWS_WITH_AS(apply_config_file(cfg, "/nonexistent/sstkit.conf"),
                         doctest::Contains("cannot open config file"), Error);
}

TEST_CASE("environment variables override file settings") {
    EnvGuard guard;
    TempFile file("sstkit_cfg_env.conf", "period=86400\nslots=24\nbeta=2\n");
    WorkspaceConfig cfg;
    apply_config_file(cfg, file.path);

    setenv("SSTKIT_SLOTS", "48", 1);
    setenv("SSTKIT_EMBEDDING", "inverted", 1);
    setenv("SSTKIT_STORE", "env.sst", 1);
    apply_env_overrides(cfg);
    CHECK(cfg.period == 86400);            // file survives where env is silent
    CHECK(cfg.slots == 48);                // env wins
    CHECK(cfg.beta == 2.0);
    CHECK(cfg.embedding == "inverted");
    CHECK(cfg.store_path == "env.sst");

    setenv("SSTKIT_BETA", "not-a-number", 1);
    CHECK_THROWS_WITH_AS(apply_env_overrides(cfg), doctest::Contains("SSTKIT_BETA"), Error);
}

TEST_CASE("validation rejects every out-of-range field") {
    auto reject = [](auto mutate, const char* fragment) {
        WorkspaceConfig cfg;
        mutate(cfg);
        CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains(fragment), Error);
    };
    reject([](WorkspaceConfig& c) { c.store_path.clear(); }, "store path");
    reject([](WorkspaceConfig& c) { c.period = 0; }, "period must be positive");
    reject([](WorkspaceConfig& c) { c.slots = -3; }, "slot count");
    reject([](WorkspaceConfig& c) { c.slots = 13; }, "divisible");  // 604800 % 13 != 0
    reject([](WorkspaceConfig& c) { c.beta = 0.0; }, "beta");
    reject([](WorkspaceConfig& c) { c.embedding = "sigmoid"; }, "embedding");
    reject([](WorkspaceConfig& c) { c.forgetting = 1.0; }, "forgetting");
    reject([](WorkspaceConfig& c) { c.local_window = 0; }, "local window");
}
