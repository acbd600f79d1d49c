#pragma once

// Workspace configuration. Precedence: built-in defaults, then config
// file, then SSTKIT_* environment variables, then command-line flags.

#include <string>

namespace sst {

struct WorkspaceConfig {
    std::string store_path = "workspace.sst";
    long long period = 604800;   // seconds per pseudo-period (one week)
    int slots = 336;             // slots per period (30 min each)
    double beta = 1.0;           // embedding temperature
    std::string embedding = "softmax";
    double forgetting = 0.9;     // convex-update coefficient
    int local_window = 48;       // slots per local window (24 h)

    // Throws on out-of-range values or an unknown embedding name.
    void validate() const;
};

// Parse `key=value` lines; '#' starts a comment, blank lines ignored.
// Unknown keys are an error so typos do not silently fall back.
void apply_config_file(WorkspaceConfig& cfg, const std::string& path);

void apply_env_overrides(WorkspaceConfig& cfg);

}  // namespace sst
