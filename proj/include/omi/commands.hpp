#pragma once

// CLI commands as library functions. Each writes its CSV files and a
// summary.json into `out` and returns the summary.

#include "omi/config.hpp"
#include "omi/selftest.hpp"

#include <json.hpp>

#include <filesystem>

namespace omi {

struct CommandOptions {
    std::filesystem::path out;
    unsigned workers = 1;
};

// states.csv, detected.csv (decimated), per-stage fits. Top-level summary
// keys describe the final stage.
nlohmann::ordered_json cmd_simulate(const RunConfig& cfg, const CommandOptions& opt);

// fringe.csv; needs the interference preset and >= 5 phases.
nlohmann::ordered_json cmd_sweep_phase(const RunConfig& cfg, const CommandOptions& opt);

// dark_decay.csv; needs the dark_decay preset and >= 5 tau values.
nlohmann::ordered_json cmd_dark_decay(const RunConfig& cfg, const CommandOptions& opt);

// spectrum.csv; resonant-only systems only.
nlohmann::ordered_json cmd_spectrum(const RunConfig& cfg, const CommandOptions& opt);

// Writes summary.json (when `out` is non-empty) with one entry per check.
nlohmann::ordered_json selftest_summary(const SelftestReport& rep);

void write_summary(const std::filesystem::path& out, const nlohmann::ordered_json& summary);

}  // namespace omi
