#pragma once

// Run configuration: one JSON document with the blocks system, sequence,
// detection, integrator, analysis, sweep, spectrum and output. Everything is
// validated on load; unknown keys are rejected. Errors carry the path of the
// offending field, e.g. "system.drives[1].C".

#include "omi/detection.hpp"
#include "omi/dynamics.hpp"
#include "omi/experiments.hpp"
#include "omi/model.hpp"
#include "omi/sequence.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace omi {

enum class Preset { TwoMode, Interference, DarkDecay, Custom };

std::string_view to_string(Preset p) noexcept;

struct SequenceSpec {
    Preset preset = Preset::TwoMode;
    double theta1 = 0.0;
    double theta2 = 0.0;
    double phi1 = 0.0;  // interference: coupling-stage phase of drive 1
    double phi1_dark = std::numbers::pi;
    double tau = 0.0;   // dark_decay: coupling-stage length for simulate
    double t_signal = 0.5e-3;
    double t_decay = 1.0e-3;
    double t_measure = 1.0e-3;
    cplx signal_amplitude{1.0, 0.0};
    std::vector<Stage> stages;  // custom only
};

struct AnalysisConfig {
    bool fit = true;
    double window = 0.4e-3;  // s, fit and energy window after a stage edge
    bool bright_reference = true;  // dark-decay: also fit the bright decay
    // Model used for that bright fit; unset = the system's own variant.
    std::optional<Variant> bright_variant;
};

struct SweepConfig {
    std::vector<double> phi;  // rad
    std::vector<double> tau;  // s
};

struct SpectrumConfig {
    double min_hz = -2e6;
    double max_hz = 2e6;
    std::size_t points = 801;
    std::array<double, 2> two_photon_offsets_hz{0.0, 0.0};
};

struct OutputConfig {
    std::size_t decimation = 100;
};

struct RunConfig {
    ParamsInput system_input;
    SystemParams system;  // resolved from system_input
    SequenceSpec sequence;
    DetectionConfig detection;
    IntegratorOptions integrator;  // dt resolved to default_time_step when omitted
    AnalysisConfig analysis;
    SweepConfig sweep;
    SpectrumConfig spectrum;
    OutputConfig output;

    // Sequence built from the preset (or stage list) with its own tau / phi1.
    PulseSequence build_sequence() const;
    InterferenceProtocol interference() const;
    DarkDecayProtocol dark_decay() const;
};

// Parse and validate. Throws ConfigError.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace omi
