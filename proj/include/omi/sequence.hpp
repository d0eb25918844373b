#pragma once

// Piecewise-constant pulse protocols. A sequence is an ordered list of stages
// starting at t = 0; only the drive coefficients jump at stage boundaries, the
// mode amplitudes stay continuous.

#include "omi/model.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace omi {

enum class StageLabel { Excitation, Coupling, Measurement, Custom };

std::string_view to_string(StageLabel label) noexcept;
// Throws DomainError for an unknown name.
StageLabel stage_label_from_string(std::string_view name);

struct StageCoefficients {
    cplx signal_amplitude{};            // A_s, sqrt(photons/s)
    std::array<double, 2> drive_phase{};  // phi_k (rad)
    std::array<double, 2> drive_scale{};  // s_k in [0, 1]
};

struct Stage {
    double duration = 0.0;  // s
    StageCoefficients coeffs;
    StageLabel label = StageLabel::Custom;
};

class PulseSequence {
  public:
    // Throws DomainError when a stage violates duration > 0 or scale in [0, 1].
    explicit PulseSequence(std::vector<Stage> stages);

    std::span<const Stage> stages() const noexcept { return stages_; }
    std::size_t size() const noexcept { return stages_.size(); }
    double total_duration() const noexcept { return starts_.back(); }
    double stage_start(std::size_t i) const { return starts_.at(i); }
    double stage_end(std::size_t i) const { return starts_.at(i + 1); }

    // Right-continuous: a boundary belongs to the later stage, t = total
    // duration to the last one. Throws RangeError outside [0, total].
    std::size_t stage_index_at(double t) const;
    const StageCoefficients& coefficients_at(double t) const {
        return stages_[stage_index_at(t)].coeffs;
    }

  private:
    std::vector<Stage> stages_;
    std::vector<double> starts_;  // size() + 1 entries, last = total duration
};

// Fig. 2 protocol: excitation with signal and drive 1 at theta1, then
// decay with drive 1 only. Drive 2 stays off.
PulseSequence preset_two_mode(double theta1, double t_signal, double t_decay, cplx A_s);

// Fig. 3a protocol: excitation at (theta1, theta2), coupling at (phi1, theta2).
PulseSequence preset_interference(double theta1, double theta2, double phi1, double t_signal,
                                  double t_decay, cplx A_s);

// Fig. 4a protocol: excitation at (theta1, theta2), coupling for tau at
// (phi1_dark, theta2), measurement back at (theta1, theta2). tau = 0 drops
// the coupling stage.
PulseSequence preset_dark_decay(double theta1, double theta2, double phi1_dark, double tau,
                                double t_signal, double t_measure, cplx A_s);

}  // namespace omi
