#include "omi/sequence.hpp"

#include "omi/errors.hpp"

#include <algorithm>
#include <cmath>

namespace omi {

std::string_view to_string(StageLabel label) noexcept {
    switch (label) {
        case StageLabel::Excitation: return "excitation";
        case StageLabel::Coupling: return "coupling";
        case StageLabel::Measurement: return "measurement";
        case StageLabel::Custom: return "custom";
    }
    return "custom";
}

StageLabel stage_label_from_string(std::string_view name) {
    for (auto l : {StageLabel::Excitation, StageLabel::Coupling, StageLabel::Measurement,
                   StageLabel::Custom}) {
        if (to_string(l) == name) return l;
    }
    throw DomainError("unknown stage label '" + std::string(name) + "'");
}

PulseSequence::PulseSequence(std::vector<Stage> stages) : stages_(std::move(stages)) {
    if (stages_.empty()) {
        throw DomainError("pulse sequence needs at least one stage");
    }
    starts_.reserve(stages_.size() + 1);
    double t = 0.0;
    for (std::size_t i = 0; i < stages_.size(); ++i) {
        const Stage& s = stages_[i];
        const std::string where = "stage " + std::to_string(i);
        if (!(s.duration > 0.0) || !std::isfinite(s.duration)) {
            throw DomainError(where + ": duration must be > 0");
        }
        for (double sc : s.coeffs.drive_scale) {
            if (!(sc >= 0.0 && sc <= 1.0)) {
                throw DomainError(where + ": drive_scale must lie in [0, 1]");
            }
        }
        for (double ph : s.coeffs.drive_phase) {
            if (!std::isfinite(ph)) throw DomainError(where + ": drive_phase must be finite");
        }
        starts_.push_back(t);
        t += s.duration;
    }
    starts_.push_back(t);
}

std::size_t PulseSequence::stage_index_at(double t) const {
    if (!(t >= 0.0 && t <= total_duration())) {
        throw RangeError("time " + std::to_string(t) + " s outside pulse sequence [0, " +
                         std::to_string(total_duration()) + "]");
    }
    // First start strictly greater than t, minus one.
    auto it = std::upper_bound(starts_.begin(), starts_.end() - 1, t);
    return static_cast<std::size_t>(std::distance(starts_.begin(), it)) - 1;
}

namespace {

Stage make_stage(StageLabel label, double duration, cplx signal, double phase1, double phase2,
                 double scale1, double scale2) {
    Stage s;
    s.label = label;
    s.duration = duration;
    s.coeffs.signal_amplitude = signal;
    s.coeffs.drive_phase = {phase1, phase2};
    s.coeffs.drive_scale = {scale1, scale2};
    return s;
}

}  // namespace

PulseSequence preset_two_mode(double theta1, double t_signal, double t_decay, cplx A_s) {
    return PulseSequence({
        make_stage(StageLabel::Excitation, t_signal, A_s, theta1, 0.0, 1.0, 0.0),
        make_stage(StageLabel::Coupling, t_decay, 0.0, theta1, 0.0, 1.0, 0.0),
    });
}

PulseSequence preset_interference(double theta1, double theta2, double phi1, double t_signal,
                                  double t_decay, cplx A_s) {
    return PulseSequence({
        make_stage(StageLabel::Excitation, t_signal, A_s, theta1, theta2, 1.0, 1.0),
        make_stage(StageLabel::Coupling, t_decay, 0.0, phi1, theta2, 1.0, 1.0),
    });
}

PulseSequence preset_dark_decay(double theta1, double theta2, double phi1_dark, double tau,
                                double t_signal, double t_measure, cplx A_s) {
    if (!(tau >= 0.0)) {
        throw DomainError("preset_dark_decay: tau must be >= 0");
    }
    std::vector<Stage> st;
    st.push_back(make_stage(StageLabel::Excitation, t_signal, A_s, theta1, theta2, 1.0, 1.0));
    if (tau > 0.0) {
        st.push_back(make_stage(StageLabel::Coupling, tau, 0.0, phi1_dark, theta2, 1.0, 1.0));
    }
    st.push_back(make_stage(StageLabel::Measurement, t_measure, 0.0, theta1, theta2, 1.0, 1.0));
    return PulseSequence(std::move(st));
}

}  // namespace omi
