#pragma once

// Heterodyne detection of the cavity emission. The emitted field is
// sqrt(kappa_ext) alpha; beating against drive k as local oscillator and
// filtering at the chosen beat frequency selects one spectral component of
// alpha, which is shifted to DC and low-passed by a causal one-pole filter.

#include "omi/dynamics.hpp"
#include "omi/model.hpp"
#include "omi/sequence.hpp"
#include "omi/trace.hpp"

#include <vector>

namespace omi {

enum class Beat { M1, M2 };

struct LoPath {
    int drive = 0;  // 0-based drive index acting as local oscillator
    cplx weight{1.0, 0.0};
};

struct DetectionConfig {
    // Single LO path through the drive matching `beat`.
    static DetectionConfig for_beat(Beat beat);

    Beat beat = Beat::M1;
    // Default: the drive whose beat is selected is the only local oscillator.
    // A second path leaks the other beat through the one-pole filter as a
    // ripple at Delta_m (amplitude ~0.27 at 50 kHz / 180 kHz).
    std::vector<LoPath> lo_paths{{0, {1.0, 0.0}}};
    double filter_bandwidth_hz = 50e3;  // one-sided -3 dB point
    // Filter time constants skipped after each stage edge. At a signal-off
    // edge the emitted field reverses sign, so the filter needs about 8 time
    // constants before its residual transient drops below 1e-3 of the signal.
    double guard_time_constants = 8.0;

    // Structural checks only (non-empty paths, valid drives, B > 0, guard >= 0).
    void validate() const;
    // Also checks that B sits between the fastest expected decay and Delta_m/2pi.
    void validate(const SystemParams& params) const;
};

// Settling guard excluded after stage edges: guard_time_constants / (2 pi B).
double settling_guard(const DetectionConfig& cfg);

ComplexTrace output_field(const ComplexTrace& alpha, double kappa_ext);

// Multiply by e^{+i offset t}, then a causal first-order low-pass with DC gain
// 1 and -3 dB point at bandwidth_hz, started from rest. Throws SamplingError
// when |offset| dt >= 1.
ComplexTrace demodulate(const ComplexTrace& trace, double offset, double bandwidth_hz);

// Demodulation offset (rad/s) of the LO path through `drive` for the given beat.
double lo_offset(const SystemParams& params, Beat beat, int drive);

// Weighted sum over LO paths of the demodulated emission.
ComplexTrace beat_envelope(const ComplexTrace& alpha, const SystemParams& params,
                           const DetectionConfig& cfg);

// As above, with each LO path weighted by its drive's stage scale s_k(t): a
// drive that is off provides no local oscillator.
ComplexTrace beat_envelope(const StateTrajectory& traj, const PulseSequence& seq,
                           const SystemParams& params, const DetectionConfig& cfg);

RealTrace intensity(const ComplexTrace& envelope);

// Trapezoidal integral over [t_start, t_end], linear interpolation at the
// ends. Throws RangeError for an empty, inverted or out-of-trace window.
double energy_in_window(const RealTrace& trace, double t_start, double t_end);

}  // namespace omi
