#pragma once

// Protocol runs and parameter sweeps shared by the CLI, the self-test and the
// acceptance suite. A run integrates a sequence, forms the heterodyne
// envelope and its intensity; sweeps run independent protocol instances on a
// worker pool and collect results by grid index.

#include "omi/analysis.hpp"
#include "omi/detection.hpp"
#include "omi/dynamics.hpp"
#include "omi/sequence.hpp"

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace omi {

struct ProtocolRun {
    StateTrajectory trajectory;
    ComplexTrace envelope;
    RealTrace detected;  // |envelope|^2
};

ProtocolRun run_protocol(const PulseSequence& seq, const SystemParams& params,
                         const DetectionConfig& detection, const IntegratorOptions& opts,
                         const StateVector& init = {});

// Fit window for stage `stage`: from its start + guard, at most `max_length`
// long (0 = to the end of the stage).
Window stage_window(const ProtocolRun& run, std::size_t stage, double guard,
                    double max_length = 0.0);

// Single-exponential fit of the detected intensity over stage_window().
FitResult fit_stage(const ProtocolRun& run, std::size_t stage, double guard,
                    double max_length = 0.0);

// Detected energy over [stage start + guard, + length].
double stage_energy(const ProtocolRun& run, std::size_t stage, double guard, double length);

// Runs body(i) for i in [0, n) on `workers` threads. The exception of the
// lowest failing index is rethrown after all workers finish.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::optional<std::size_t> err_index;
    std::exception_ptr err;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(err_mutex);
                if (!err_index || i < *err_index) {
                    err_index = i;
                    err = std::current_exception();
                }
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (err) std::rethrow_exception(err);
}

unsigned default_workers() noexcept;

struct InterferenceProtocol {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double t_signal = 0.5e-3;
    double t_decay = 1.0e-3;
    cplx signal_amplitude = 1.0;
    double window = 0.4e-3;  // energy window after the signal switches off
};

// Coupling-stage emission energy for each phi1 (Fig. 3d style).
std::vector<double> phase_sweep(const SystemParams& params, const DetectionConfig& detection,
                                const IntegratorOptions& opts, const InterferenceProtocol& proto,
                                const std::vector<double>& phis, unsigned workers);

struct DarkDecayProtocol {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double phi1_dark = std::numbers::pi;
    double t_signal = 0.5e-3;
    double t_measure = 1.0e-3;
    cplx signal_amplitude = 1.0;
    double window = 0.4e-3;  // energy window in the measurement stage
};

struct DarkDecayResult {
    std::vector<double> tau;  // as integrated (snapped to the sample grid)
    std::vector<double> energy;
    FitResult fit;  // energy vs tau; fit.rate is gamma_D (rad/s)
};

inline constexpr std::size_t kMinTauPoints = 5;

// Measurement-stage energy for each tau (Fig. 4b style) and the exponential
// fit across tau. Throws RankError for fewer than 5 tau values.
DarkDecayResult dark_decay_sweep(const SystemParams& params, const DetectionConfig& detection,
                                 const IntegratorOptions& opts, const DarkDecayProtocol& proto,
                                 const std::vector<double>& taus, unsigned workers);

// Bright-mode decay: interference protocol with phi1 = theta1, fit of the
// coupling-stage intensity over `proto.window`.
FitResult bright_decay(const SystemParams& params, const DetectionConfig& detection,
                       const IntegratorOptions& opts, const InterferenceProtocol& proto);

}  // namespace omi
