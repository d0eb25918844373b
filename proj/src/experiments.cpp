#include "omi/experiments.hpp"

#include "omi/errors.hpp"

#include <algorithm>
#include <string>

namespace omi {

ProtocolRun run_protocol(const PulseSequence& seq, const SystemParams& params,
                         const DetectionConfig& detection, const IntegratorOptions& opts,
                         const StateVector& init) {
    StateTrajectory traj = integrate(seq, params, init, opts);
    ComplexTrace env = beat_envelope(traj, seq, params, detection);
    RealTrace det = intensity(env);
    return {std::move(traj), std::move(env), std::move(det)};
}

Window stage_window(const ProtocolRun& run, std::size_t stage, double guard, double max_length) {
    const double start = run.trajectory.stage_start_time(stage) + guard;
    double end = run.trajectory.stage_end_time(stage);
    if (max_length > 0.0) end = std::min(end, start + max_length);
    if (!(end > start)) {
        throw RangeError("stage " + std::to_string(stage) + " is shorter than the settling guard");
    }
    return {start, end};
}

FitResult fit_stage(const ProtocolRun& run, std::size_t stage, double guard, double max_length) {
    return fit_exponential(run.detected, stage_window(run, stage, guard, max_length));
}

double stage_energy(const ProtocolRun& run, std::size_t stage, double guard, double length) {
    const double start = run.trajectory.stage_start_time(stage) + guard;
    return energy_in_window(run.detected, start, start + length);
}

unsigned default_workers() noexcept {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1u : n;
}

std::vector<double> phase_sweep(const SystemParams& params, const DetectionConfig& detection,
                                const IntegratorOptions& opts, const InterferenceProtocol& proto,
                                const std::vector<double>& phis, unsigned workers) {
    const double guard = settling_guard(detection);
    std::vector<double> energy(phis.size());
    parallel_for(phis.size(), workers, [&](std::size_t i) {
        const PulseSequence seq = preset_interference(proto.theta1, proto.theta2, phis[i],
                                                      proto.t_signal, proto.t_decay,
                                                      proto.signal_amplitude);
        energy[i] = stage_energy(run_protocol(seq, params, detection, opts), 1, guard,
                                 proto.window);
    });
    return energy;
}

DarkDecayResult dark_decay_sweep(const SystemParams& params, const DetectionConfig& detection,
                                 const IntegratorOptions& opts, const DarkDecayProtocol& proto,
                                 const std::vector<double>& taus, unsigned workers) {
    if (taus.size() < kMinTauPoints) {
        throw RankError("dark_decay_sweep: need at least " + std::to_string(kMinTauPoints) +
                        " tau values, got " + std::to_string(taus.size()));
    }
    const double guard = settling_guard(detection);
    DarkDecayResult out;
    out.tau.resize(taus.size());
    out.energy.resize(taus.size());
    parallel_for(taus.size(), workers, [&](std::size_t i) {
        const PulseSequence seq =
            preset_dark_decay(proto.theta1, proto.theta2, proto.phi1_dark, taus[i],
                              proto.t_signal, proto.t_measure, proto.signal_amplitude);
        const ProtocolRun run = run_protocol(seq, params, detection, opts);
        const std::size_t measure = seq.size() - 1;
        out.tau[i] = run.trajectory.stage_start_time(measure) - run.trajectory.stage_end_time(0);
        out.energy[i] = stage_energy(run, measure, guard, proto.window);
    });
    const double origin = *std::min_element(out.tau.begin(), out.tau.end());
    out.fit = fit_exponential_points(out.tau, out.energy, kMinTauPoints, origin);
    return out;
}

FitResult bright_decay(const SystemParams& params, const DetectionConfig& detection,
                       const IntegratorOptions& opts, const InterferenceProtocol& proto) {
    const PulseSequence seq = preset_interference(proto.theta1, proto.theta2, proto.theta1,
                                                  proto.t_signal, proto.t_decay,
                                                  proto.signal_amplitude);
    const ProtocolRun run = run_protocol(seq, params, detection, opts);
    return fit_stage(run, 1, settling_guard(detection), proto.window);
}

}  // namespace omi
