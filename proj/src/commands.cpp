#include "omi/commands.hpp"

#include "omi/analysis.hpp"
#include "omi/csv.hpp"
#include "omi/errors.hpp"
#include "omi/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace omi {

using nlohmann::ordered_json;

namespace {

void prepare(const std::filesystem::path& out) {
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) throw IoError("cannot create " + out.string() + ": " + ec.message());
}

// Full state trajectory; with the adiabatic option alpha is the
// instantaneous cavity steady state.
StateTrajectory run_dynamics(const RunConfig& cfg, const PulseSequence& seq) {
    if (!cfg.integrator.adiabatic) return integrate(seq, cfg.system, StateVector{}, cfg.integrator);
    const MechanicalTrajectory mech =
        integrate_adiabatic(seq, cfg.system, MechanicalState{}, cfg.integrator);
    std::vector<StateVector> states(mech.states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        const MechanicalState& m = mech.states[i];
        const auto& coeffs = seq.stages()[mech.stage_of_sample(i)].coeffs;
        states[i] = {adiabatic_field(m, mech.states.time(i), cfg.system, coeffs), m.beta1, m.beta2};
    }
    return {mech.states.with_samples(std::move(states)), mech.stage_start};
}

// Mean bare damping of the modes whose own drive is on in this stage.
double reference_damping(const SystemParams& p, const Stage& st) {
    double sum = 0.0;
    int n = 0;
    for (int k = 0; k < 2; ++k) {
        if (st.coeffs.drive_scale[k] > 0.0 && p.G[k][k] > 0.0) {
            sum += p.gamma(k);
            ++n;
        }
    }
    return n > 0 ? sum / n : p.gamma_mean();
}

void require_preset(const RunConfig& cfg, Preset want) {
    if (cfg.sequence.preset != want) {
        throw ConfigError("sequence.preset", "this command needs the '" +
                                                 std::string(to_string(want)) + "' preset");
    }
}

}  // namespace

void write_summary(const std::filesystem::path& out, const ordered_json& summary) {
    const auto path = out / "summary.json";
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    f << summary.dump(2) << '\n';
    if (!f) throw IoError("write failed: " + path.string());
}

ordered_json cmd_simulate(const RunConfig& cfg, const CommandOptions& opt) {
    prepare(opt.out);
    const PulseSequence seq = cfg.build_sequence();
    StateTrajectory traj = run_dynamics(cfg, seq);
    ComplexTrace env = beat_envelope(traj, seq, cfg.system, cfg.detection);
    RealTrace det = intensity(env);
    const ProtocolRun run{std::move(traj), std::move(env), std::move(det)};

    const std::size_t dec = cfg.output.decimation;
    {
        CsvWriter w(opt.out / "states.csv",
                    {"t_s", "re_alpha", "im_alpha", "re_b1", "im_b1", "re_b2", "im_b2"});
        const auto& st = run.trajectory.states;
        for (std::size_t i = 0; i < st.size(); i += dec) {
            const StateVector& s = st[i];
            w.row({st.time(i), s.alpha.real(), s.alpha.imag(), s.beta1.real(), s.beta1.imag(),
                   s.beta2.real(), s.beta2.imag()});
        }
        w.close();
    }
    {
        CsvWriter w(opt.out / "detected.csv", {"t_s", "intensity"});
        for (std::size_t i = 0; i < run.detected.size(); i += dec) {
            w.row({run.detected.time(i), run.detected[i]});
        }
        w.close();
    }

    ordered_json summary;
    summary["command"] = "simulate";
    summary["samples"] = run.detected.size();
    summary["dt_s"] = run.detected.dt();
    ordered_json stages = ordered_json::array();
    if (cfg.analysis.fit) {
        const double guard = settling_guard(cfg.detection);
        for (std::size_t i = 0; i < seq.size(); ++i) {
            ordered_json s;
            s["index"] = i;
            s["label"] = std::string(to_string(seq.stages()[i].label));
            try {
                const FitResult f = fit_stage(run, i, guard, cfg.analysis.window);
                const double ref = reference_damping(cfg.system, seq.stages()[i]);
                s["t_start_s"] = f.window.t_start;
                s["t_end_s"] = f.window.t_end;
                s["fitted_rate_hz"] = angular_to_hz(f.rate);
                s["cooperativity_effective"] = effective_cooperativity(f.rate, ref);
                s["rms_residual"] = f.rms_residual;
            } catch (const Error& e) {
                // A stage without a decay (e.g. all drives off) is reported, not fatal.
                s["fit_error"] = e.what();
            }
            stages.push_back(std::move(s));
        }
        const ordered_json& last = stages.back();
        for (const char* key : {"fitted_rate_hz", "cooperativity_effective", "rms_residual"}) {
            if (last.contains(key)) summary[key] = last[key];
        }
    }
    summary["stages"] = std::move(stages);
    write_summary(opt.out, summary);
    return summary;
}

ordered_json cmd_sweep_phase(const RunConfig& cfg, const CommandOptions& opt) {
    require_preset(cfg, Preset::Interference);
    if (cfg.sweep.phi.size() < 5) {
        throw ConfigError("sweep.phi_rad", "need at least 5 phases for a fringe fit (rank), got " +
                                               std::to_string(cfg.sweep.phi.size()));
    }
    prepare(opt.out);
    const std::vector<double> energy = phase_sweep(cfg.system, cfg.detection, cfg.integrator,
                                                   cfg.interference(), cfg.sweep.phi, opt.workers);
    CsvWriter w(opt.out / "fringe.csv", {"phi_rad", "energy"});
    for (std::size_t i = 0; i < energy.size(); ++i) w.row({cfg.sweep.phi[i], energy[i]});
    w.close();

    const FringeResult fr = fit_fringe(cfg.sweep.phi, energy);
    ordered_json summary;
    summary["command"] = "sweep-phase";
    summary["points"] = energy.size();
    summary["visibility"] = fr.visibility;
    if (fr.phi0_defined) summary["phi0_rad"] = fr.phi0;
    summary["mean"] = fr.mean;
    summary["contrast"] = fr.contrast;
    summary["rms_residual"] = fr.rms_residual;
    write_summary(opt.out, summary);
    return summary;
}

ordered_json cmd_dark_decay(const RunConfig& cfg, const CommandOptions& opt) {
    require_preset(cfg, Preset::DarkDecay);
    if (cfg.sweep.tau.size() < kMinTauPoints) {
        throw ConfigError("sweep.tau_s", "need at least " + std::to_string(kMinTauPoints) +
                                             " tau values, got " +
                                             std::to_string(cfg.sweep.tau.size()));
    }
    prepare(opt.out);
    const DarkDecayResult d = dark_decay_sweep(cfg.system, cfg.detection, cfg.integrator,
                                               cfg.dark_decay(), cfg.sweep.tau, opt.workers);
    CsvWriter w(opt.out / "dark_decay.csv", {"tau_s", "energy"});
    for (std::size_t i = 0; i < d.tau.size(); ++i) w.row({d.tau[i], d.energy[i]});
    w.close();

    ordered_json summary;
    summary["command"] = "dark-decay";
    summary["points"] = d.tau.size();
    summary["gamma_D_hz"] = angular_to_hz(d.fit.rate);
    summary["rms_residual"] = d.fit.rms_residual;
    if (cfg.analysis.bright_reference) {
        SystemParams bright_sys = cfg.system;
        if (cfg.analysis.bright_variant) {
            ParamsInput in = cfg.system_input;
            in.variant = *cfg.analysis.bright_variant;
            bright_sys = make_params(in);
        }
        InterferenceProtocol proto = cfg.interference();
        proto.t_decay = cfg.sequence.t_measure;
        const FitResult b = bright_decay(bright_sys, cfg.detection, cfg.integrator, proto);
        summary["bright_variant"] =
            bright_sys.variant == Variant::Full ? "full" : "resonant_only";
        summary["gamma_B_hz"] = angular_to_hz(b.rate);
        if (b.rate > cfg.system.gamma_mean()) {
            summary["suppression_fraction"] =
                suppression_metric(b.rate, d.fit.rate, cfg.system.gamma1, cfg.system.gamma2);
        }
    }
    write_summary(opt.out, summary);
    return summary;
}

ordered_json cmd_spectrum(const RunConfig& cfg, const CommandOptions& opt) {
    if (cfg.system.variant != Variant::ResonantOnly) {
        throw ConfigError("system.variant", "the closed-form spectrum needs resonant_only");
    }
    prepare(opt.out);
    const SpectrumConfig& sc = cfg.spectrum;
    std::vector<double> x(sc.points);
    for (std::size_t i = 0; i < sc.points; ++i) {
        const double hz = sc.min_hz + (sc.max_hz - sc.min_hz) * static_cast<double>(i) /
                                          static_cast<double>(sc.points - 1);
        x[i] = hz_to_angular(hz);
    }
    const std::array<double, 2> offsets{hz_to_angular(sc.two_photon_offsets_hz[0]),
                                        hz_to_angular(sc.two_photon_offsets_hz[1])};
    const std::vector<double> r =
        omit_spectrum(cfg.system, x, offsets, cfg.sequence.signal_amplitude);
    CsvWriter w(opt.out / "spectrum.csv", {"detuning_hz", "response"});
    for (std::size_t i = 0; i < r.size(); ++i) w.row({angular_to_hz(x[i]), r[i]});
    w.close();

    const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
    ordered_json summary;
    summary["command"] = "spectrum";
    summary["points"] = r.size();
    summary["response_max"] = *hi;
    summary["response_min"] = *lo;
    summary["detuning_at_min_hz"] = angular_to_hz(x[static_cast<std::size_t>(lo - r.begin())]);
    write_summary(opt.out, summary);
    return summary;
}

ordered_json selftest_summary(const SelftestReport& rep) {
    ordered_json summary;
    summary["command"] = "selftest";
    summary["passed"] = rep.passed();
    ordered_json checks = ordered_json::array();
    for (const auto& c : rep.checks) {
        checks.push_back({{"name", c.name}, {"passed", c.outcome.passed}, {"detail", c.outcome.detail}});
    }
    summary["checks"] = std::move(checks);
    return summary;
}

}  // namespace omi
