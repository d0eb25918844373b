#include "omi/detection.hpp"

#include "omi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace omi {

DetectionConfig DetectionConfig::for_beat(Beat beat) {
    DetectionConfig cfg;
    cfg.beat = beat;
    cfg.lo_paths = {{beat == Beat::M1 ? 0 : 1, {1.0, 0.0}}};
    return cfg;
}

void DetectionConfig::validate() const {
    if (lo_paths.empty()) throw DomainError("detection: lo_paths must not be empty");
    for (const auto& lo : lo_paths) {
        if (lo.drive < 0 || lo.drive > 1) throw DomainError("detection: LO drive must be 1 or 2");
    }
    if (!(filter_bandwidth_hz > 0.0) || !std::isfinite(filter_bandwidth_hz)) {
        throw DomainError("detection: filter_bandwidth must be > 0");
    }
    if (!(guard_time_constants >= 0.0) || !std::isfinite(guard_time_constants)) {
        throw DomainError("detection: guard_time_constants must be >= 0");
    }
}

void DetectionConfig::validate(const SystemParams& params) const {
    validate();
    const double split_hz = std::abs(angular_to_hz(params.mode_splitting()));
    if (split_hz > 0.0 && filter_bandwidth_hz >= split_hz) {
        throw DomainError("detection: filter_bandwidth must be below Delta_m/2pi = " +
                          std::to_string(split_hz) + " Hz");
    }
    // Fastest mechanical energy decay the filter must pass.
    double fastest = std::max(params.gamma1, params.gamma2);
    if (params.kappa > 0.0) {
        double g2 = 0.0;
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                if (params.coupled(j, k)) g2 += params.G[j][k] * params.G[j][k];
            }
        }
        fastest += 4.0 * g2 / params.kappa;
    }
    if (filter_bandwidth_hz <= angular_to_hz(fastest)) {
        throw DomainError("detection: filter_bandwidth must exceed the fastest decay rate " +
                          std::to_string(angular_to_hz(fastest)) + " Hz");
    }
}

double settling_guard(const DetectionConfig& cfg) {
    return cfg.guard_time_constants / hz_to_angular(cfg.filter_bandwidth_hz);
}

ComplexTrace output_field(const ComplexTrace& alpha, double kappa_ext) {
    if (!(kappa_ext >= 0.0)) throw DomainError("output_field: kappa_ext must be >= 0");
    const double s = std::sqrt(kappa_ext);
    std::vector<cplx> out(alpha.samples());
    for (auto& z : out) z *= s;
    return alpha.with_samples(std::move(out));
}

namespace {

// First-order hold discretization of dy/dt = wc (x - y): exact for inputs that
// are piecewise linear between samples.
struct OnePole {
    double a, b0, b1;

    OnePole(double bandwidth_hz, double dt) {
        const double h = hz_to_angular(bandwidth_hz) * dt;
        a = std::exp(-h);
        const double g = -std::expm1(-h) / h;  // (1 - a) / h
        b0 = 1.0 - g;
        b1 = g - a;
    }
};

}  // namespace

ComplexTrace demodulate(const ComplexTrace& trace, double offset, double bandwidth_hz) {
    if (!(bandwidth_hz > 0.0)) throw DomainError("demodulate: bandwidth must be > 0");
    if (!(std::abs(offset) * trace.dt() < 1.0)) {
        throw SamplingError("demodulate: offset not resolved, |offset| * dt = " +
                            std::to_string(std::abs(offset) * trace.dt()));
    }
    const OnePole f(bandwidth_hz, trace.dt());
    std::vector<cplx> out(trace.size());
    cplx x_prev{};
    cplx y{};
    for (std::size_t n = 0; n < trace.size(); ++n) {
        const cplx x = trace[n] * std::polar(1.0, offset * trace.time(n));
        y = f.a * y + f.b0 * x + f.b1 * x_prev;
        x_prev = x;
        out[n] = y;
    }
    return trace.with_samples(std::move(out));
}

double lo_offset(const SystemParams& params, Beat beat, int drive) {
    // The LO path that matches the beat's own drive reads the omega_s
    // component. The other drive's LO reads the component emitted at
    // omega_s -/+ Delta_m, which rotates as e^{+/- i Delta_m t} in alpha.
    const double dm = params.mode_splitting();
    if (beat == Beat::M1) return drive == 0 ? 0.0 : -dm;
    return drive == 1 ? 0.0 : +dm;
}

ComplexTrace beat_envelope(const ComplexTrace& alpha, const SystemParams& params,
                           const DetectionConfig& cfg) {
    cfg.validate();
    const ComplexTrace emitted = output_field(alpha, params.kappa_ext);
    std::vector<cplx> sum(alpha.size());
    for (const auto& lo : cfg.lo_paths) {
        const ComplexTrace d =
            demodulate(emitted, lo_offset(params, cfg.beat, lo.drive), cfg.filter_bandwidth_hz);
        for (std::size_t n = 0; n < sum.size(); ++n) sum[n] += lo.weight * d[n];
    }
    return alpha.with_samples(std::move(sum));
}

ComplexTrace beat_envelope(const StateTrajectory& traj, const PulseSequence& seq,
                           const SystemParams& params, const DetectionConfig& cfg) {
    cfg.validate();
    const ComplexTrace emitted = output_field(alpha_trace(traj), params.kappa_ext);
    std::vector<cplx> sum(emitted.size());
    for (const auto& lo : cfg.lo_paths) {
        std::vector<cplx> gated(emitted.samples());
        for (std::size_t n = 0; n < gated.size(); ++n) {
            // Boundary samples belong to the later stage.
            gated[n] *= seq.stages()[traj.stage_of_sample(n)].coeffs.drive_scale[lo.drive];
        }
        const ComplexTrace d = demodulate(emitted.with_samples(std::move(gated)),
                                          lo_offset(params, cfg.beat, lo.drive),
                                          cfg.filter_bandwidth_hz);
        for (std::size_t n = 0; n < sum.size(); ++n) sum[n] += lo.weight * d[n];
    }
    return emitted.with_samples(std::move(sum));
}

RealTrace intensity(const ComplexTrace& envelope) {
    std::vector<double> out;
    out.reserve(envelope.size());
    for (const auto& z : envelope.samples()) out.push_back(std::norm(z));
    return envelope.with_samples(std::move(out));
}

double energy_in_window(const RealTrace& tr, double t_start, double t_end) {
    if (!(t_end > t_start)) throw RangeError("energy_in_window: window is empty or inverted");
    const double slack = 1e-9 * tr.dt();
    if (t_start < tr.t0() - slack || t_end > tr.t_end() + slack) {
        throw RangeError("energy_in_window: window [" + std::to_string(t_start) + ", " +
                         std::to_string(t_end) + "] outside trace");
    }
    t_start = std::clamp(t_start, tr.t0(), tr.t_end());
    t_end = std::clamp(t_end, tr.t0(), tr.t_end());

    const auto value_at = [&tr](double t) {
        const double u = (t - tr.t0()) / tr.dt();
        const auto i = std::min(static_cast<std::size_t>(u), tr.size() - 2);
        const double w = u - static_cast<double>(i);
        return (1.0 - w) * tr[i] + w * tr[i + 1];
    };

    // Interior sample indices strictly inside (t_start, t_end).
    const auto first = static_cast<std::size_t>(std::floor((t_start - tr.t0()) / tr.dt())) + 1;
    const auto last_ceil = static_cast<std::size_t>(std::ceil((t_end - tr.t0()) / tr.dt()));
    double t_prev = t_start;
    double v_prev = value_at(t_start);
    double sum = 0.0;
    for (std::size_t i = first; i < last_ceil && i < tr.size(); ++i) {
        const double t = tr.time(i);
        if (t <= t_start || t >= t_end) continue;
        sum += 0.5 * (v_prev + tr[i]) * (t - t_prev);
        t_prev = t;
        v_prev = tr[i];
    }
    sum += 0.5 * (v_prev + value_at(t_end)) * (t_end - t_prev);
    return sum;
}

}  // namespace omi
