#include "omi/config.hpp"

#include "omi/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace omi {

using nlohmann::json;

std::string_view to_string(Preset p) noexcept {
    switch (p) {
        case Preset::TwoMode: return "two_mode";
        case Preset::Interference: return "interference";
        case Preset::DarkDecay: return "dark_decay";
        case Preset::Custom: return "custom";
    }
    return "custom";
}

namespace {

// Walks one JSON object, remembering which keys were read so the rest can be
// reported as unknown.
class Block {
  public:
    Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string at(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    bool has(std::string_view key) {
        seen_.insert(std::string(key));
        return j_.contains(key);
    }

    const json& raw(std::string_view key) {
        seen_.insert(std::string(key));
        return j_.at(std::string(key));
    }

    std::optional<double> number(std::string_view key) {
        if (!has(key)) return std::nullopt;
        const json& v = j_.at(std::string(key));
        if (!v.is_number()) throw ConfigError(at(key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(at(key), "must be finite");
        return x;
    }

    void number(std::string_view key, double& out) {
        if (auto v = number(key)) out = *v;
    }

    void positive(std::string_view key, double& out) {
        if (auto v = number(key)) {
            if (!(*v > 0.0)) throw ConfigError(at(key), "must be > 0");
            out = *v;
        }
    }

    void non_negative(std::string_view key, double& out) {
        if (auto v = number(key)) {
            if (!(*v >= 0.0)) throw ConfigError(at(key), "must be >= 0");
            out = *v;
        }
    }

    void count(std::string_view key, std::size_t& out, std::size_t min) {
        if (!has(key)) return;
        const json& v = j_.at(std::string(key));
        if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min)) {
            throw ConfigError(at(key), "expected an integer >= " + std::to_string(min));
        }
        out = v.get<std::size_t>();
    }

    void boolean(std::string_view key, bool& out) {
        if (!has(key)) return;
        const json& v = j_.at(std::string(key));
        if (!v.is_boolean()) throw ConfigError(at(key), "expected true or false");
        out = v.get<bool>();
    }

    std::optional<std::string> string(std::string_view key) {
        if (!has(key)) return std::nullopt;
        const json& v = j_.at(std::string(key));
        if (!v.is_string()) throw ConfigError(at(key), "expected a string");
        return v.get<std::string>();
    }

    // A real number or a [re, im] pair.
    void complex(std::string_view key, cplx& out) {
        if (!has(key)) return;
        out = parse_complex(j_.at(std::string(key)), at(key));
    }

    std::vector<double> numbers(std::string_view key) {
        const json& v = raw(key);
        if (!v.is_array()) throw ConfigError(at(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string p = at(key) + "[" + std::to_string(i) + "]";
            if (!v[i].is_number()) throw ConfigError(p, "expected a number");
            out.push_back(v[i].get<double>());
            if (!std::isfinite(out.back())) throw ConfigError(p, "must be finite");
        }
        return out;
    }

    void pair(std::string_view key, std::array<double, 2>& out) {
        if (!has(key)) return;
        const std::vector<double> v = numbers(key);
        if (v.size() != 2) throw ConfigError(at(key), "expected two numbers");
        out = {v[0], v[1]};
    }

    void finish() const {
        for (const auto& [k, v] : j_.items()) {
            if (!seen_.contains(k)) throw ConfigError(at(k), "unknown key");
        }
    }

    static cplx parse_complex(const json& v, const std::string& path) {
        if (v.is_number()) return {v.get<double>(), 0.0};
        if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
            return {v[0].get<double>(), v[1].get<double>()};
        }
        throw ConfigError(path, "expected a number or [re, im]");
    }

  private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

Variant parse_variant(const std::string& s, const std::string& path) {
    if (s == "resonant_only") return Variant::ResonantOnly;
    if (s == "full") return Variant::Full;
    throw ConfigError(path, "unknown variant '" + s + "' (resonant_only, full)");
}

void parse_system(const json& j, RunConfig& cfg) {
    Block b(j, "system");
    ParamsInput& in = cfg.system_input;
    auto required = [&](std::string_view key, double& out) {
        if (!b.has(key)) throw ConfigError(b.at(key), "required");
        b.number(key, out);
    };
    required("omega_m1_hz", in.omega_m1_hz);
    required("omega_m2_hz", in.omega_m2_hz);
    required("gamma1_hz", in.gamma1_hz);
    required("gamma2_hz", in.gamma2_hz);
    required("kappa_hz", in.kappa_hz);
    in.kappa_ext_hz = b.number("kappa_ext_hz");
    b.number("Delta_hz", in.Delta_hz);
    b.number("delta_hz", in.delta_hz);
    b.number("rho", in.rho);
    in.g_mode2_drive1_hz = b.number("G_mode2_drive1_hz");
    in.g_mode1_drive2_hz = b.number("G_mode1_drive2_hz");
    if (auto v = b.string("variant")) in.variant = parse_variant(*v, b.at("variant"));

    if (!b.has("drives")) throw ConfigError(b.at("drives"), "required");
    const json& drives = b.raw("drives");
    if (!drives.is_array() || drives.size() != 2) {
        throw ConfigError(b.at("drives"), "expected an array of two drive objects");
    }
    for (std::size_t k = 0; k < 2; ++k) {
        Block d(drives[k], "system.drives[" + std::to_string(k) + "]");
        in.drives[k].g_hz = d.number("G_hz");
        in.drives[k].cooperativity = d.number("C");
        if (in.drives[k].g_hz.has_value() == in.drives[k].cooperativity.has_value()) {
            throw ConfigError(d.at("C"), "give exactly one of G_hz and C");
        }
        d.finish();
    }
    b.finish();

    try {
        cfg.system = make_params(in);
    } catch (const DomainError& e) {
        throw ConfigError("system", e.what());
    }
}

StageLabel parse_label(const std::string& s, const std::string& path) {
    try {
        return stage_label_from_string(s);
    } catch (const DomainError& e) {
        throw ConfigError(path, e.what());
    }
}

void parse_sequence(const json& j, RunConfig& cfg) {
    Block b(j, "sequence");
    SequenceSpec& s = cfg.sequence;
    const auto preset = b.string("preset");
    if (!preset) throw ConfigError(b.at("preset"), "required");
    if (*preset == "two_mode") {
        s.preset = Preset::TwoMode;
    } else if (*preset == "interference") {
        s.preset = Preset::Interference;
    } else if (*preset == "dark_decay") {
        s.preset = Preset::DarkDecay;
    } else if (*preset == "custom") {
        s.preset = Preset::Custom;
    } else {
        throw ConfigError(b.at("preset"), "unknown preset '" + *preset +
                                              "' (two_mode, interference, dark_decay, custom)");
    }

    if (s.preset == Preset::Custom) {
        if (!b.has("stages")) throw ConfigError(b.at("stages"), "required for the custom preset");
        const json& st = b.raw("stages");
        if (!st.is_array() || st.empty()) {
            throw ConfigError(b.at("stages"), "expected a non-empty array of stages");
        }
        for (std::size_t i = 0; i < st.size(); ++i) {
            Block sb(st[i], "sequence.stages[" + std::to_string(i) + "]");
            Stage stage;
            if (!sb.has("duration_s")) throw ConfigError(sb.at("duration_s"), "required");
            sb.positive("duration_s", stage.duration);
            sb.complex("signal_amplitude", stage.coeffs.signal_amplitude);
            sb.pair("drive_phase_rad", stage.coeffs.drive_phase);
            sb.pair("drive_scale", stage.coeffs.drive_scale);
            for (int k = 0; k < 2; ++k) {
                const double v = stage.coeffs.drive_scale[k];
                if (!(v >= 0.0 && v <= 1.0)) {
                    throw ConfigError(sb.at("drive_scale"), "entries must lie in [0, 1]");
                }
            }
            if (auto l = sb.string("label")) stage.label = parse_label(*l, sb.at("label"));
            sb.finish();
            s.stages.push_back(stage);
        }
    } else {
        b.number("theta1_rad", s.theta1);
        b.number("theta2_rad", s.theta2);
        b.number("phi1_rad", s.phi1);
        b.number("phi1_dark_rad", s.phi1_dark);
        b.non_negative("tau_s", s.tau);
        b.positive("t_signal_s", s.t_signal);
        b.positive("t_decay_s", s.t_decay);
        b.positive("t_measure_s", s.t_measure);
        b.complex("signal_amplitude", s.signal_amplitude);
    }
    b.finish();
}

void parse_detection(const json& j, RunConfig& cfg) {
    Block b(j, "detection");
    DetectionConfig& d = cfg.detection;
    if (auto v = b.string("beat")) {
        if (*v == "m1") {
            d = DetectionConfig::for_beat(Beat::M1);
        } else if (*v == "m2") {
            d = DetectionConfig::for_beat(Beat::M2);
        } else {
            throw ConfigError(b.at("beat"), "unknown beat '" + *v + "' (m1, m2)");
        }
    }
    if (b.has("lo_paths")) {
        const json& lo = b.raw("lo_paths");
        if (!lo.is_array() || lo.empty()) {
            throw ConfigError(b.at("lo_paths"), "expected a non-empty array");
        }
        d.lo_paths.clear();
        for (std::size_t i = 0; i < lo.size(); ++i) {
            Block lb(lo[i], "detection.lo_paths[" + std::to_string(i) + "]");
            LoPath path;
            double drive = 0.0;
            if (!lb.has("drive")) throw ConfigError(lb.at("drive"), "required");
            lb.number("drive", drive);
            if (drive != 1.0 && drive != 2.0) throw ConfigError(lb.at("drive"), "must be 1 or 2");
            path.drive = static_cast<int>(drive) - 1;
            lb.complex("weight", path.weight);
            lb.finish();
            d.lo_paths.push_back(path);
        }
    }
    b.positive("filter_bandwidth_hz", d.filter_bandwidth_hz);
    b.non_negative("guard_time_constants", d.guard_time_constants);
    b.finish();
}

void parse_integrator(const json& j, RunConfig& cfg) {
    Block b(j, "integrator");
    IntegratorOptions& o = cfg.integrator;
    if (auto m = b.string("method")) {
        if (*m == "rk4") {
            o.method = Method::FixedRk4;
        } else if (*m == "adaptive") {
            o.method = Method::Adaptive;
        } else {
            throw ConfigError(b.at("method"), "unknown method '" + *m + "' (rk4, adaptive)");
        }
    }
    b.positive("dt_s", o.dt);
    b.boolean("adiabatic", o.adiabatic);
    b.positive("rel_tol", o.rel_tol);
    b.positive("abs_tol", o.abs_tol);
    b.finish();
}

void parse_analysis(const json& j, RunConfig& cfg) {
    Block b(j, "analysis");
    AnalysisConfig& a = cfg.analysis;
    b.boolean("fit", a.fit);
    b.positive("window_s", a.window);
    b.boolean("bright_reference", a.bright_reference);
    if (auto v = b.string("bright_variant")) {
        a.bright_variant = parse_variant(*v, b.at("bright_variant"));
    }
    b.finish();
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n, bool include_end) {
    std::vector<double> g(n);
    const double div = include_end ? static_cast<double>(n - 1) : static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / div;
    return g;
}

void parse_sweep(const json& j, RunConfig& cfg) {
    Block b(j, "sweep");
    SweepConfig& s = cfg.sweep;
    const bool phi_list = b.has("phi_rad");
    const bool phi_n = b.has("phi_points");
    if (phi_list && phi_n) throw ConfigError(b.at("phi_points"), "give phi_rad or phi_points, not both");
    if (phi_list) s.phi = b.numbers("phi_rad");
    if (phi_n) {
        std::size_t n = 0;
        b.count("phi_points", n, 1);
        s.phi = uniform_grid(0.0, kTwoPi, n, false);
    }

    const bool tau_list = b.has("tau_s");
    const bool tau_n = b.has("tau_points");
    const bool tau_max = b.has("tau_max_s");
    if (tau_list && (tau_n || tau_max)) {
        throw ConfigError(b.at("tau_points"), "give tau_s or tau_points/tau_max_s, not both");
    }
    if (tau_list) {
        s.tau = b.numbers("tau_s");
        for (std::size_t i = 0; i < s.tau.size(); ++i) {
            if (!(s.tau[i] >= 0.0)) {
                throw ConfigError(b.at("tau_s") + "[" + std::to_string(i) + "]", "must be >= 0");
            }
        }
    }
    if (tau_n || tau_max) {
        std::size_t n = 21;
        double hi = 0.4e-3;
        b.count("tau_points", n, 2);
        b.positive("tau_max_s", hi);
        s.tau = uniform_grid(0.0, hi, n, true);
    }
    b.finish();
}

void parse_spectrum(const json& j, RunConfig& cfg) {
    Block b(j, "spectrum");
    SpectrumConfig& s = cfg.spectrum;
    b.number("min_hz", s.min_hz);
    b.number("max_hz", s.max_hz);
    b.count("points", s.points, 2);
    b.pair("two_photon_offsets_hz", s.two_photon_offsets_hz);
    if (!(s.max_hz > s.min_hz)) throw ConfigError(b.at("max_hz"), "must exceed min_hz");
    b.finish();
}

void parse_output(const json& j, RunConfig& cfg) {
    Block b(j, "output");
    b.count("decimation", cfg.output.decimation, 1);
    b.finish();
}

}  // namespace

PulseSequence RunConfig::build_sequence() const {
    const SequenceSpec& s = sequence;
    switch (s.preset) {
        case Preset::TwoMode:
            return preset_two_mode(s.theta1, s.t_signal, s.t_decay, s.signal_amplitude);
        case Preset::Interference:
            return preset_interference(s.theta1, s.theta2, s.phi1, s.t_signal, s.t_decay,
                                       s.signal_amplitude);
        case Preset::DarkDecay:
            return preset_dark_decay(s.theta1, s.theta2, s.phi1_dark, s.tau, s.t_signal,
                                     s.t_measure, s.signal_amplitude);
        case Preset::Custom:
            return PulseSequence(s.stages);
    }
    throw DomainError("unknown preset");
}

InterferenceProtocol RunConfig::interference() const {
    InterferenceProtocol p;
    p.theta1 = sequence.theta1;
    p.theta2 = sequence.theta2;
    p.t_signal = sequence.t_signal;
    p.t_decay = sequence.t_decay;
    p.signal_amplitude = sequence.signal_amplitude;
    p.window = analysis.window;
    return p;
}

DarkDecayProtocol RunConfig::dark_decay() const {
    DarkDecayProtocol p;
    p.theta1 = sequence.theta1;
    p.theta2 = sequence.theta2;
    p.phi1_dark = sequence.phi1_dark;
    p.t_signal = sequence.t_signal;
    p.t_measure = sequence.t_measure;
    p.signal_amplitude = sequence.signal_amplitude;
    p.window = analysis.window;
    return p;
}

RunConfig parse_config(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
    }
    RunConfig cfg;
    Block b(root, "");
    if (!b.has("system")) throw ConfigError("system", "required");
    parse_system(b.raw("system"), cfg);
    if (!b.has("sequence")) throw ConfigError("sequence", "required");
    parse_sequence(b.raw("sequence"), cfg);
    if (b.has("detection")) parse_detection(b.raw("detection"), cfg);
    if (b.has("integrator")) parse_integrator(b.raw("integrator"), cfg);
    if (b.has("analysis")) parse_analysis(b.raw("analysis"), cfg);
    if (b.has("sweep")) parse_sweep(b.raw("sweep"), cfg);
    if (b.has("spectrum")) parse_spectrum(b.raw("spectrum"), cfg);
    if (b.has("output")) parse_output(b.raw("output"), cfg);
    b.finish();

    if (cfg.sweep.phi.empty()) cfg.sweep.phi = uniform_grid(0.0, kTwoPi, 24, false);
    if (cfg.sweep.tau.empty()) cfg.sweep.tau = uniform_grid(0.0, 0.4e-3, 21, true);

    // Cross-block checks, still before any integration.
    try {
        (void)cfg.build_sequence();
    } catch (const DomainError& e) {
        throw ConfigError("sequence", e.what());
    }
    try {
        cfg.detection.validate(cfg.system);
    } catch (const DomainError& e) {
        throw ConfigError("detection", e.what());
    }
    if (cfg.integrator.dt == 0.0) {
        try {
            cfg.integrator.dt = default_time_step(cfg.system);
        } catch (const DomainError& e) {
            throw ConfigError("integrator.dt_s", e.what());
        }
    }
    try {
        cfg.integrator.validate();
    } catch (const DomainError& e) {
        throw ConfigError("integrator", e.what());
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace omi
