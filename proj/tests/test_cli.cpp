#include <json.hpp>

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::path(OMI_TEST_WORK_DIR) / "cli";

int run(const std::string& args) {
    const std::string cmd = std::string(OMI_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config(const std::string& name) { return (fs::path(OMI_CONFIG_DIR) / name).string(); }

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

std::string first_line(const fs::path& p) {
    std::ifstream f(p);
    std::string line;
    std::getline(f, line);
    return line;
}

fs::path write_config(const std::string& name, const std::string& text) {
    fs::create_directories(kWork);
    const fs::path p = kWork / name;
    std::ofstream(p) << text;
    return p;
}

const std::string kSmall = R"({
  "system": {"omega_m1_hz": 69.48e6, "omega_m2_hz": 69.66e6, "gamma1_hz": 3500,
             "gamma2_hz": 3600, "kappa_hz": 1.6e6, "drives": [{"C": 1.6}, {"C": 0}]},
  "sequence": {"preset": "two_mode", "t_signal_s": 1e-4, "t_decay_s": 2e-4}
})";

}  // namespace

TEST_CASE("simulate writes its files deterministically") {
    const fs::path cfg = write_config("small.json", kSmall);
    const fs::path a = kWork / "sim_a", b = kWork / "sim_b";
    fs::remove_all(a);
    fs::remove_all(b);
    REQUIRE(run("simulate --config " + cfg.string() + " --out " + a.string()) == 0);
    REQUIRE(run("simulate --config " + cfg.string() + " --out " + b.string() + " --workers 3") == 0);
    for (const char* f : {"states.csv", "detected.csv", "summary.json"}) {
        CAPTURE(f);
        CHECK(slurp(a / f) == slurp(b / f));
    }
    CHECK(first_line(a / "states.csv") == "t_s,re_alpha,im_alpha,re_b1,im_b1,re_b2,im_b2");
    CHECK(first_line(a / "detected.csv") == "t_s,intensity");
    const auto s = nlohmann::json::parse(slurp(a / "summary.json"));
    CHECK(s.contains("fitted_rate_hz"));
    CHECK(s.contains("cooperativity_effective"));
    CHECK(s.contains("rms_residual"));
    CHECK(s["fitted_rate_hz"].get<double>() == doctest::Approx(9.1e3).epsilon(0.01));
}

TEST_CASE("sweep-phase, dark-decay and spectrum outputs") {
    const fs::path out = kWork / "spec";
    fs::remove_all(out);
    REQUIRE(run("spectrum --config " + config("spectrum.json") + " --out " + out.string()) == 0);
    CHECK(first_line(out / "spectrum.csv") == "detuning_hz,response");

    const fs::path fringe_cfg = write_config("fringe.json", R"({
  "system": {"omega_m1_hz": 69.48e6, "omega_m2_hz": 69.66e6, "gamma1_hz": 3500,
             "gamma2_hz": 3600, "kappa_hz": 1.6e6, "drives": [{"C": 1.3}, {"C": 1.0}]},
  "sequence": {"preset": "interference", "t_signal_s": 1e-4, "t_decay_s": 1e-4},
  "analysis": {"window_s": 5e-5},
  "sweep": {"phi_points": 6}
})");
    const fs::path f = kWork / "fringe";
    fs::remove_all(f);
    REQUIRE(run("sweep-phase --config " + fringe_cfg.string() + " --out " + f.string()) == 0);
    CHECK(first_line(f / "fringe.csv") == "phi_rad,energy");
    const auto s = nlohmann::json::parse(slurp(f / "summary.json"));
    CHECK(s.contains("visibility"));
    CHECK(s.contains("phi0_rad"));

    const fs::path dark_cfg = write_config("dark.json", R"({
  "system": {"omega_m1_hz": 69.48e6, "omega_m2_hz": 69.66e6, "gamma1_hz": 3500,
             "gamma2_hz": 3600, "kappa_hz": 1.6e6,
             "drives": [{"G_hz": 38609.639}, {"G_hz": 38609.639}]},
  "sequence": {"preset": "dark_decay", "t_signal_s": 1e-4, "t_measure_s": 1e-4},
  "analysis": {"window_s": 5e-5},
  "sweep": {"tau_points": 5, "tau_max_s": 1e-4}
})");
    const fs::path d = kWork / "dark";
    fs::remove_all(d);
    REQUIRE(run("dark-decay --config " + dark_cfg.string() + " --out " + d.string()) == 0);
    CHECK(first_line(d / "dark_decay.csv") == "tau_s,energy");
    const auto ds = nlohmann::json::parse(slurp(d / "summary.json"));
    for (const char* k : {"gamma_D_hz", "gamma_B_hz", "suppression_fraction", "rms_residual"}) {
        CAPTURE(k);
        CHECK(ds.contains(k));
    }
}

TEST_CASE("exit codes") {
    const fs::path out = kWork / "rc";
    CHECK(run("selftest") == 0);
    CHECK(run("simulate --config /nonexistent.json --out " + out.string()) == 2);
    CHECK(run("frobnicate") == 2);

    const fs::path bad = write_config("bad.json", R"({"system": {"gamma1_hz": "fast"}})");
    CHECK(run("simulate --config " + bad.string() + " --out " + out.string()) == 2);
    // Wrong preset for the command.
    CHECK(run("sweep-phase --config " + config("two_mode.json") + " --out " + out.string()) == 2);

    // A step far past the stability bound is a numerical failure.
    std::string coarse = kSmall;
    coarse.insert(coarse.rfind('}'), R"(, "integrator": {"dt_s": 1e-6})");
    const fs::path c = write_config("coarse.json", coarse);
    CHECK(run("simulate --config " + c.string() + " --out " + out.string()) == 3);
}
