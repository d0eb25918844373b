#include "omi/config.hpp"
#include "omi/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <string>

using namespace omi;

namespace {

const std::string kBase = R"({
  "system": {"omega_m1_hz": 69.48e6, "omega_m2_hz": 69.66e6, "gamma1_hz": 3500,
             "gamma2_hz": 3600, "kappa_hz": 1.6e6, "drives": [{"C": 1.6}, {"C": 0}]},
  "sequence": {"preset": "two_mode"}
})";

std::string error_path(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "<no error>";
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto at = s.find(from);
    REQUIRE(at != std::string::npos);
    return s.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("shipped configs load") {
    int n = 0;
    for (const auto& e : std::filesystem::directory_iterator(OMI_CONFIG_DIR)) {
        if (e.path().extension() != ".json") continue;
        CAPTURE(e.path().string());
        CHECK_NOTHROW(load_config(e.path()));
        ++n;
    }
    CHECK(n >= 5);
}

TEST_CASE("minimal config and defaults") {
    const RunConfig c = parse_config(kBase);
    CHECK(c.system.kappa_ext == doctest::Approx(0.5 * c.system.kappa));
    CHECK(c.sequence.preset == Preset::TwoMode);
    CHECK(c.output.decimation == 100);
    CHECK(c.integrator.dt == doctest::Approx(default_time_step(c.system)));
    CHECK(c.build_sequence().size() == 2);
    CHECK(c.sweep.phi.size() == 24);
    CHECK(c.sweep.tau.size() == 21);
    CHECK(c.detection.lo_paths.size() == 1);
}

TEST_CASE("errors name the offending key") {
    CHECK(error_path(replace(kBase, "3500", "\"fast\"")) == "system.gamma1_hz");
    CHECK(error_path(replace(kBase, "\"gamma2_hz\": 3600,", "")) == "system.gamma2_hz");
    CHECK(error_path(replace(kBase, "\"kappa_hz\"", "\"kapa_hz\": 1, \"kappa_hz\"")) ==
          "system.kapa_hz");
    CHECK(error_path(replace(kBase, "{\"C\": 1.6}", "{\"C\": 1.6, \"G_hz\": 1e3}")).rfind(
              "system.drives", 0) == 0);
    CHECK(error_path(replace(kBase, "two_mode", "three_mode")) == "sequence.preset");
    CHECK(error_path(replace(kBase, "\"preset\": \"two_mode\"",
                             "\"preset\": \"two_mode\"}, \"detection\": {\"lo_paths\": "
                             "[{\"drive\": 3}]")).rfind("detection", 0) == 0);
    CHECK(error_path("{ not json") == "<root>");
    CHECK(error_path(replace(kBase, "\"preset\": \"two_mode\"",
                             "\"preset\": \"two_mode\"}, \"integrator\": {\"dt_s\": -1e-6")).rfind(
              "integrator", 0) == 0);
    CHECK(error_path(replace(kBase, "\"preset\": \"two_mode\"",
                             "\"preset\": \"dark_decay\", \"tau_s\": -1e-6")).rfind("sequence", 0) ==
          0);
}

TEST_CASE("missing file is a config error") {
    CHECK_THROWS_AS(load_config("/nonexistent/omi.json"), ConfigError);
}
