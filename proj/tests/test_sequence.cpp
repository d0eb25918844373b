#include "omi/errors.hpp"
#include "omi/sequence.hpp"

#include "support.hpp"

#include <doctest.h>

#include <numbers>

using namespace omi;
using omi::test::stage;

TEST_CASE("two-mode preset") {
    const PulseSequence s = preset_two_mode(0.0, 0.5e-3, 1.0e-3, 1.0);
    REQUIRE(s.size() == 2);
    CHECK(s.total_duration() == doctest::Approx(1.5e-3));
    CHECK(s.stages()[0].label == StageLabel::Excitation);
    CHECK(s.stages()[0].coeffs.signal_amplitude == cplx(1.0));
    CHECK(s.stages()[0].coeffs.drive_scale[0] == 1.0);
    CHECK(s.stages()[0].coeffs.drive_scale[1] == 0.0);
    CHECK(s.stages()[1].coeffs.signal_amplitude == cplx(0.0));
    CHECK(s.stages()[1].coeffs.drive_phase[0] == 0.0);
    CHECK_NOTHROW(preset_two_mode(1.3, 0.5e-3, 1e-3, 0.0));
    CHECK_THROWS_AS(preset_two_mode(0.0, 0.0, 1e-3, 1.0), DomainError);
}

TEST_CASE("interference preset carries drive 2 through") {
    const PulseSequence s = preset_interference(0.1, 0.7, 2.0, 0.5e-3, 1e-3, 1.0);
    REQUIRE(s.size() == 2);
    CHECK(s.stages()[0].coeffs.drive_phase == std::array<double, 2>{0.1, 0.7});
    CHECK(s.stages()[1].coeffs.drive_phase == std::array<double, 2>{2.0, 0.7});
    CHECK(s.stages()[1].label == StageLabel::Coupling);
    CHECK(s.stages()[1].coeffs.drive_scale == std::array<double, 2>{1.0, 1.0});
}

TEST_CASE("dark-decay preset") {
    const double pi = std::numbers::pi;
    const PulseSequence s = preset_dark_decay(0.0, 0.0, pi, 0.2e-3, 0.5e-3, 1e-3, 1.0);
    REQUIRE(s.size() == 3);
    CHECK(s.stages()[1].duration == doctest::Approx(0.2e-3));
    CHECK(s.stages()[1].coeffs.drive_phase[0] == doctest::Approx(pi));
    CHECK(s.stages()[2].coeffs.drive_phase[0] == 0.0);
    CHECK(s.stages()[2].label == StageLabel::Measurement);
    CHECK(s.total_duration() == doctest::Approx(1.7e-3));

    // tau = 0 drops the coupling stage.
    const PulseSequence z = preset_dark_decay(0.0, 0.0, pi, 0.0, 0.5e-3, 1e-3, 1.0);
    CHECK(z.size() == 2);
    CHECK(z.stages()[1].label == StageLabel::Measurement);
    CHECK_THROWS_AS(preset_dark_decay(0.0, 0.0, pi, -1e-6, 0.5e-3, 1e-3, 1.0), DomainError);

    double prev = 0.0;
    for (int i = 1; i <= 8; ++i) {
        const PulseSequence t = preset_dark_decay(0, 0, pi, 0.05e-3 * i, 0.5e-3, 1e-3, 1.0);
        CHECK(t.size() == 3);
        CHECK(t.total_duration() > prev);
        prev = t.total_duration();
    }
}

TEST_CASE("coefficients_at is right-continuous on a closed interval") {
    const PulseSequence s({stage(1.0, 1.0, 0, 0, 1, 0), stage(2.0, 0.0, 1, 0, 1, 0),
                           stage(0.5, 0.0, 2, 0, 1, 1)});
    CHECK(s.stage_index_at(0.0) == 0);
    CHECK(s.stage_index_at(1.0) == 1);
    CHECK(s.stage_index_at(3.0) == 2);
    CHECK(s.stage_index_at(3.5) == 2);
    CHECK(s.coefficients_at(2.0).drive_phase[0] == 1.0);
    CHECK_THROWS_AS(s.stage_index_at(-1e-9), RangeError);
    CHECK_THROWS_AS(s.stage_index_at(3.5 + 1e-9), RangeError);

    // Exactly size() - 1 discontinuities on a fine grid.
    int jumps = 0;
    for (int i = 1; i <= 3500; ++i) {
        if (s.stage_index_at(i * 1e-3) != s.stage_index_at((i - 1) * 1e-3)) ++jumps;
    }
    CHECK(jumps == 2);
}

TEST_CASE("stage invariants") {
    CHECK_THROWS_AS(PulseSequence({}), DomainError);
    CHECK_THROWS_AS(PulseSequence({stage(0.0, 0.0, 0, 0, 1, 1)}), DomainError);
    CHECK_THROWS_AS(PulseSequence({stage(1.0, 0.0, 0, 0, 1.5, 1)}), DomainError);
    CHECK_THROWS_AS(PulseSequence({stage(1.0, 0.0, 0, 0, -0.1, 1)}), DomainError);
}

TEST_CASE("stage labels round-trip") {
    for (auto l : {StageLabel::Excitation, StageLabel::Coupling, StageLabel::Measurement,
                   StageLabel::Custom}) {
        CHECK(stage_label_from_string(to_string(l)) == l);
    }
    CHECK_THROWS_AS(stage_label_from_string("ringdown"), DomainError);
}
