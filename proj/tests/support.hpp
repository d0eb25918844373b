#pragma once

#include "omi/model.hpp"
#include "omi/sequence.hpp"
#include "omi/dynamics.hpp"

namespace omi::test {

inline SystemParams system(double c1, double c2, Variant v = Variant::ResonantOnly,
                           double g1_hz = 3.5e3, double g2_hz = 3.6e3) {
    ParamsInput in;
    in.omega_m1_hz = 69.48e6;
    in.omega_m2_hz = 69.66e6;
    in.gamma1_hz = g1_hz;
    in.gamma2_hz = g2_hz;
    in.kappa_hz = 1.6e6;
    in.drives[0].cooperativity = c1;
    in.drives[1].cooperativity = c2;
    in.variant = v;
    return make_params(in);
}

inline Stage stage(double duration, cplx signal, double p1, double p2, double s1, double s2,
                   StageLabel label = StageLabel::Custom) {
    Stage st;
    st.duration = duration;
    st.coeffs.signal_amplitude = signal;
    st.coeffs.drive_phase = {p1, p2};
    st.coeffs.drive_scale = {s1, s2};
    st.label = label;
    return st;
}

inline IntegratorOptions rk4(double dt) {
    IntegratorOptions o;
    o.dt = dt;
    return o;
}

}  // namespace omi::test
