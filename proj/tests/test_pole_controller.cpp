#include <doctest.h>

#include <cmath>

#include "gustnav/pole_controller.hpp"
#include "gustnav/rng.hpp"
#include "gustnav/vehicle.hpp"

using namespace gustnav;

TEST_SUITE_BEGIN("pole_controller");

namespace {

WindField uniform_wind(const Vec3& w) {
    WindField f;
    f.origin = {-200, -200, -200};
    f.spacing = {200, 200, 200};
    f.dims = {3, 3, 3};
    f.envelope_min = -20;
    f.envelope_max = 20;
    f.velocities.assign(f.vertex_count(), w);
    return f;
}

// Closed loop: PID acceleration -> actuator inversion -> vehicle step.
MavState closed_loop_step(MavState s, ControllerParams& ctrl, const Vec3& target,
                          const WindField& wind, const VehicleParams& vp) {
    const Vec3 u = ctrl.control_accel(s.position - target, s.velocity, vp.dt_control);
    const ActuatorCmd cmd = accel_to_lowlevel(u, s.attitude.yaw, vp);
    return step(s, cmd, wind, vp);
}

}  // namespace

TEST_CASE("triple pole at -1 gives binomial coefficients") {
    const AxisGains g = gains_from_taus({1.0, 1.0, 1.0});
    CHECK(g.ki == doctest::Approx(1.0));
    CHECK(g.kp == doctest::Approx(3.0));
    CHECK(g.kd == doctest::Approx(3.0));
}

TEST_CASE("nominal configuration matches the polynomial expansion") {
    // (lambda + 1)(lambda + 0.4)(lambda + 8/7) expanded longhand:
    const double p1 = 1.0, p2 = 1.0 / 2.5, p3 = 1.0 / 0.875;
    const double c0 = p1 * p2 * p3;
    const double c1 = p1 * p2 + p1 * p3 + p2 * p3;
    const double c2 = p1 + p2 + p3;
    const AxisGains g = gains_from_taus(AxisTaus::nominal());
    CHECK(g.ki == doctest::Approx(c0).epsilon(1e-15));
    CHECK(g.kp == doctest::Approx(c1).epsilon(1e-15));
    CHECK(g.kd == doctest::Approx(c2).epsilon(1e-15));
    CHECK(g.ki == doctest::Approx(0.45714285714285713));
    CHECK(g.kp == doctest::Approx(2.0));
    CHECK(g.kd == doctest::Approx(2.542857142857143));
}

TEST_CASE("tau = (2,2,2) expands (lambda + 0.5)^3") {
    const AxisGains g = gains_from_taus({2.0, 2.0, 2.0});
    CHECK(g.ki == doctest::Approx(0.125));
    CHECK(g.kp == doctest::Approx(0.75));
    CHECK(g.kd == doctest::Approx(1.5));
}

TEST_CASE("designed poles are characteristic roots") {
    CHECK(characteristic_residual(gains_from_taus({1, 1, 1}), -1.0) == doctest::Approx(0.0));
    CHECK(std::abs(characteristic_residual(gains_from_taus(AxisTaus::nominal()), -0.4)) <= 1e-12);
    CHECK(characteristic_residual({1.0, 3.0, 3.0}, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("root property across random tau triples") {
    Rng rng(101);
    for (int i = 0; i < 1000; ++i) {
        const AxisTaus t{rng.uniform(kTauMin, kTauMax), rng.uniform(kTauMin, kTauMax),
                         rng.uniform(kTauMin, kTauMax)};
        const AxisGains g = gains_from_taus(t);
        CHECK(g.ki > 0.0);
        CHECK(g.kp > 0.0);
        CHECK(g.kd > 0.0);
        for (double tau : {t.t1, t.t2, t.t3}) {
            const double lambda = -1.0 / tau;
            const double tol = 1e-9 * std::max(1.0, 1.0 / (tau * tau * tau));
            CHECK(std::abs(characteristic_residual(g, lambda)) <= tol);
        }
    }
}

TEST_CASE("increments move taus inside the box") {
    const AxisTaus t = apply_increments(AxisTaus::nominal(), {0.01, -0.01, 0.0});
    CHECK(t.t1 == doctest::Approx(1.01));
    CHECK(t.t2 == doctest::Approx(2.49));
    CHECK(t.t3 == doctest::Approx(0.875));
}

TEST_CASE("increments saturate at the box and are idempotent there") {
    AxisTaus hi{kTauMax, 1.0, 1.0};
    hi = apply_increments(hi, {0.01, 0, 0});
    CHECK(hi.t1 == kTauMax);
    hi = apply_increments(hi, {0.01, 0, 0});
    CHECK(hi.t1 == kTauMax);

    AxisTaus lo{kTauMin, 1.0, 1.0};
    lo = apply_increments(lo, {-0.01, 0, 0});
    CHECK(lo.t1 == kTauMin);
    lo = apply_increments(lo, {-0.01, 0, 0});
    CHECK(lo.t1 == kTauMin);
}

TEST_CASE("oversized increments are clamped to +-0.01") {
    const AxisTaus t = apply_increments({1.0, 1.0, 1.0}, {5.0, -5.0, 0.0});
    CHECK(t.t1 == doctest::Approx(1.01));
    CHECK(t.t2 == doctest::Approx(0.99));
}

TEST_CASE("pid equilibrium and one-step hand evaluation") {
    AxisCtrlState ctrl;
    const AxisGains g{1.0, 3.0, 3.0};
    CHECK(pid_accel(ctrl, g, 0.0, 0.0, 0.05) == doctest::Approx(0.0));

    ctrl = AxisCtrlState{};
    const double u = pid_accel(ctrl, g, 1.0, 0.0, 0.05);
    CHECK(ctrl.integral == doctest::Approx(0.05));
    CHECK(u == doctest::Approx(-3.05));
}

TEST_CASE("integral clamp bounds the windup") {
    AxisCtrlState ctrl;
    const AxisGains g{1.0, 3.0, 3.0};
    for (int i = 0; i < 10000; ++i) pid_accel(ctrl, g, 5.0, 0.0, 0.05);
    CHECK(ctrl.integral <= kIntegralLimit);
    for (int i = 0; i < 20000; ++i) pid_accel(ctrl, g, -5.0, 0.0, 0.05);
    CHECK(ctrl.integral >= -kIntegralLimit);
}

TEST_CASE("acceleration inversion: hover, thrust clamp, tilt") {
    VehicleParams vp;
    const ActuatorCmd hover = accel_to_lowlevel({0, 0, 0}, 0.0, vp);
    CHECK(hover.thrust == doctest::Approx(15.14664));
    CHECK(hover.pitch_ref == doctest::Approx(0.0));
    CHECK(hover.roll_ref == doctest::Approx(0.0));

    const ActuatorCmd climb = accel_to_lowlevel({0, 0, 5.0}, 0.0, vp);
    CHECK(climb.thrust == doctest::Approx(1.544 * 12.81));  // clamped at m(g+3)

    const ActuatorCmd fwd = accel_to_lowlevel({1, 0, 0}, 0.0, vp);
    CHECK(fwd.pitch_ref == doctest::Approx(1.0 / 9.81).epsilon(1e-9));
    CHECK(fwd.roll_ref == doctest::Approx(0.0));
}

TEST_CASE("inversion and forward acceleration are mutual inverses") {
    VehicleParams vp;
    Rng rng(55);
    for (int i = 0; i < 200; ++i) {
        // stay away from the clamps
        const Vec3 u{rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5), rng.uniform(0.1, 2.5)};
        const ActuatorCmd cmd = accel_to_lowlevel(u, 0.0, vp);
        const Vec3 back = accel_from_cmd(cmd, 0.0, vp);
        CHECK(std::abs(back.x - u.x) <= 1e-12);
        CHECK(std::abs(back.y - u.y) <= 1e-12);
        CHECK(std::abs(back.z - u.z) <= 1e-12);
    }
}

TEST_CASE("closed loop converges from a 10 m offset without wind") {
    VehicleParams vp;
    const WindField calm = uniform_wind({0, 0, 0});
    ControllerParams ctrl = ControllerParams::nominal();
    MavState s;
    s.position = {0, 0, 3};
    const Vec3 target{10.0 / std::sqrt(2.0), -10.0 / std::sqrt(2.0), 3.0};

    // 5 * max(tau) * safety factor 4 = 50 s
    double err = (s.position - target).norm();
    const double initial = err;
    for (int k = 0; k < 1000; ++k) {  // 50 s at 20 Hz
        s = closed_loop_step(s, ctrl, target, calm, vp);
        err = (s.position - target).norm();
        CHECK(err <= initial * 2.0);  // never diverges
    }
    CHECK(err <= 0.02 * initial);
}

TEST_CASE("constant wind is rejected by integral action") {
    VehicleParams vp;
    ControllerParams ctrl = ControllerParams::nominal();
    const WindField windy = uniform_wind({5.0, 0.0, 0.0});
    MavState s;
    s.position = {0, 0, 3};
    const Vec3 target{10, 0, 3};
    for (int k = 0; k < 600; ++k) s = closed_loop_step(s, ctrl, target, windy, vp);  // 30 s
    CHECK((s.position - target).norm() <= 0.02);
}

TEST_SUITE_END();
