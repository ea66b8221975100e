#include "gustnav/pole_controller.hpp"

#include <algorithm>
#include <cmath>

namespace gustnav {

AxisGains gains_from_taus(const AxisTaus& t) {
    const double prod = t.t1 * t.t2 * t.t3;
    AxisGains g;
    g.ki = 1.0 / prod;
    g.kp = (t.t1 + t.t2 + t.t3) / prod;
    g.kd = (t.t1 * t.t2 + t.t1 * t.t3 + t.t2 * t.t3) / prod;
    return g;
}

double characteristic_residual(const AxisGains& g, double lambda) {
    return ((lambda + g.kd) * lambda + g.kp) * lambda + g.ki;
}

AxisTaus apply_increments(const AxisTaus& t, const std::array<double, 3>& inc) {
    auto clamp_inc = [](double v) { return std::clamp(v, -kIncrementLimit, kIncrementLimit); };
    auto clamp_tau = [](double v) { return std::clamp(v, kTauMin, kTauMax); };
    return {clamp_tau(t.t1 + clamp_inc(inc[0])), clamp_tau(t.t2 + clamp_inc(inc[1])),
            clamp_tau(t.t3 + clamp_inc(inc[2]))};
}

double pid_accel(AxisCtrlState& ctrl, const AxisGains& g, double error, double vel_error,
                 double dt) {
    // Anti-windup: besides the absolute bound, cap the integral so its
    // authority ki*z never exceeds kIntegralAccelLimit. Without the second
    // bound, high-gain configurations bank enormous bias during a long
    // approach and limit-cycle around the setpoint while it unwinds.
    const double limit = std::min(kIntegralLimit, kIntegralAccelLimit / g.ki);
    ctrl.integral = std::clamp(ctrl.integral + error * dt, -limit, limit);
    ctrl.last_error = error;
    return -g.ki * ctrl.integral - g.kp * error - g.kd * vel_error;
}

ActuatorCmd accel_to_lowlevel(const Vec3& u, double yaw, const VehicleParams& params) {
    ActuatorCmd cmd;
    cmd.thrust = std::clamp(params.mass * (u.z + params.gravity), params.thrust_min(),
                            params.thrust_max());
    const double mt = params.mass / cmd.thrust;
    const double tilt = params.tilt_limit();
    const double cp = std::cos(yaw), sp = std::sin(yaw);
    cmd.pitch_ref = std::clamp(mt * (cp * u.x + sp * u.y), -tilt, tilt);
    cmd.roll_ref = std::clamp(mt * (sp * u.x - cp * u.y), -tilt, tilt);
    return cmd;
}

ControllerParams ControllerParams::nominal() {
    ControllerParams c;
    c.taus = {AxisTaus::nominal(), AxisTaus::nominal(), AxisTaus::nominal()};
    c.refresh_gains();
    return c;
}

void ControllerParams::refresh_gains() {
    for (int ch = 0; ch < 3; ++ch) gains[ch] = gains_from_taus(taus[ch]);
}

Vec3 ControllerParams::control_accel(const Vec3& pos_error, const Vec3& velocity, double dt) {
    return {pid_accel(state[kPitch], gains[kPitch], pos_error.x, velocity.x, dt),
            pid_accel(state[kRoll], gains[kRoll], pos_error.y, velocity.y, dt),
            pid_accel(state[kThrust], gains[kThrust], pos_error.z, velocity.z, dt)};
}

}  // namespace gustnav
