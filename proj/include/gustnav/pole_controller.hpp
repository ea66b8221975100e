#pragma once

#include <array>

#include "gustnav/vec3.hpp"
#include "gustnav/vehicle.hpp"

namespace gustnav {

inline constexpr double kTauMin = 5e-3;
inline constexpr double kTauMax = 3.0;
inline constexpr double kIncrementLimit = 0.01;
inline constexpr double kIntegralLimit = 10.0;       // m*s anti-windup clamp
inline constexpr double kIntegralAccelLimit = 3.5;   // m/s^2 cap on ki * integral

// Closed-loop time constants per axis; poles sit at -1/tau_i.
struct AxisTaus {
    double t1 = 1.0;
    double t2 = 2.5;
    double t3 = 0.875;

    static AxisTaus nominal() { return {1.0, 2.5, 0.875}; }
};

struct AxisGains {
    double ki = 0.0;  // 1/s^3
    double kp = 0.0;  // 1/s^2
    double kd = 0.0;  // 1/s
};

struct AxisCtrlState {
    double integral = 0.0;    // m*s, clamped to +-kIntegralLimit
    double last_error = 0.0;  // m
};

// Coefficients of (lambda + 1/t1)(lambda + 1/t2)(lambda + 1/t3):
//   ki = 1/(t1 t2 t3), kp = (t1+t2+t3)/(t1 t2 t3), kd = (t1 t2 + t1 t3 + t2 t3)/(t1 t2 t3)
AxisGains gains_from_taus(const AxisTaus& t);

// lambda^3 + kd*lambda^2 + kp*lambda + ki
double characteristic_residual(const AxisGains& g, double lambda);

// tau_i <- clamp(tau_i + inc_i, kTauMin, kTauMax); increments are clamped to
// +-kIncrementLimit first.
AxisTaus apply_increments(const AxisTaus& t, const std::array<double, 3>& inc);

// Integrates the error, then u = -ki*z - kp*e - kd*v (e = position - setpoint,
// v = velocity; the velocity reference is zero).
double pid_accel(AxisCtrlState& ctrl, const AxisGains& g, double error, double vel_error,
                 double dt);

// Inverts the commanded acceleration into a low-level command, clamped to the
// actuator envelope:
//   T = clamp(m(u_z+g), m g, m(g+3))
//   pitch_ref = clamp((m/T)(cos(yaw) u_x + sin(yaw) u_y), +-pi/6)
//   roll_ref  = clamp((m/T)(sin(yaw) u_x - cos(yaw) u_y), +-pi/6)
ActuatorCmd accel_to_lowlevel(const Vec3& u, double yaw, const VehicleParams& params);

// Channel layout follows the action vector: roll drives the world y axis,
// pitch the x axis, thrust the z axis.
enum Channel : int { kRoll = 0, kPitch = 1, kThrust = 2 };

struct ControllerParams {
    std::array<AxisTaus, 3> taus;
    std::array<AxisGains, 3> gains;
    std::array<AxisCtrlState, 3> state;

    static ControllerParams nominal();
    void refresh_gains();

    // PID acceleration for the (x, y, z) position/velocity errors.
    Vec3 control_accel(const Vec3& pos_error, const Vec3& velocity, double dt);
};

}  // namespace gustnav
