#pragma once

#include "gustnav/vec3.hpp"
#include "gustnav/wind_field.hpp"

namespace gustnav {

// Guidance-level state: world-frame position/velocity, Euler attitude,
// body-frame angular rate.
struct MavState {
    Vec3 position;
    Vec3 velocity;
    EulerAngles attitude;
    Vec3 angular_rate;
};

// Low-level command tracked by the attitude loop: collective thrust plus
// roll/pitch references. Yaw is held at zero.
struct ActuatorCmd {
    double thrust = 0.0;    // N
    double roll_ref = 0.0;  // rad
    double pitch_ref = 0.0; // rad
};

struct VehicleParams {
    double mass = 1.544;          // kg
    double gravity = 9.81;        // m/s^2
    double attitude_lag = 0.15;   // s, first-order tracking of (roll_ref, pitch_ref)
    double wind_drag = 0.5;       // N*s/m, linear drag toward local wind velocity
    double dt_control = 0.05;     // s (20 Hz command rate)
    int physics_substeps = 5;

    double tilt_limit() const { return M_PI / 6.0; }
    double thrust_min() const { return mass * gravity; }
    double thrust_max() const { return mass * (gravity + 3.0); }
    double hover_thrust() const { return mass * gravity; }
};

// World -> body rotation for ZYX Euler angles.
Vec3 world_to_body(const EulerAngles& eta, const Vec3& v_world);

// Acceleration produced at a given attitude:
//   u_z = T/m - g
//   u_x = (T/m)(cos(yaw)*pitch + sin(yaw)*roll)
//   u_y = (T/m)(sin(yaw)*pitch - cos(yaw)*roll)
// cmd.roll_ref/pitch_ref carry the attained (post-lag) angles here, not the
// references; the two coincide once the attitude loop has settled.
Vec3 accel_from_cmd(const ActuatorCmd& cmd, double yaw, const VehicleParams& params);

// Clamps a command into the actuator envelope; sets *clamped if anything moved.
ActuatorCmd clamp_cmd(const ActuatorCmd& cmd, const VehicleParams& params, bool* clamped);

// One 50 ms control period, substepped. Per substep the attitude relaxes
// toward the (clamped) references along the exact first-order-lag solution,
// and a Heun step integrates velocity/position under the commanded
// acceleration plus wind drag (c_w/m)*(wind - v). Throws NumericError if the
// state leaves the finite domain.
MavState step(const MavState& state, const ActuatorCmd& cmd, const WindField& field,
              const VehicleParams& params, bool* cmd_clamped = nullptr);

}  // namespace gustnav
