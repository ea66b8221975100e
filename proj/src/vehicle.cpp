#include "gustnav/vehicle.hpp"

#include <algorithm>
#include <cmath>

#include "gustnav/errors.hpp"

namespace gustnav {

Vec3 world_to_body(const EulerAngles& eta, const Vec3& v) {
    const double cf = std::cos(eta.roll), sf = std::sin(eta.roll);
    const double ct = std::cos(eta.pitch), st = std::sin(eta.pitch);
    const double cp = std::cos(eta.yaw), sp = std::sin(eta.yaw);
    return {
        ct * cp * v.x + ct * sp * v.y - st * v.z,
        (sf * st * cp - cf * sp) * v.x + (sf * st * sp + cf * cp) * v.y + sf * ct * v.z,
        (cf * st * cp + sf * sp) * v.x + (cf * st * sp - sf * cp) * v.y + cf * ct * v.z,
    };
}

Vec3 accel_from_cmd(const ActuatorCmd& cmd, double yaw, const VehicleParams& params) {
    const double tm = cmd.thrust / params.mass;
    const double cp = std::cos(yaw), sp = std::sin(yaw);
    return {tm * (cp * cmd.pitch_ref + sp * cmd.roll_ref),
            tm * (sp * cmd.pitch_ref - cp * cmd.roll_ref), tm - params.gravity};
}

ActuatorCmd clamp_cmd(const ActuatorCmd& cmd, const VehicleParams& params, bool* clamped) {
    ActuatorCmd out = cmd;
    const double tilt = params.tilt_limit();
    out.roll_ref = std::clamp(cmd.roll_ref, -tilt, tilt);
    out.pitch_ref = std::clamp(cmd.pitch_ref, -tilt, tilt);
    out.thrust = std::clamp(cmd.thrust, params.thrust_min(), params.thrust_max());
    if (clamped)
        *clamped = out.roll_ref != cmd.roll_ref || out.pitch_ref != cmd.pitch_ref ||
                   out.thrust != cmd.thrust;
    return out;
}

MavState step(const MavState& state, const ActuatorCmd& raw_cmd, const WindField& field,
              const VehicleParams& params, bool* cmd_clamped) {
    const ActuatorCmd cmd = clamp_cmd(raw_cmd, params, cmd_clamped);
    const double h = params.dt_control / params.physics_substeps;
    const double drag = params.wind_drag / params.mass;
    // The lag ODE is linear; step it exactly so the attitude transient does
    // not limit the integrator's convergence order.
    const double decay = std::exp(-h / params.attitude_lag);

    auto accel = [&](const Vec3& pos, const Vec3& vel, double roll, double pitch) {
        Vec3 u = accel_from_cmd({cmd.thrust, roll, pitch}, 0.0, params);
        u += (sample_velocity(field, pos) - vel) * drag;
        return u;
    };

    MavState s = state;
    for (int k = 0; k < params.physics_substeps; ++k) {
        const double roll0 = s.attitude.roll;
        const double pitch0 = s.attitude.pitch;
        const double roll1 = cmd.roll_ref + (roll0 - cmd.roll_ref) * decay;
        const double pitch1 = cmd.pitch_ref + (pitch0 - cmd.pitch_ref) * decay;

        // Heun step on (position, velocity) with the attitude evaluated at
        // the matching substep endpoints.
        const Vec3 a1 = accel(s.position, s.velocity, roll0, pitch0);
        const Vec3 v_pred = s.velocity + a1 * h;
        const Vec3 p_pred = s.position + s.velocity * h;
        const Vec3 a2 = accel(p_pred, v_pred, roll1, pitch1);

        s.position += (s.velocity + v_pred) * (0.5 * h);
        s.velocity += (a1 + a2) * (0.5 * h);
        s.attitude.roll = roll1;
        s.attitude.pitch = pitch1;
        s.attitude.yaw = 0.0;
        s.angular_rate = {(cmd.roll_ref - roll1) / params.attitude_lag,
                          (cmd.pitch_ref - pitch1) / params.attitude_lag, 0.0};
    }
    if (!std::isfinite(s.position.x + s.position.y + s.position.z + s.velocity.x + s.velocity.y +
                       s.velocity.z))
        throw NumericError("vehicle step: non-finite state");
    return s;
}

}  // namespace gustnav
