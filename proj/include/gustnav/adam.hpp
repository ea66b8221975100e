#pragma once

#include <string>

#include "gustnav/mlp.hpp"

namespace gustnav {

// Bias-corrected Adam. Moments are parameter-shaped.
struct AdamState {
    ParamSet first_moment;
    ParamSet second_moment;
    long step_count = 0;
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamState make(const MlpSpec& spec, double lr);
};

// One update in place. Throws NumericError naming the offending parameter if
// a gradient entry is not finite.
void adam_step(ParamSet& params, const ParamSet& grads, AdamState& adam,
               const std::string& param_name);

}  // namespace gustnav
