#pragma once

#include <cmath>
#include <functional>

#include "gustnav/mlp.hpp"

namespace gustnav::testutil {

// Central finite differences over every parameter entry, compared against
// the analytic gradient with relative error |g - fd| / max(1, |fd|).
// Returns the worst relative error encountered.
inline double fd_check(ParamSet& params, const ParamSet& analytic,
                       const std::function<double()>& loss, double h = 1e-4) {
    double worst = 0.0;
    auto probe = [&](double& p, double g) {
        const double keep = p;
        p = keep + h;
        const double up = loss();
        p = keep - h;
        const double down = loss();
        p = keep;
        const double fd = (up - down) / (2.0 * h);
        const double rel = std::abs(g - fd) / std::max(1.0, std::abs(fd));
        if (rel > worst) worst = rel;
    };
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        for (std::size_t i = 0; i < params.weights[l].data.size(); ++i)
            probe(params.weights[l].data[i], analytic.weights[l].data[i]);
        for (std::size_t i = 0; i < params.biases[l].data.size(); ++i)
            probe(params.biases[l].data[i], analytic.biases[l].data[i]);
    }
    return worst;
}

}  // namespace gustnav::testutil
