#include "gustnav/policy.hpp"

#include <algorithm>
#include <cmath>

#include "gustnav/errors.hpp"

namespace gustnav {

namespace {
constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5*ln(2*pi)
}

ActionBounds ActionBounds::uniform(std::size_t dim, double lo, double hi) {
    ActionBounds b;
    b.lo.assign(dim, lo);
    b.hi.assign(dim, hi);
    return b;
}

PolicyHeadOutput split_policy_output(std::span<const double> raw) {
    if (raw.size() % 2 != 0) throw ShapeError("split_policy_output: raw output length must be even");
    const std::size_t dim = raw.size() / 2;
    PolicyHeadOutput head;
    head.mean.assign(raw.begin(), raw.begin() + dim);
    head.log_std.resize(dim);
    for (std::size_t i = 0; i < dim; ++i)
        head.log_std[i] = std::clamp(raw[dim + i], kLogStdMin, kLogStdMax);
    return head;
}

double log_one_minus_tanh_sq(double u) {
    // log(1 - tanh(u)^2) = 2*(log 2 - |u| - softplus(-2|u|)); even in u
    const double a = std::abs(u);
    const double sp = a > 20.0 ? std::exp(-2.0 * a) : std::log1p(std::exp(-2.0 * a));
    return 2.0 * (std::log(2.0) - a - sp);
}

SampleResult squashed_sample(const PolicyHeadOutput& head, const ActionBounds& bounds,
                             std::span<const double> noise) {
    const std::size_t dim = head.mean.size();
    if (head.log_std.size() != dim || noise.size() != dim || bounds.lo.size() != dim ||
        bounds.hi.size() != dim)
        throw ShapeError("squashed_sample: dimension mismatch");

    SampleResult out;
    out.action.resize(dim);
    double lp = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double lo = bounds.lo[i];
        const double hi = bounds.hi[i];
        const double u = head.mean[i] + std::exp(head.log_std[i]) * noise[i];
        const double t = std::tanh(u);
        double a = lo + 0.5 * (t + 1.0) * (hi - lo);
        // tanh saturates to +-1 in floating point for |u| >~ 19; nudge back
        // inside so the open-interval contract holds.
        a = std::min(std::max(a, std::nextafter(lo, hi)), std::nextafter(hi, lo));
        out.action[i] = a;
        lp += -kHalfLog2Pi - head.log_std[i] - 0.5 * noise[i] * noise[i];
        lp -= log_one_minus_tanh_sq(u);
        lp -= std::log(0.5 * (hi - lo));
    }
    out.log_prob = lp;
    return out;
}

std::vector<double> squash_mean(const PolicyHeadOutput& head, const ActionBounds& bounds) {
    std::vector<double> zero(head.mean.size(), 0.0);
    return squashed_sample(head, bounds, zero).action;
}

}  // namespace gustnav
