#pragma once

#include <span>
#include <vector>

namespace gustnav {

// Diagonal Gaussian head; log-std clamped to [-20, 2] before use.
struct PolicyHeadOutput {
    std::vector<double> mean;
    std::vector<double> log_std;
};

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

struct ActionBounds {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dim() const { return lo.size(); }
    static ActionBounds uniform(std::size_t dim, double lo, double hi);
};

// Splits a raw policy net output (2*action_dim) into mean and clamped
// log-std halves.
PolicyHeadOutput split_policy_output(std::span<const double> raw);

struct SampleResult {
    std::vector<double> action;
    double log_prob = 0.0;
};

// Tanh-squashed reparameterized sample mapped onto [lo, hi] per dimension:
//   u = mean + exp(log_std) * noise
//   a = lo + (tanh(u)+1)/2 * (hi-lo)
// log_prob carries the Gaussian density of u plus the tanh and affine
// change-of-variables corrections. Actions are strictly inside the open
// interval for all finite inputs.
SampleResult squashed_sample(const PolicyHeadOutput& head, const ActionBounds& bounds,
                             std::span<const double> noise);

// Deterministic mode: squash of the mean (noise = 0), action only.
std::vector<double> squash_mean(const PolicyHeadOutput& head, const ActionBounds& bounds);

// log(1 - tanh(u)^2) in a cancellation-free form.
double log_one_minus_tanh_sq(double u);

}  // namespace gustnav
