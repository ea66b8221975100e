#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "gustnav/errors.hpp"

namespace gustnav {

// Dense row-major array of 64-bit reals.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::vector<std::size_t> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {}

    static Tensor zeros(std::vector<std::size_t> s) {
        std::size_t n = 1;
        for (auto d : s) n *= d;
        return Tensor{std::move(s), std::vector<double>(n, 0.0)};
    }

    std::size_t size() const { return data.size(); }

    double& at(std::size_t i) { return data[i]; }
    double at(std::size_t i) const { return data[i]; }

    // Rank-2 access, row-major.
    double& at(std::size_t r, std::size_t c) { return data[r * shape[1] + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * shape[1] + c]; }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

inline void require_same_shape(const Tensor& a, const Tensor& b, const std::string& who) {
    if (!a.same_shape(b)) throw ShapeError(who + ": tensor shapes differ");
}

}  // namespace gustnav
