#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gustnav/vec3.hpp"

namespace gustnav {

// Regular 3D grid of wind velocity vectors, x-fastest storage, trilinear
// sampling with clamped extrapolation beyond the grid.
struct WindField {
    Vec3 origin;
    Vec3 spacing;                   // per-axis, > 0
    std::array<int, 3> dims{2, 2, 2};  // nx, ny, nz, each >= 2
    double envelope_min = 0.0;      // declared per-component bounds (m/s)
    double envelope_max = 0.0;
    std::vector<Vec3> velocities;   // dims[0]*dims[1]*dims[2] entries

    std::size_t vertex_count() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }
    const Vec3& at(int ix, int iy, int iz) const {
        return velocities[(static_cast<std::size_t>(iz) * dims[1] + iy) * dims[0] + ix];
    }
    Vec3& at(int ix, int iy, int iz) {
        return velocities[(static_cast<std::size_t>(iz) * dims[1] + iy) * dims[0] + ix];
    }
};

Vec3 sample_velocity(const WindField& field, const Vec3& p);

// Sinusoidal gust mixture replacing the simulator's pre-baked field: each
// mode is a planar sine wave with a random travel direction, velocity
// direction, amplitude, wavelength and phase. Components are clipped to
// [clip_min, clip_max] after summation.
struct GustSpec {
    Vec3 base;
    int mode_count = 6;
    double amplitude_min = 1.0;
    double amplitude_max = 4.0;
    double wavelength_min = 8.0;
    double wavelength_max = 40.0;
    double clip_min = -5.0;
    double clip_max = 10.0;
    std::uint64_t seed = 0;
};

struct GridExtent {
    Vec3 min{-60.0, -60.0, 0.0};
    Vec3 max{60.0, 60.0, 25.0};
};

WindField generate_procedural(const GustSpec& spec, const GridExtent& extent,
                              const Vec3& spacing = {5.0, 5.0, 5.0});

// WINDGRID text format, one vector per line after a 5-line header.
WindField load_field(const std::string& path);
void save_field(const WindField& field, const std::string& path);

}  // namespace gustnav
