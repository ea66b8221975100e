#include "gustnav/wind_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gustnav/errors.hpp"
#include "gustnav/rng.hpp"

namespace gustnav {

namespace {

// Fractional cell coordinate along one axis, clamped to the grid.
void locate(double coord, double origin, double spacing, int n, int& i0, double& frac) {
    double t = (coord - origin) / spacing;
    if (t <= 0.0) {
        i0 = 0;
        frac = 0.0;
        return;
    }
    if (t >= static_cast<double>(n - 1)) {
        i0 = n - 2;
        frac = 1.0;
        return;
    }
    i0 = static_cast<int>(t);
    if (i0 > n - 2) i0 = n - 2;
    frac = t - static_cast<double>(i0);
}

}  // namespace

Vec3 sample_velocity(const WindField& field, const Vec3& p) {
    int ix, iy, iz;
    double fx, fy, fz;
    locate(p.x, field.origin.x, field.spacing.x, field.dims[0], ix, fx);
    locate(p.y, field.origin.y, field.spacing.y, field.dims[1], iy, fy);
    locate(p.z, field.origin.z, field.spacing.z, field.dims[2], iz, fz);

    Vec3 c00 = field.at(ix, iy, iz) * (1.0 - fx) + field.at(ix + 1, iy, iz) * fx;
    Vec3 c10 = field.at(ix, iy + 1, iz) * (1.0 - fx) + field.at(ix + 1, iy + 1, iz) * fx;
    Vec3 c01 = field.at(ix, iy, iz + 1) * (1.0 - fx) + field.at(ix + 1, iy, iz + 1) * fx;
    Vec3 c11 = field.at(ix, iy + 1, iz + 1) * (1.0 - fx) + field.at(ix + 1, iy + 1, iz + 1) * fx;
    Vec3 c0 = c00 * (1.0 - fy) + c10 * fy;
    Vec3 c1 = c01 * (1.0 - fy) + c11 * fy;
    return c0 * (1.0 - fz) + c1 * fz;
}

WindField generate_procedural(const GustSpec& spec, const GridExtent& extent,
                              const Vec3& spacing) {
    if (spec.clip_min > spec.clip_max)
        throw ConfigError("generate_procedural: clip bounds out of order");
    if (spec.mode_count < 0) throw ConfigError("generate_procedural: mode_count must be >= 0");
    if (spacing.x <= 0.0 || spacing.y <= 0.0 || spacing.z <= 0.0)
        throw ConfigError("generate_procedural: non-positive spacing");
    if (extent.max.x <= extent.min.x || extent.max.y <= extent.min.y ||
        extent.max.z <= extent.min.z)
        throw ConfigError("generate_procedural: extent volume must be positive");

    WindField field;
    field.origin = extent.min;
    field.spacing = spacing;
    field.dims = {
        std::max(2, 1 + static_cast<int>(std::ceil((extent.max.x - extent.min.x) / spacing.x))),
        std::max(2, 1 + static_cast<int>(std::ceil((extent.max.y - extent.min.y) / spacing.y))),
        std::max(2, 1 + static_cast<int>(std::ceil((extent.max.z - extent.min.z) / spacing.z)))};
    field.envelope_min = spec.clip_min;
    field.envelope_max = spec.clip_max;

    struct Mode {
        Vec3 travel;    // unit wave vector direction
        Vec3 velocity;  // unit velocity direction
        double amplitude;
        double wavelength;
        double phase;
    };
    Rng rng(spec.seed);
    auto unit_vector = [&rng]() {
        // Marsaglia rejection on the unit sphere.
        for (;;) {
            const double a = rng.uniform(-1.0, 1.0);
            const double b = rng.uniform(-1.0, 1.0);
            const double s = a * a + b * b;
            if (s >= 1.0 || s == 0.0) continue;
            const double r = 2.0 * std::sqrt(1.0 - s);
            return Vec3{a * r, b * r, 1.0 - 2.0 * s};
        }
    };
    std::vector<Mode> modes;
    modes.reserve(static_cast<std::size_t>(spec.mode_count));
    for (int k = 0; k < spec.mode_count; ++k) {
        Mode m;
        m.travel = unit_vector();
        // Boundary-layer gusts are mostly horizontal; damp the vertical
        // component of each mode's velocity direction.
        m.velocity = unit_vector();
        m.velocity.z *= 0.15;
        m.velocity = m.velocity * (1.0 / m.velocity.norm());
        m.amplitude = rng.uniform(spec.amplitude_min, spec.amplitude_max);
        m.wavelength = rng.uniform(spec.wavelength_min, spec.wavelength_max);
        m.phase = rng.uniform(0.0, 2.0 * M_PI);
        modes.push_back(m);
    }

    field.velocities.resize(field.vertex_count());
    for (int iz = 0; iz < field.dims[2]; ++iz) {
        for (int iy = 0; iy < field.dims[1]; ++iy) {
            for (int ix = 0; ix < field.dims[0]; ++ix) {
                const Vec3 p{field.origin.x + ix * spacing.x, field.origin.y + iy * spacing.y,
                             field.origin.z + iz * spacing.z};
                Vec3 v = spec.base;
                for (const Mode& m : modes) {
                    const double s =
                        std::sin(2.0 * M_PI * p.dot(m.travel) / m.wavelength + m.phase);
                    v += m.velocity * (m.amplitude * s);
                }
                v.x = std::clamp(v.x, spec.clip_min, spec.clip_max);
                v.y = std::clamp(v.y, spec.clip_min, spec.clip_max);
                v.z = std::clamp(v.z, spec.clip_min, spec.clip_max);
                field.at(ix, iy, iz) = v;
            }
        }
    }
    return field;
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& msg) {
    throw ParseError(path + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

WindField load_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open for reading");

    WindField field;
    std::string line;
    int lineno = 0;
    auto next_line = [&](const char* what) {
        if (!std::getline(in, line)) parse_fail(path, lineno + 1, std::string("missing ") + what);
        ++lineno;
        return std::istringstream(line);
    };

    {
        auto ss = next_line("magic line");
        std::string magic;
        int version = 0;
        ss >> magic >> version;
        if (magic != "WINDGRID" || version != 1)
            parse_fail(path, lineno, "expected 'WINDGRID 1' header");
    }
    {
        auto ss = next_line("origin line");
        std::string key;
        ss >> key >> field.origin.x >> field.origin.y >> field.origin.z;
        if (key != "origin" || ss.fail()) parse_fail(path, lineno, "expected 'origin ox oy oz'");
    }
    {
        auto ss = next_line("spacing line");
        std::string key;
        ss >> key >> field.spacing.x >> field.spacing.y >> field.spacing.z;
        if (key != "spacing" || ss.fail()) parse_fail(path, lineno, "expected 'spacing sx sy sz'");
        if (field.spacing.x <= 0.0 || field.spacing.y <= 0.0 || field.spacing.z <= 0.0)
            parse_fail(path, lineno, "non-positive spacing");
    }
    {
        auto ss = next_line("dims line");
        std::string key;
        ss >> key >> field.dims[0] >> field.dims[1] >> field.dims[2];
        if (key != "dims" || ss.fail()) parse_fail(path, lineno, "expected 'dims nx ny nz'");
        if (field.dims[0] < 2 || field.dims[1] < 2 || field.dims[2] < 2)
            parse_fail(path, lineno, "each grid dimension must be >= 2");
    }
    {
        auto ss = next_line("envelope line");
        std::string key;
        ss >> key >> field.envelope_min >> field.envelope_max;
        if (key != "envelope" || ss.fail())
            parse_fail(path, lineno, "expected 'envelope vmin vmax'");
        if (field.envelope_min > field.envelope_max)
            parse_fail(path, lineno, "envelope bounds out of order");
    }

    const std::size_t expected = field.vertex_count();
    field.velocities.reserve(expected);
    while (field.velocities.size() < expected) {
        if (!std::getline(in, line))
            parse_fail(path, lineno + 1,
                       "expected " + std::to_string(expected) + " velocity lines, got " +
                           std::to_string(field.velocities.size()));
        ++lineno;
        std::istringstream ss(line);
        Vec3 v;
        ss >> v.x >> v.y >> v.z;
        if (ss.fail()) parse_fail(path, lineno, "expected 'vx vy vz'");
        if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z))
            parse_fail(path, lineno, "non-finite velocity component");
        if (v.x < field.envelope_min || v.x > field.envelope_max || v.y < field.envelope_min ||
            v.y > field.envelope_max || v.z < field.envelope_min || v.z > field.envelope_max)
            parse_fail(path, lineno, "velocity component outside declared envelope");
        field.velocities.push_back(v);
    }
    return field;
}

void save_field(const WindField& field, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    char buf[256];
    out << "WINDGRID 1\n";
    std::snprintf(buf, sizeof(buf), "origin %.17g %.17g %.17g\n", field.origin.x, field.origin.y,
                  field.origin.z);
    out << buf;
    std::snprintf(buf, sizeof(buf), "spacing %.17g %.17g %.17g\n", field.spacing.x,
                  field.spacing.y, field.spacing.z);
    out << buf;
    std::snprintf(buf, sizeof(buf), "dims %d %d %d\n", field.dims[0], field.dims[1],
                  field.dims[2]);
    out << buf;
    std::snprintf(buf, sizeof(buf), "envelope %.17g %.17g\n", field.envelope_min,
                  field.envelope_max);
    out << buf;
    for (const Vec3& v : field.velocities) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", v.x, v.y, v.z);
        out << buf;
    }
    if (!out) throw ParseError(path + ": write failed");
}

}  // namespace gustnav
