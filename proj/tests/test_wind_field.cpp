#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gustnav/errors.hpp"
#include "gustnav/rng.hpp"
#include "gustnav/wind_field.hpp"

using namespace gustnav;

TEST_SUITE_BEGIN("wind_field");

namespace {

WindField constant_field(const Vec3& c) {
    WindField f;
    f.origin = {0, 0, 0};
    f.spacing = {1, 1, 1};
    f.dims = {3, 3, 3};
    f.envelope_min = -5;
    f.envelope_max = 10;
    f.velocities.assign(f.vertex_count(), c);
    return f;
}

// v(p) = a + B p componentwise, exactly representable by trilinear
// interpolation.
WindField affine_field(const Vec3& origin, const Vec3& spacing, int n) {
    WindField f;
    f.origin = origin;
    f.spacing = spacing;
    f.dims = {n, n, n};
    f.envelope_min = -1000;
    f.envelope_max = 1000;
    f.velocities.resize(f.vertex_count());
    for (int iz = 0; iz < n; ++iz)
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix) {
                const Vec3 p{origin.x + ix * spacing.x, origin.y + iy * spacing.y,
                             origin.z + iz * spacing.z};
                f.at(ix, iy, iz) = {1.0 + 0.3 * p.x - 0.2 * p.y + 0.05 * p.z,
                                    -2.0 + 0.1 * p.x + 0.4 * p.z,
                                    0.5 - 0.25 * p.y + 0.15 * p.x};
            }
    return f;
}

Vec3 affine_truth(const Vec3& p) {
    return {1.0 + 0.3 * p.x - 0.2 * p.y + 0.05 * p.z, -2.0 + 0.1 * p.x + 0.4 * p.z,
            0.5 - 0.25 * p.y + 0.15 * p.x};
}

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("constant field samples to the constant everywhere") {
    const WindField f = constant_field({3.0, -1.0, 0.5});
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        const Vec3 p{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
        const Vec3 v = sample_velocity(f, p);
        CHECK(v.x == doctest::Approx(3.0));
        CHECK(v.y == doctest::Approx(-1.0));
        CHECK(v.z == doctest::Approx(0.5));
    }
}

TEST_CASE("1-D pair interpolates linearly") {
    WindField f;
    f.origin = {0, 0, 0};
    f.spacing = {1, 1, 1};
    f.dims = {2, 2, 2};
    f.envelope_min = 0;
    f.envelope_max = 10;
    f.velocities.assign(8, Vec3{0, 0, 0});
    for (int iy = 0; iy < 2; ++iy)
        for (int iz = 0; iz < 2; ++iz) f.at(1, iy, iz) = {10, 0, 0};
    CHECK(sample_velocity(f, {0.25, 0.5, 0.5}).x == doctest::Approx(2.5));
}

TEST_CASE("affine fields are reproduced exactly at interior points") {
    const WindField f = affine_field({-4, -4, 0}, {2, 2, 1.5}, 6);
    Rng rng(7);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Vec3 p{rng.uniform(-4, 6), rng.uniform(-4, 6), rng.uniform(0, 7.5)};
        const Vec3 got = sample_velocity(f, p);
        const Vec3 want = affine_truth(p);
        worst = std::max({worst, std::abs(got.x - want.x), std::abs(got.y - want.y),
                          std::abs(got.z - want.z)});
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("vertex exactness") {
    const WindField f = affine_field({0, 0, 0}, {1, 1, 1}, 4);
    for (int iz = 0; iz < 4; ++iz)
        for (int iy = 0; iy < 4; ++iy)
            for (int ix = 0; ix < 4; ++ix) {
                const Vec3 got = sample_velocity(
                    f, {static_cast<double>(ix), static_cast<double>(iy),
                        static_cast<double>(iz)});
                const Vec3& want = f.at(ix, iy, iz);
                CHECK(got.x == want.x);
                CHECK(got.y == want.y);
                CHECK(got.z == want.z);
            }
}

TEST_CASE("points beyond the grid clamp to the boundary") {
    const WindField f = affine_field({0, 0, 0}, {1, 1, 1}, 4);
    const Vec3 inside = sample_velocity(f, {3.0, 1.5, 1.5});
    const Vec3 outside = sample_velocity(f, {42.0, 1.5, 1.5});
    CHECK(outside.x == doctest::Approx(inside.x));
    CHECK(outside.y == doctest::Approx(inside.y));
    CHECK(outside.z == doctest::Approx(inside.z));
}

TEST_CASE("sampling is continuous across cell boundaries") {
    GustSpec spec;
    spec.seed = 5;
    spec.base = {1, 0, 0};
    const WindField f = generate_procedural(spec, GridExtent{{0, 0, 0}, {10, 10, 10}},
                                            {2, 2, 2});
    Rng rng(6);
    for (int i = 0; i < 200; ++i) {
        // straddle the x = 4 cell face
        const double y = rng.uniform(0.1, 9.9), z = rng.uniform(0.1, 9.9);
        const Vec3 a = sample_velocity(f, {4.0 - 1e-10, y, z});
        const Vec3 b = sample_velocity(f, {4.0 + 1e-10, y, z});
        CHECK(std::abs(a.x - b.x) <= 1e-9);
        CHECK(std::abs(a.y - b.y) <= 1e-9);
        CHECK(std::abs(a.z - b.z) <= 1e-9);
    }
}

TEST_CASE("zero modes give the uniform base field") {
    GustSpec spec;
    spec.base = {3, 0, 0};
    spec.mode_count = 0;
    spec.seed = 1;
    const WindField f = generate_procedural(spec, GridExtent{{0, 0, 0}, {10, 10, 5}});
    for (const Vec3& v : f.velocities) {
        CHECK(v.x == 3.0);
        CHECK(v.y == 0.0);
        CHECK(v.z == 0.0);
    }
}

TEST_CASE("generation is deterministic in the seed") {
    GustSpec spec;
    spec.seed = 99;
    spec.mode_count = 5;
    const WindField a = generate_procedural(spec, GridExtent{});
    const WindField b = generate_procedural(spec, GridExtent{});
    REQUIRE(a.velocities.size() == b.velocities.size());
    for (std::size_t i = 0; i < a.velocities.size(); ++i) {
        CHECK(a.velocities[i].x == b.velocities[i].x);
        CHECK(a.velocities[i].y == b.velocities[i].y);
        CHECK(a.velocities[i].z == b.velocities[i].z);
    }
}

TEST_CASE("generated components respect the clip envelope") {
    GustSpec spec;
    spec.seed = 123;
    spec.base = {8, 8, -4};       // near the edges on purpose
    spec.mode_count = 12;
    spec.amplitude_min = 3.0;
    spec.amplitude_max = 6.0;
    const WindField f = generate_procedural(spec, GridExtent{});
    for (const Vec3& v : f.velocities) {
        CHECK(v.x >= -5.0);
        CHECK(v.x <= 10.0);
        CHECK(v.y >= -5.0);
        CHECK(v.y <= 10.0);
        CHECK(v.z >= -5.0);
        CHECK(v.z <= 10.0);
    }
}

TEST_CASE("save and load round-trip a procedural field") {
    GustSpec spec;
    spec.seed = 77;
    spec.mode_count = 4;
    const WindField f = generate_procedural(spec, GridExtent{{0, 0, 0}, {20, 20, 10}});
    const std::string path = temp_path("gustnav_roundtrip.wind");
    save_field(f, path);
    const WindField g = load_field(path);
    CHECK(g.dims == f.dims);
    CHECK(g.origin.x == f.origin.x);
    CHECK(g.spacing.z == f.spacing.z);
    REQUIRE(g.velocities.size() == f.velocities.size());
    for (std::size_t i = 0; i < f.velocities.size(); ++i) {
        CHECK(g.velocities[i].x == f.velocities[i].x);
        CHECK(g.velocities[i].y == f.velocities[i].y);
        CHECK(g.velocities[i].z == f.velocities[i].z);
    }
    std::filesystem::remove(path);
}

TEST_CASE("vector count shortfall is reported with a line number") {
    const std::string path = temp_path("gustnav_short.wind");
    {
        std::ofstream out(path);
        out << "WINDGRID 1\norigin 0 0 0\nspacing 1 1 1\ndims 2 2 2\nenvelope -5 10\n";
        for (int i = 0; i < 7; ++i) out << "1 0 0\n";
    }
    CHECK_THROWS_WITH_AS((void)load_field(path), doctest::Contains("expected 8 velocity lines"),
                         ParseError);
    std::filesystem::remove(path);
}

TEST_CASE("non-positive spacing is rejected") {
    const std::string path = temp_path("gustnav_spacing.wind");
    {
        std::ofstream out(path);
        out << "WINDGRID 1\norigin 0 0 0\nspacing 0 1 1\ndims 2 2 2\nenvelope -5 10\n";
        for (int i = 0; i < 8; ++i) out << "1 0 0\n";
    }
    CHECK_THROWS_WITH_AS((void)load_field(path), doctest::Contains("non-positive spacing"),
                         ParseError);
    std::filesystem::remove(path);
}

TEST_CASE("bad magic and envelope violations are parse errors") {
    const std::string path = temp_path("gustnav_bad.wind");
    {
        std::ofstream out(path);
        out << "NOTWIND 1\n";
    }
    CHECK_THROWS_AS((void)load_field(path), ParseError);
    {
        std::ofstream out(path);
        out << "WINDGRID 1\norigin 0 0 0\nspacing 1 1 1\ndims 2 2 2\nenvelope -1 1\n";
        for (int i = 0; i < 8; ++i) out << "3 0 0\n";  // outside [-1, 1]
    }
    CHECK_THROWS_WITH_AS((void)load_field(path), doctest::Contains("envelope"), ParseError);
    std::filesystem::remove(path);
}

TEST_SUITE_END();
