#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "panodolly/dollyzoom.hpp"
#include "panodolly/error.hpp"

using namespace panodolly;

namespace {

constexpr double kDeg = kPi / 180.0;

CameraPose pose_at(const Vec3& pos, const Vec3& dir, double fovx_deg = 90.0, double aspect = 16.0 / 9.0)
{
    const Vec3 up = std::abs(normalize(dir).z) > 0.99 ? Vec3{1, 0, 0} : Vec3{0, 0, 1};
    return make_camera(pos, dir, up, fovx_deg * kDeg, aspect);
}

Vec2 rotate(const Vec2& p, double angle)
{
    return {std::cos(angle) * p.x - std::sin(angle) * p.y, std::sin(angle) * p.x + std::cos(angle) * p.y};
}

}  // namespace

TEST_CASE("heuristic_offset")
{
    SUBCASE("pure dolly recovers the origin")
    {
        const CameraPose pose = pose_at({0, 0.5, 0}, {0, -1, 0});
        const double t = heuristic_offset(pose);
        CHECK(t == -0.5);
        CHECK(pose.pos - pose.dir * t == Vec3{0, 0, 0});
    }
    SUBCASE("pure truck does not move the camera")
    {
        const CameraPose pose = pose_at({0.5, 0, 0}, {0, 1, 0});
        CHECK(heuristic_offset(pose) == 0.0);
    }
    SUBCASE("oblique collinear case")
    {
        const CameraPose pose = pose_at({0.3, 0.4, 0}, {-0.6, -0.8, 0});
        const double t = heuristic_offset(pose);
        CHECK(t == doctest::Approx(-0.5).epsilon(1e-15));
        CHECK(norm(pose.pos - pose.dir * t) < 1e-15);
    }
    SUBCASE("closest point of the looking line to the origin")
    {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> s(-3.0, 3.0);
        for (int k = 0; k < 300; ++k) {
            const CameraPose pose = oracle::random_pose(rng);
            const Vec3 moved = pose.pos - pose.dir * heuristic_offset(pose);
            CHECK(norm(moved) <= norm(pose.pos) + 1e-12);
            for (int j = 0; j < 20; ++j) {
                CHECK(norm(moved) <= norm(pose.pos + pose.dir * s(rng)) + 1e-12);
            }
        }
    }
}

TEST_CASE("refit_fov")
{
    SUBCASE("identity refit keeps the pose")
    {
        const CameraPose pose = pose_at({0.2, -0.1, 0.3}, {1, 0.5, 0.2});
        const CameraPose same = refit_fov(pose, pose.pos, Surface::Cylinder);
        CHECK(same.fovx_left == pose.fovx_left);
        CHECK(same.fovx_right == pose.fovx_right);
        CHECK(same.fovy == pose.fovy);
    }

    SUBCASE("pure dolly refit stays symmetric and widens moving in")
    {
        const Vec3 dir = normalize(Vec3{1, 2, 0.5});
        const CameraPose pose = pose_at(dir * -0.4, dir);
        for (Surface surface : {Surface::Sphere, Surface::Cylinder}) {
            const CameraPose moved = refit_fov(pose, {0, 0, 0}, surface);
            CHECK(std::abs(moved.fovx_left - moved.fovx_right) < 1e-12);
            CHECK(moved.fovx_left > pose.fovx_left);
        }
    }

    SUBCASE("refit against an independent ray-sphere oracle")
    {
        // I_left = (0.5410137..., 0.8410137..., 0), I_right = (0.8410137..., -0.5410137..., 0)
        const CameraPose pose = pose_at({0, 0.3, 0}, {1, 0, 0}, 90.0, 1.0);
        const CameraPose moved = refit_fov(pose, {0, 0, 0}, Surface::Sphere);
        CHECK(moved.fovx_left == doctest::Approx(0.99915429586988310310).epsilon(1e-13));
        CHECK(moved.fovx_right == doctest::Approx(0.57164203092501351613).epsilon(1e-13));
        CHECK(std::tan(moved.fovy / 2) ==
              doctest::Approx((std::tan(moved.fovx_left) + std::tan(moved.fovx_right)) / 2.0).epsilon(1e-14));

        for (double x : {0.0, 1.0}) {
            const Vec3 before = intersect_sphere(pose.pos, pixel_ray(pose, x, 0.5)).point;
            const Vec3 after = intersect_sphere(moved.pos, pixel_ray(moved, x, 0.5)).point;
            CHECK(norm(before - after) < 1e-9);
        }
    }

    SUBCASE("random refits re-hit the middle anchors")
    {
        std::mt19937_64 rng(37);
        int done = 0;
        for (int k = 0; k < 200; ++k) {
            const CameraPose pose = oracle::random_pose(rng);
            const double t = heuristic_offset(pose);
            for (Surface surface : {Surface::Sphere, Surface::Cylinder}) {
                CameraPose moved;
                try {
                    moved = refit_fov(pose, pose.pos - pose.dir * t, surface);
                } catch (const Error& e) {
                    CHECK(e.code() == ErrorCode::RefitBehindCamera);
                    continue;
                }
                ++done;
                for (double x : {0.0, 1.0}) {
                    const auto before = std::get<SurfaceHit>(intersect(surface, pose.pos, pixel_ray(pose, x, 0.5)));
                    const auto after = std::get<SurfaceHit>(intersect(surface, moved.pos, pixel_ray(moved, x, 0.5)));
                    CHECK(norm(before.point - after.point) < 1e-9);
                }
            }
        }
        CHECK(done > 300);
    }

    SUBCASE("anchor behind the moved camera")
    {
        // Looking sideways next to the cylinder wall; moving far forward passes
        // the left-middle anchor.
        const CameraPose pose = pose_at({0, 0.8, 0}, {1, 0, 0});
        try {
            refit_fov(pose, {0.9, 0.0, 0.0}, Surface::Cylinder);
            FAIL("expected RefitBehindCamera");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::RefitBehindCamera);
        }
        try {
            refit_fov(pose, {0, 0, 1.0}, Surface::Cylinder);
            FAIL("expected PoseOutsideSurface");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::PoseOutsideSurface);
        }
    }
}

TEST_CASE("build_grid")
{
    SUBCASE("default resolution has 11 x 11 vertices")
    {
        const DistortionGrid grid = build_grid(pose_at({0.1, 0.2, 0}, {1, 0, 0}), Surface::Cylinder, 10, 10);
        CHECK(grid.verts.size() == 121);
        CHECK(grid.verts_view.size() == 121);
    }

    SUBCASE("vertices lie on the surface and in front of the camera")
    {
        std::mt19937_64 rng(41);
        for (int k = 0; k < 100; ++k) {
            const CameraPose pose = oracle::random_pose(rng, 0.5);
            for (Surface surface : {Surface::Sphere, Surface::Cylinder}) {
                if (surface == Surface::Cylinder && std::abs(pose.dir.z) > 0.5) {
                    continue;
                }
                const DistortionGrid grid = build_grid(pose, surface, 10, 7);
                for (std::size_t v = 0; v < grid.verts.size(); ++v) {
                    const Vec3& p = grid.verts[v];
                    const double r = surface == Surface::Sphere ? norm_squared(p) : p.x * p.x + p.y * p.y;
                    CHECK(std::abs(r - 1.0) < 1e-12);
                    CHECK(grid.verts_view[v].z < 0.0);
                }
                CHECK(grid.base > 0.0);
                CHECK(grid.height == doctest::Approx(grid.base * std::tan(pose.fovy / 2)));

                const Vec3 corner = std::get<SurfaceHit>(intersect(surface, pose.pos, pixel_ray(pose, 1, 1))).point;
                CHECK(norm(grid.vert(10, 7) - corner) < 1e-12);
            }
        }
    }

    SUBCASE("too coarse grids are rejected")
    {
        CHECK_THROWS_AS(build_grid(pose_at({0, 0, 0}, {1, 0, 0}), Surface::Sphere, 1, 10), Error);
    }
}

TEST_CASE("linearity")
{
    CHECK(linearity({0, 0}, {1, 0}, {2, 0}) == 0.0);
    CHECK(linearity({0, 0}, {1, 0}, {1, 1}) == 1.0);
    CHECK(linearity({0, 0}, {2, 1}, {4, 2}) == 0.0);

    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 300; ++k) {
        const Vec2 a{u(rng), u(rng)};
        const Vec2 b{u(rng), u(rng)};
        const Vec2 c{u(rng), u(rng)};
        const double base = linearity(a, b, c);
        CHECK(base >= 0.0);

        const Vec2 shift{u(rng), u(rng)};
        CHECK(linearity(a + shift, b + shift, c + shift) == doctest::Approx(base).epsilon(1e-9));

        const double angle = u(rng);
        CHECK(linearity(rotate(a, angle), rotate(b, angle), rotate(c, angle)) ==
              doctest::Approx(base).epsilon(1e-9));

        const double s = 0.5 + std::abs(u(rng));
        CHECK(linearity(a * s, b * s, c * s) == doctest::Approx(base * std::pow(s, 4)).epsilon(1e-9));

        // points on one line
        const double t1 = u(rng);
        const double t2 = u(rng);
        CHECK(linearity(a, a + (b - a) * t1, a + (b - a) * t2) < 1e-24);
    }
}

TEST_CASE("project_with_offset")
{
    CHECK(project_with_offset({0.3, -0.2, -2.0}, 0.0, 2.0, 2.0, 1.0).x == doctest::Approx(0.3 / 2.0));
    CHECK(project_with_offset({0.3, -0.2, -2.0}, 0.0, 2.0, 2.0, 1.0).y == doctest::Approx(-0.2 / 2.0));
    const Vec2 axis = project_with_offset({0, 0, -1.3}, 0.4, 1.3, 0.7, 1.5);
    CHECK(axis.x == 0.0);
    CHECK(axis.y == 0.0);
    const Vec2 moved = project_with_offset({0.2, 0.1, -1.0}, 1.0, 1.0, 1.0, 1.0);
    CHECK(moved.x == doctest::Approx(0.2));
    CHECK(moved.y == doctest::Approx(0.1));

    CHECK_THROWS_AS(project_with_offset({0, 0, -1}, -1.0, 1.0, 1.0, 1.0), Error);
    CHECK_THROWS_AS(project_with_offset({0, 0, -3}, -1.5, 1.0, 1.0, 1.0), Error);

    SUBCASE("zero offset is the camera's own projection")
    {
        std::mt19937_64 rng(47);
        for (int k = 0; k < 100; ++k) {
            const CameraPose pose = oracle::random_pose(rng, 0.5);
            const DistortionGrid grid = build_grid(pose, Surface::Sphere, 10, 10);
            for (std::size_t v = 0; v < grid.verts.size(); ++v) {
                const Vec2 a = project_with_offset(grid.verts_view[v], 0.0, grid.base, grid.height, grid.aspect);
                const Vec2 b = project_to_image(pose, grid.verts[v]);
                CHECK(std::abs(a.x - b.x) < 1e-12);
                CHECK(std::abs(a.y - b.y) < 1e-12);
            }
        }
    }
}

TEST_CASE("distortion_value")
{
    SUBCASE("centered cameras are distortion free")
    {
        std::mt19937_64 rng(53);
        for (int k = 0; k < 50; ++k) {
            CameraPose pose = oracle::random_pose(rng);
            pose.pos = {0, 0, 0};
            CHECK(distortion_value(pose, Surface::Sphere) < 1e-18);
            if (std::abs(pose.dir.z) < 0.5) {
                CHECK(distortion_value(pose, Surface::Cylinder) < 1e-18);
            }
        }
    }

    SUBCASE("off-center cameras distort")
    {
        CHECK(distortion_value(pose_at({0, 0.5, 0.3}, {1, 0.2, 0.3}), Surface::Cylinder) > 1e-6);
    }

    SUBCASE("shared-grid objective at zero offset equals the distortion value")
    {
        std::mt19937_64 rng(59);
        for (int k = 0; k < 100; ++k) {
            const CameraPose pose = oracle::random_pose(rng);
            if (std::abs(pose.dir.z) > 0.6) {
                continue;
            }
            for (Surface surface : {Surface::Sphere, Surface::Cylinder}) {
                double d = 0.0;
                try {
                    d = distortion_value(pose, surface);
                } catch (const Error&) {
                    continue;
                }
                const DistortionGrid grid = build_grid(pose, surface, 10, 10);
                CHECK(std::abs(offset_objective(grid, 0.0) - d) < 1e-12 * std::max(1.0, d));
            }
        }
    }
}

TEST_CASE("optimize_offset")
{
    SUBCASE("centered camera stays put")
    {
        const CameraPose pose = pose_at({0, 0, 0}, {1, 0.3, -0.2});
        const double t = optimize_offset(pose, Surface::Cylinder);
        CHECK(std::abs(t) < 1e-8);
        CHECK(offset_objective(build_grid(pose, Surface::Cylinder, 10, 10), t) < 1e-20);
    }

    SUBCASE("pure dolly returns to the origin")
    {
        const Vec3 dir = normalize(Vec3{0.7, -0.2, 0.1});
        const CameraPose pose = pose_at(dir * -0.4, dir);
        const double t = optimize_offset(pose, Surface::Cylinder);
        CHECK(t == doctest::Approx(-0.4).epsilon(1e-6));
        CHECK(offset_objective(build_grid(pose, Surface::Cylinder, 10, 10), t) < 1e-20);
    }

    SUBCASE("beats a dense brute-force scan and both anchors")
    {
        std::mt19937_64 rng(61);
        for (int k = 0; k < 25; ++k) {
            const CameraPose pose = oracle::random_pose(rng);
            if (std::abs(pose.dir.z) > 0.6) {
                continue;
            }
            const DistortionGrid grid = build_grid(pose, Surface::Cylinder, 10, 10);
            const OffsetInterval range = feasible_offsets(pose, Surface::Cylinder, grid);
            const double t = optimize_offset(pose, Surface::Cylinder);
            REQUIRE(range.contains(t));
            const double best = offset_objective(grid, t);
            const auto scan = oracle::scan_minimum([&](double s) { return offset_objective(grid, s); }, range.lo,
                                                   range.hi, 10000);
            CHECK(best <= scan.value + 1e-12);
            CHECK(best <= offset_objective(grid, 0.0));
            const double t_heu = heuristic_offset(pose);
            if (range.contains(t_heu)) {
                CHECK(best <= offset_objective(grid, t_heu));
            }
        }
    }

    SUBCASE("coarse argmin stays near-optimal on a refined grid")
    {
        // The minimum is flat enough that the argmin itself can drift by more
        // than 1e-3 between resolutions while the objective barely changes.
        std::mt19937_64 rng(67);
        int compared = 0;
        for (int k = 0; k < 20; ++k) {
            const CameraPose pose = oracle::random_pose(rng, 0.6);
            if (std::abs(pose.dir.z) > 0.6) {
                continue;
            }
            const double coarse = optimize_offset(pose, Surface::Cylinder, 10, 10);
            const double fine = optimize_offset(pose, Surface::Cylinder, 20, 20);
            const DistortionGrid grid = build_grid(pose, Surface::Cylinder, 20, 20);
            CHECK(offset_objective(grid, coarse) <= 1.3 * offset_objective(grid, fine));
            ++compared;
        }
        CHECK(compared >= 5);
    }
}

TEST_CASE("feasible_offsets")
{
    const CameraPose pose = pose_at({0.3, 0.1, 0}, {1, 0, 0});
    const DistortionGrid grid = build_grid(pose, Surface::Sphere, 10, 10);
    const OffsetInterval range = feasible_offsets(pose, Surface::Sphere, grid);
    CHECK(range.lo < 0.0);
    CHECK(range.hi > 0.0);
    CHECK(norm(pose.pos - pose.dir * range.hi) < 1.0 - kInsideMargin);

    DistortionGrid behind = grid;
    for (Vec3& v : behind.verts_view) {
        v.z = 5.0;
    }
    try {
        feasible_offsets(pose, Surface::Sphere, behind);
        FAIL("expected InfeasibleInterval");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InfeasibleInterval);
    }
}

TEST_CASE("adjust_camera")
{
    SUBCASE("centered camera is a fixed point")
    {
        const CameraPose pose = pose_at({0, 0, 0}, {1, 0.3, 0});
        for (DollyMode mode : {DollyMode::Heuristic, DollyMode::Optimized}) {
            const DollySolution s = adjust_camera(pose, Surface::Cylinder, mode);
            CHECK(std::abs(s.t) < 1e-8);
            CHECK(norm(s.adjusted_pose.pos) < 1e-8);
            CHECK(s.d_adjusted < 1e-18);
        }
    }

    SUBCASE("trucking leaves the heuristic without effect")
    {
        const CameraPose pose = pose_at({0.5, 0, 0}, {0, 1, 0});
        const DollySolution s = adjust_camera(pose, Surface::Cylinder, DollyMode::Heuristic);
        CHECK(s.t == 0.0);
        CHECK(s.d_adjusted == s.d_original);
        CHECK(s.adjusted_pose.pos == pose.pos);
    }

    SUBCASE("dollying is fully corrected")
    {
        const Vec3 dir = normalize(Vec3{1, 1, 0});
        const CameraPose pose = pose_at(dir * -0.4, dir);
        const DollySolution s = adjust_camera(pose, Surface::Cylinder, DollyMode::Optimized);
        CHECK(s.d_original > 1e-6);
        CHECK(s.d_adjusted < 1e-20);
        CHECK(s.t == doctest::Approx(-0.4).epsilon(1e-6));
    }

    SUBCASE("solution invariants")
    {
        std::mt19937_64 rng(71);
        for (int k = 0; k < 60; ++k) {
            const CameraPose pose = oracle::random_pose(rng);
            if (std::abs(pose.dir.z) > 0.6) {
                continue;
            }
            for (DollyMode mode : {DollyMode::Heuristic, DollyMode::Optimized}) {
                const DollySolution s = adjust_camera(pose, Surface::Cylinder, mode);
                CHECK(s.d_original >= 0.0);
                CHECK(s.d_adjusted >= 0.0);
                CHECK(norm(s.adjusted_pose.pos - (pose.pos - pose.dir * s.t)) < 1e-15);
                CHECK(s.adjusted_pose.dir == pose.dir);
                CHECK(s.adjusted_pose.up == pose.up);
                if (mode == DollyMode::Heuristic) {
                    CHECK(norm(s.adjusted_pose.pos) <= norm(pose.pos) + 1e-12);
                }
                if (s.fallback) {
                    CHECK(s.t == 0.0);
                }
            }
        }
    }
}
