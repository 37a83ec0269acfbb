#pragma once

#include <numbers>
#include <variant>

#include "panodolly/vec.hpp"

namespace panodolly {

inline constexpr double kPi = std::numbers::pi;

/// Cameras must stay this far inside the unit surface.
inline constexpr double kInsideMargin = 1e-6;

/// Rays whose horizontal extent a' = ray_x^2 + ray_y^2 falls below this never
/// meet the infinite cylinder and are sent to the panorama pole instead.
inline constexpr double kAxisEpsilon = 1e-9;

enum class Surface { Sphere, Cylinder };

const char* to_string(Surface surface);

/// Zenith theta in [0, pi] measured from +z, azimuth phi in [0, 2 pi)
/// counterclockwise about +z starting at +x.
struct SphericalCoord {
    double theta = 0.0;
    double phi = 0.0;
};

struct Uv {
    double u = 0.0;
    double v = 0.0;
};

/// Pinhole camera inside the unit surface. The near plane sits at distance 1
/// along dir; horizontal half-angles may differ (skewed frustum), the vertical
/// field of view is always symmetric.
struct CameraPose {
    Vec3 pos;
    Vec3 dir{1.0, 0.0, 0.0};
    Vec3 up{0.0, 0.0, 1.0};
    Vec3 left{0.0, 1.0, 0.0};
    double fovx_left = kPi / 4.0;
    double fovx_right = kPi / 4.0;
    double fovy = kPi / 2.0;
    double aspect = 1.0;

    bool symmetric() const { return fovx_left == fovx_right; }
};

/// Builds a symmetric camera. dir is normalized, up is re-orthogonalized
/// against dir, left = up x dir and fovy follows from fovx and aspect.
/// Throws PoseOutsideSurface, DegenerateBasis or InvalidArgument.
CameraPose make_camera(const Vec3& pos, const Vec3& dir, const Vec3& up, double fovx, double aspect);

/// Unit viewing ray through normalized image position (X, Y); X runs left to
/// right and Y top to bottom, both in [0, 1].
Vec3 pixel_ray(const CameraPose& pose, double x, double y);

struct SurfaceHit {
    Vec3 point;
    double t = 0.0;
};

/// Stand-in for a (near) axis-parallel ray that never meets the cylinder.
struct PoleFallback {
    double theta = 0.0;
};

using CylinderHit = std::variant<SurfaceHit, PoleFallback>;

/// Forward intersection of P + t ray with the unit sphere. Requires |P| < 1.
SurfaceHit intersect_sphere(const Vec3& origin, const Vec3& ray);

/// Forward intersection of P + t ray with the unit upright cylinder.
/// Requires P_x^2 + P_y^2 < 1.
CylinderHit intersect_cylinder(const Vec3& origin, const Vec3& ray);

/// Dispatches on surface; the sphere never produces a PoleFallback.
CylinderHit intersect(Surface surface, const Vec3& origin, const Vec3& ray);

/// Throws ZeroVector for v = 0. The azimuth of a polar direction is 0.
SphericalCoord dir_to_spherical(const Vec3& v);

Uv spherical_to_uv(const SphericalCoord& s);

/// World to view space: camera at the origin, left on -x, up on +y and dir on
/// -z. Points in front of the camera have negative z.
Vec3 view_transform(const CameraPose& pose, const Vec3& p);

/// Perspective projection onto the normalized image plane, where the frustum
/// spans [-1, 1] on both axes (x to the right, y up). Throws PointBehindCamera.
Vec2 project_to_image(const CameraPose& pose, const Vec3& p);

}  // namespace panodolly
