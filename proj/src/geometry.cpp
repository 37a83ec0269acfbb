#include "panodolly/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "panodolly/error.hpp"

namespace panodolly {

const char* to_string(Surface surface)
{
    return surface == Surface::Sphere ? "sphere" : "cylinder";
}

namespace {

// Larger root of a t^2 + b t + c = 0 for c < 0, a > 0. Picks the cancellation
// free form depending on the sign of b.
double positive_root(double a, double b, double c)
{
    const double disc = std::sqrt(std::max(0.0, b * b - 4.0 * a * c));
    if (b <= 0.0) {
        return (-b + disc) / (2.0 * a);
    }
    return (2.0 * c) / (-b - disc);
}

}  // namespace

CameraPose make_camera(const Vec3& pos, const Vec3& dir, const Vec3& up, double fovx, double aspect)
{
    if (!(norm(pos) < 1.0 - kInsideMargin)) {
        throw Error(ErrorCode::PoseOutsideSurface, "position outside unit surface");
    }
    if (!(fovx > 0.0 && fovx < kPi)) {
        throw Error(ErrorCode::InvalidArgument, "fovx must lie in (0, pi)");
    }
    if (!(aspect > 0.0) || !std::isfinite(aspect)) {
        throw Error(ErrorCode::InvalidArgument, "aspect must be positive");
    }
    const double dir_len = norm(dir);
    const double up_len = norm(up);
    if (!(dir_len > 0.0) || !(up_len > 0.0)) {
        throw Error(ErrorCode::DegenerateBasis, "dir and up must be nonzero");
    }
    const Vec3 d = dir / dir_len;
    if (norm(cross(d, up / up_len)) < 1e-9) {
        throw Error(ErrorCode::DegenerateBasis, "dir and up are parallel");
    }

    CameraPose pose;
    pose.pos = pos;
    pose.dir = d;
    pose.up = normalize(up - d * dot(up, d));
    pose.left = cross(pose.up, pose.dir);
    pose.fovx_left = fovx / 2.0;
    pose.fovx_right = fovx / 2.0;
    pose.fovy = 2.0 * std::atan(std::tan(fovx / 2.0) / aspect);
    pose.aspect = aspect;
    return pose;
}

Vec3 pixel_ray(const CameraPose& pose, double x, double y)
{
    double horizontal = 0.0;
    if (pose.symmetric()) {
        horizontal = (1.0 - 2.0 * x) * std::tan(pose.fovx_left);
    } else {
        horizontal = (1.0 - x) * std::tan(pose.fovx_left) - x * std::tan(pose.fovx_right);
    }
    const double vertical = (1.0 - 2.0 * y) * std::tan(pose.fovy / 2.0);
    return normalize(pose.dir + pose.left * horizontal + pose.up * vertical);
}

SurfaceHit intersect_sphere(const Vec3& origin, const Vec3& ray)
{
    const double a = norm_squared(ray);
    const double b = 2.0 * dot(origin, ray);
    const double c = norm_squared(origin) - 1.0;
    const double t = positive_root(a, b, c);
    return {origin + ray * t, t};
}

CylinderHit intersect_cylinder(const Vec3& origin, const Vec3& ray)
{
    const double a = ray.x * ray.x + ray.y * ray.y;
    if (a < kAxisEpsilon) {
        return PoleFallback{ray.z > 0.0 ? 0.0 : kPi};
    }
    const double b = 2.0 * (origin.x * ray.x + origin.y * ray.y);
    const double c = origin.x * origin.x + origin.y * origin.y - 1.0;
    const double t = positive_root(a, b, c);
    return SurfaceHit{origin + ray * t, t};
}

CylinderHit intersect(Surface surface, const Vec3& origin, const Vec3& ray)
{
    if (surface == Surface::Sphere) {
        return intersect_sphere(origin, ray);
    }
    return intersect_cylinder(origin, ray);
}

SphericalCoord dir_to_spherical(const Vec3& v)
{
    const double len = norm(v);
    if (!(len > 0.0)) {
        throw Error(ErrorCode::ZeroVector, "cannot convert a zero vector to spherical coordinates");
    }
    SphericalCoord s;
    s.theta = std::acos(std::clamp(v.z / len, -1.0, 1.0));
    if (v.x == 0.0 && v.y == 0.0) {
        s.phi = 0.0;
        return s;
    }
    double phi = std::atan2(v.y, v.x);
    if (phi < 0.0) {
        phi += 2.0 * kPi;
    }
    // -tiny + 2 pi rounds to 2 pi
    s.phi = phi >= 2.0 * kPi ? 0.0 : phi;
    return s;
}

Uv spherical_to_uv(const SphericalCoord& s)
{
    return {s.phi / (2.0 * kPi), s.theta / kPi};
}

Vec3 view_transform(const CameraPose& pose, const Vec3& p)
{
    const Vec3 q = p - pose.pos;
    return {-dot(q, pose.left), dot(q, pose.up), -dot(q, pose.dir)};
}

Vec2 project_to_image(const CameraPose& pose, const Vec3& p)
{
    const Vec3 q = view_transform(pose, p);
    if (!(q.z < 0.0)) {
        throw Error(ErrorCode::PointBehindCamera, "point is not in front of the camera");
    }
    const double tan_left = std::tan(pose.fovx_left);
    const double tan_right = std::tan(pose.fovx_right);
    const double half_width = 0.5 * (tan_left + tan_right);
    const double center = 0.5 * (tan_right - tan_left);
    const double tx = q.x / -q.z;
    const double ty = q.y / -q.z;
    return {(tx - center) / half_width, ty / std::tan(pose.fovy / 2.0)};
}

}  // namespace panodolly
