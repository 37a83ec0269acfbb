#include "panodolly/dollyzoom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "panodolly/error.hpp"

namespace panodolly {

const char* to_string(DollyMode mode)
{
    switch (mode) {
    case DollyMode::None: return "none";
    case DollyMode::Heuristic: return "heuristic";
    case DollyMode::Optimized: return "optimized";
    }
    return "none";
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Samples of the coarse scan that seeds the local refinement.
constexpr int kScanSamples = 256;
// Local minima of the scan that get refined.
constexpr int kRefinedBasins = 4;
constexpr double kOffsetTolerance = 1e-10;

Vec3 surface_point(Surface surface, const CameraPose& pose, double x, double y)
{
    const CylinderHit hit = intersect(surface, pose.pos, pixel_ray(pose, x, y));
    if (const auto* h = std::get_if<SurfaceHit>(&hit)) {
        return h->point;
    }
    throw Error(ErrorCode::CornerBehindCamera, "a frustum edge ray runs parallel to the cylinder axis");
}

Vec3 reproject(Surface surface, const Vec3& v)
{
    if (surface == Surface::Sphere) {
        return normalize(v);
    }
    // Central projection from the origin, so the vertex keeps its panorama texel.
    const double radial = std::hypot(v.x, v.y);
    if (!(radial > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "grid vertex lies on the cylinder axis");
    }
    return v / radial;
}

void cross_residuals(const std::vector<Vec2>& p, int rows, int cols, std::vector<double>& out)
{
    out.clear();
    const int stride = cols + 1;
    auto residual = [](const Vec2& a, const Vec2& b, const Vec2& c) {
        return (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    };
    for (int i = 0; i <= rows; ++i) {
        for (int j = 1; j < cols; ++j) {
            out.push_back(residual(p[i * stride + j - 1], p[i * stride + j], p[i * stride + j + 1]));
        }
    }
    for (int j = 0; j <= cols; ++j) {
        for (int i = 1; i < rows; ++i) {
            out.push_back(residual(p[(i - 1) * stride + j], p[i * stride + j], p[(i + 1) * stride + j]));
        }
    }
}

std::vector<Vec2> project_grid(const DistortionGrid& grid, double t)
{
    std::vector<Vec2> projected(grid.verts_view.size());
    for (std::size_t k = 0; k < projected.size(); ++k) {
        projected[k] = project_with_offset(grid.verts_view[k], t, grid.base, grid.height, grid.aspect);
    }
    return projected;
}

struct Minimum {
    double t = 0.0;
    double value = std::numeric_limits<double>::infinity();
};

// Brent's derivative-free minimizer (golden section with parabolic steps) on
// [a, b].
template <class F>
Minimum brent_minimize(F&& f, double a, double b, double tol, int max_iter = 200)
{
    const double golden = 0.5 * (3.0 - std::sqrt(5.0));
    double x = a + golden * (b - a);
    double w = x;
    double v = x;
    double fx = f(x);
    double fw = fx;
    double fv = fx;
    double d = 0.0;
    double e = 0.0;

    for (int iter = 0; iter < max_iter; ++iter) {
        const double mid = 0.5 * (a + b);
        const double tol1 = 2.0 * kEps * std::abs(x) + tol / 3.0;
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - mid) <= tol2 - 0.5 * (b - a)) {
            break;
        }
        bool golden_step = true;
        if (std::abs(e) > tol1) {
            const double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) {
                p = -p;
            } else {
                q = -q;
            }
            const double e_prev = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * e_prev) && p > q * (a - x) && p < q * (b - x)) {
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2) {
                    d = std::copysign(tol1, mid - x);
                }
                golden_step = false;
            }
        }
        if (golden_step) {
            e = (x >= mid) ? a - x : b - x;
            d = golden * e;
        }
        const double u = std::abs(d) >= tol1 ? x + d : x + std::copysign(tol1, d);
        const double fu = f(u);
        if (fu <= fx) {
            (u >= x ? a : b) = x;
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            (u < x ? a : b) = u;
            if (fu <= fw || w == x) {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u;
                fv = fu;
            }
        }
    }
    return {x, fx};
}

// Gauss-Newton polish on the cross-product residuals; only accepts steps that
// lower the objective.
Minimum polish(const DistortionGrid& grid, const OffsetInterval& range, Minimum start)
{
    std::vector<double> r0;
    std::vector<double> r_plus;
    std::vector<double> r_minus;
    Minimum best = start;
    for (int iter = 0; iter < 8; ++iter) {
        const double t = best.t;
        const double h = 1e-6 * std::max(1.0, std::abs(t));
        if (!range.contains(t - h) || !range.contains(t + h)) {
            break;
        }
        cross_residuals(project_grid(grid, t), grid.rows, grid.cols, r0);
        cross_residuals(project_grid(grid, t + h), grid.rows, grid.cols, r_plus);
        cross_residuals(project_grid(grid, t - h), grid.rows, grid.cols, r_minus);
        double jtr = 0.0;
        double jtj = 0.0;
        for (std::size_t k = 0; k < r0.size(); ++k) {
            const double jac = (r_plus[k] - r_minus[k]) / (2.0 * h);
            jtr += jac * r0[k];
            jtj += jac * jac;
        }
        if (!(jtj > 0.0)) {
            break;
        }
        const double candidate = t - jtr / jtj;
        if (!range.contains(candidate) || candidate == t) {
            break;
        }
        const double value = offset_objective(grid, candidate);
        if (!(value < best.value)) {
            break;
        }
        best = {candidate, value};
    }
    return best;
}

}  // namespace

double heuristic_offset(const CameraPose& pose)
{
    const double t = dot(pose.pos, pose.dir);
    // A dot product at rounding level means the camera trucks sideways.
    if (std::abs(t) <= 8.0 * kEps * norm(pose.pos)) {
        return 0.0;
    }
    return t;
}

Vec3 offset_position(const CameraPose& pose, double t)
{
    const Vec3 moved = pose.pos - pose.dir * t;
    // Residue of a collinear position is rounding noise; land on the origin.
    if (norm(moved) <= 8.0 * kEps * norm(pose.pos)) {
        return {0.0, 0.0, 0.0};
    }
    return moved;
}

CameraPose refit_fov(const CameraPose& pose, const Vec3& new_pos, Surface surface)
{
    if (new_pos == pose.pos) {
        return pose;
    }
    if (!(norm(new_pos) < 1.0 - kInsideMargin)) {
        throw Error(ErrorCode::PoseOutsideSurface, "position outside unit surface");
    }

    auto half_angle = [&](double x, double side) {
        const CylinderHit hit = intersect(surface, pose.pos, pixel_ray(pose, x, 0.5));
        const auto* h = std::get_if<SurfaceHit>(&hit);
        if (h == nullptr) {
            throw Error(ErrorCode::RefitBehindCamera, "middle ray runs parallel to the cylinder axis");
        }
        const Vec3 q = h->point - new_pos;
        const double along = dot(q, pose.dir);
        const double lateral = side * dot(q, pose.left);
        const double angle = std::atan2(lateral, along);
        if (!(along > 0.0) || !(angle > 0.0)) {
            throw Error(ErrorCode::RefitBehindCamera, "refit anchor is not in front of the moved camera");
        }
        return angle;
    };

    CameraPose adjusted = pose;
    adjusted.pos = new_pos;
    adjusted.fovx_left = half_angle(0.0, 1.0);
    adjusted.fovx_right = half_angle(1.0, -1.0);
    const double width = std::tan(adjusted.fovx_left) + std::tan(adjusted.fovx_right);
    adjusted.fovy = 2.0 * std::atan(width / pose.aspect / 2.0);
    return adjusted;
}

DistortionGrid build_grid(const CameraPose& pose, Surface surface, int rows, int cols)
{
    if (rows < 2 || cols < 2) {
        throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 rows and 2 columns");
    }
    const Vec3 top_left = surface_point(surface, pose, 0.0, 0.0);
    const Vec3 top_right = surface_point(surface, pose, 1.0, 0.0);
    const Vec3 bottom_left = surface_point(surface, pose, 0.0, 1.0);
    const Vec3 bottom_right = surface_point(surface, pose, 1.0, 1.0);

    DistortionGrid grid;
    grid.rows = rows;
    grid.cols = cols;
    grid.aspect = pose.aspect;
    const auto count = static_cast<std::size_t>(rows + 1) * (cols + 1);
    grid.verts.reserve(count);
    grid.verts_view.reserve(count);
    for (int i = 0; i <= rows; ++i) {
        const double s = static_cast<double>(i) / rows;
        const Vec3 left_edge = top_left * (1.0 - s) + bottom_left * s;
        const Vec3 right_edge = top_right * (1.0 - s) + bottom_right * s;
        for (int j = 0; j <= cols; ++j) {
            const double r = static_cast<double>(j) / cols;
            Vec3 v = left_edge * (1.0 - r) + right_edge * r;
            // Corners already lie on the surface; keep them bit-exact.
            const bool corner = (i == 0 || i == rows) && (j == 0 || j == cols);
            if (!corner) {
                v = reproject(surface, v);
            }
            grid.verts.push_back(v);
            grid.verts_view.push_back(view_transform(pose, v));
        }
    }

    grid.base = -0.25 * (view_transform(pose, top_left).z + view_transform(pose, top_right).z +
                         view_transform(pose, bottom_left).z + view_transform(pose, bottom_right).z);
    grid.height = grid.base * std::tan(pose.fovy / 2.0);
    return grid;
}

double linearity(const Vec2& a, const Vec2& b, const Vec2& c)
{
    const double cross = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    return cross * cross;
}

Vec2 project_with_offset(const Vec3& v_view, double t, double base, double height, double aspect)
{
    const double depth = -v_view.z + t;
    if (!(depth > 0.0) || !(base + t > 0.0)) {
        throw Error(ErrorCode::PointBehindCamera, "grid vertex is behind the offset camera");
    }
    const double zoom = height / (base + t);
    return {v_view.x / (aspect * zoom * depth), v_view.y / (zoom * depth)};
}

double lattice_linearity(const std::vector<Vec2>& projected, int rows, int cols)
{
    std::vector<double> residuals;
    cross_residuals(projected, rows, cols, residuals);
    return std::accumulate(residuals.begin(), residuals.end(), 0.0,
                           [](double acc, double r) { return acc + r * r; });
}

double distortion_value(const CameraPose& pose, Surface surface, int rows, int cols)
{
    const DistortionGrid grid = build_grid(pose, surface, rows, cols);
    std::vector<Vec2> projected;
    projected.reserve(grid.verts.size());
    for (const Vec3& v : grid.verts) {
        projected.push_back(project_to_image(pose, v));
    }
    return lattice_linearity(projected, rows, cols);
}

double offset_objective(const DistortionGrid& grid, double t)
{
    return lattice_linearity(project_grid(grid, t), grid.rows, grid.cols);
}

OffsetInterval feasible_offsets(const CameraPose& pose, Surface surface, const DistortionGrid& grid)
{
    // Inside the sphere of radius R: |P - t dir|^2 < R^2. Twice the pose margin
    // keeps the refitted camera valid at the interval ends.
    const double radius = 1.0 - 2.0 * kInsideMargin;
    const double pd = dot(pose.pos, pose.dir);
    const double disc = pd * pd - norm_squared(pose.pos) + radius * radius;
    if (!(disc > 0.0)) {
        throw Error(ErrorCode::InfeasibleInterval, "camera cannot stay inside the unit surface");
    }
    const double half = std::sqrt(disc);
    OffsetInterval range{pd - half, pd + half};

    // Moving back by t turns view depth -z into -z + t.
    double nearest = -grid.base;
    for (const Vec3& v : grid.verts_view) {
        nearest = std::max(nearest, v.z);
    }
    for (double x : {0.0, 1.0}) {
        const CylinderHit hit = intersect(surface, pose.pos, pixel_ray(pose, x, 0.5));
        if (const auto* h = std::get_if<SurfaceHit>(&hit)) {
            nearest = std::max(nearest, view_transform(pose, h->point).z);
        }
    }
    range.lo = std::max(range.lo, nearest + kMinDepth);
    if (!(range.lo < range.hi)) {
        throw Error(ErrorCode::InfeasibleInterval, "no offset keeps the camera inside and the grid in front");
    }
    return range;
}

double optimize_offset(const CameraPose& pose, Surface surface, int rows, int cols)
{
    const DistortionGrid grid = build_grid(pose, surface, rows, cols);
    const OffsetInterval range = feasible_offsets(pose, surface, grid);
    auto objective = [&grid](double t) { return offset_objective(grid, t); };

    std::vector<double> ts(kScanSamples);
    std::vector<double> values(kScanSamples);
    for (int k = 0; k < kScanSamples; ++k) {
        ts[k] = std::min(range.lo + (range.hi - range.lo) * k / (kScanSamples - 1), range.hi);
        values[k] = objective(ts[k]);
    }

    std::vector<int> basins;
    for (int k = 0; k < kScanSamples; ++k) {
        const bool below_prev = k == 0 || values[k] <= values[k - 1];
        const bool below_next = k == kScanSamples - 1 || values[k] <= values[k + 1];
        if (below_prev && below_next) {
            basins.push_back(k);
        }
    }
    std::sort(basins.begin(), basins.end(), [&](int a, int b) { return values[a] < values[b]; });
    if (basins.size() > kRefinedBasins) {
        basins.resize(kRefinedBasins);
    }

    Minimum best;
    auto consider = [&best](const Minimum& m) {
        if (m.value < best.value) {
            best = m;
        }
    };
    for (double anchor : {0.0, heuristic_offset(pose)}) {
        if (range.contains(anchor)) {
            consider({anchor, objective(anchor)});
        }
    }
    for (int k : basins) {
        consider({ts[k], values[k]});
        const double a = ts[std::max(k - 1, 0)];
        const double b = ts[std::min(k + 1, kScanSamples - 1)];
        const Minimum local = brent_minimize(objective, a, b, kOffsetTolerance);
        consider(polish(grid, range, local));
    }
    return best.t;
}

DollySolution apply_offset(const CameraPose& pose, Surface surface, DollyMode mode, double t, int rows, int cols)
{
    DollySolution solution;
    solution.mode = mode;
    solution.adjusted_pose = pose;
    solution.d_original = distortion_value(pose, surface, rows, cols);
    solution.d_adjusted = solution.d_original;
    if (t == 0.0) {
        return solution;
    }

    try {
        solution.adjusted_pose = refit_fov(pose, offset_position(pose, t), surface);
        solution.d_adjusted = distortion_value(solution.adjusted_pose, surface, rows, cols);
        solution.t = t;
    } catch (const Error&) {
        solution.adjusted_pose = pose;
        solution.d_adjusted = solution.d_original;
        solution.t = 0.0;
        solution.fallback = true;
    }
    return solution;
}

DollySolution adjust_camera(const CameraPose& pose, Surface surface, DollyMode mode, int rows, int cols)
{
    double t = 0.0;
    if (mode == DollyMode::Heuristic) {
        t = heuristic_offset(pose);
    } else if (mode == DollyMode::Optimized) {
        t = optimize_offset(pose, surface, rows, cols);
    }
    return apply_offset(pose, surface, mode, t, rows, cols);
}

}  // namespace panodolly
