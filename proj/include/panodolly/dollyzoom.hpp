#pragma once

#include <vector>

#include "panodolly/geometry.hpp"
#include "panodolly/vec.hpp"

namespace panodolly {

inline constexpr int kDefaultGridRows = 10;
inline constexpr int kDefaultGridCols = 10;

/// Grid vertices closer than this to the (offset) camera plane are infeasible.
inline constexpr double kMinDepth = 1e-6;

enum class DollyMode { None, Heuristic, Optimized };

const char* to_string(DollyMode mode);

/// Surface-projected lattice spanning a camera's view, (rows + 1) x (cols + 1)
/// vertices stored row-major; row 0 is the top image edge.
struct DistortionGrid {
    int rows = 0;
    int cols = 0;
    std::vector<Vec3> verts;       // on the surface, world space
    std::vector<Vec3> verts_view;  // same points in the camera's view space
    double base = 0.0;             // B: depth of the pre-projection grid plane
    double height = 0.0;           // H = B tan(fovy / 2)
    double aspect = 1.0;

    int index(int i, int j) const { return i * (cols + 1) + j; }
    const Vec3& vert(int i, int j) const { return verts[index(i, j)]; }
    const Vec3& vert_view(int i, int j) const { return verts_view[index(i, j)]; }
};

/// Dolly-zoom adjusted camera. t is a backward displacement along dir:
/// adjusted_pose.pos = pose.pos - t dir.
struct DollySolution {
    double t = 0.0;
    CameraPose adjusted_pose;
    double d_original = 0.0;
    double d_adjusted = 0.0;
    DollyMode mode = DollyMode::None;
    bool fallback = false;  // refit failed; adjusted_pose is the original pose
};

struct OffsetInterval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double t) const { return t >= lo && t <= hi; }
};

/// Offset that moves the camera to the point of its looking line nearest the
/// origin (t = P . dir).
double heuristic_offset(const CameraPose& pose);

/// pose.pos - t dir. A result at rounding level of the origin is the origin.
Vec3 offset_position(const CameraPose& pose, double t);

/// Re-derives the horizontal half-angles so that the left-middle and
/// right-middle rays from new_pos hit the same surface points as the original
/// camera's, and sizes fovy from the refitted width. dir and up are kept.
/// Throws PoseOutsideSurface or RefitBehindCamera.
CameraPose refit_fov(const CameraPose& pose, const Vec3& new_pos, Surface surface);

/// Throws InvalidArgument for rows or cols < 2, CornerBehindCamera when a
/// corner ray misses the surface.
DistortionGrid build_grid(const CameraPose& pose, Surface surface, int rows, int cols);

/// Squared 2D cross product of (b - a) and (c - a).
double linearity(const Vec2& a, const Vec2& b, const Vec2& c);

/// Image-plane position of a view-space point seen from a camera moved back by
/// t along the view axis and re-zoomed so the grid plane keeps its framing.
/// Throws PointBehindCamera.
Vec2 project_with_offset(const Vec3& v_view, double t, double base, double height, double aspect);

/// Sum of linearity over consecutive vertex triples of every row and column of
/// a projected (rows + 1) x (cols + 1) lattice.
double lattice_linearity(const std::vector<Vec2>& projected, int rows, int cols);

/// Distortion value of a camera measured on its own grid.
double distortion_value(const CameraPose& pose, Surface surface, int rows = kDefaultGridRows,
                        int cols = kDefaultGridCols);

/// Objective of the offset search: the grid's distortion seen through
/// project_with_offset at offset t. Throws PointBehindCamera outside the
/// feasible range.
double offset_objective(const DistortionGrid& grid, double t);

/// Offsets for which the moved camera stays inside the unit sphere (with
/// margin) and every grid vertex plus both refit anchors stay in front.
/// Throws InfeasibleInterval when empty.
OffsetInterval feasible_offsets(const CameraPose& pose, Surface surface, const DistortionGrid& grid);

/// Minimizer of offset_objective over feasible_offsets on the pose's grid.
double optimize_offset(const CameraPose& pose, Surface surface, int rows = kDefaultGridRows,
                       int cols = kDefaultGridCols);

/// Moves the camera back by t, refits its frustum and measures both poses on
/// their own grids. A failed refit yields the original pose with fallback set.
DollySolution apply_offset(const CameraPose& pose, Surface surface, DollyMode mode, double t,
                           int rows = kDefaultGridRows, int cols = kDefaultGridCols);

DollySolution adjust_camera(const CameraPose& pose, Surface surface, DollyMode mode, int rows = kDefaultGridRows,
                            int cols = kDefaultGridCols);

}  // namespace panodolly
