#pragma once

#include "panodolly/dollyzoom.hpp"
#include "panodolly/geometry.hpp"
#include "panodolly/panorama.hpp"

namespace panodolly {

struct RenderRequest {
    CameraPose pose;
    Surface surface = Surface::Cylinder;
    DollyMode dolly_mode = DollyMode::None;
    int out_width = 0;
    int out_height = 0;
    int grid_rows = kDefaultGridRows;
    int grid_cols = kDefaultGridCols;
};

/// Panorama coordinates seen through image position (X, Y).
Uv sample_direction(const CameraPose& pose, Surface surface, double x, double y);

/// Returns pose with aspect replaced; fovy is re-derived from the horizontal
/// extent so the output pixels stay square.
CameraPose with_aspect(const CameraPose& pose, double aspect);

/// Pose actually rendered for a request: aspect taken from the output size,
/// then dolly-zoom adjusted when requested.
DollySolution resolve_pose(const RenderRequest& req);

/// Renders pose as is (no dolly adjustment). Rows are split across hardware
/// threads; output does not depend on the split.
RenderedImage render_view(const CameraPose& pose, Surface surface, int width, int height,
                          const PanoramaImage& pano);

RenderedImage render(const RenderRequest& req, const PanoramaImage& pano);

}  // namespace panodolly
