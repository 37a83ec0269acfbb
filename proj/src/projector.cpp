#include "panodolly/projector.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "panodolly/error.hpp"

namespace panodolly {

Uv sample_direction(const CameraPose& pose, Surface surface, double x, double y)
{
    const CylinderHit hit = intersect(surface, pose.pos, pixel_ray(pose, x, y));
    if (const auto* pole = std::get_if<PoleFallback>(&hit)) {
        return {0.0, pole->theta / kPi};
    }
    return spherical_to_uv(dir_to_spherical(std::get<SurfaceHit>(hit).point));
}

CameraPose with_aspect(const CameraPose& pose, double aspect)
{
    if (!(aspect > 0.0) || !std::isfinite(aspect)) {
        throw Error(ErrorCode::InvalidArgument, "aspect must be positive");
    }
    CameraPose out = pose;
    out.aspect = aspect;
    const double width = std::tan(pose.fovx_left) + std::tan(pose.fovx_right);
    out.fovy = 2.0 * std::atan(width / aspect / 2.0);
    return out;
}

DollySolution resolve_pose(const RenderRequest& req)
{
    if (req.out_width < 1 || req.out_height < 1) {
        throw Error(ErrorCode::InvalidArgument, "output size must be positive");
    }
    const CameraPose pose = with_aspect(req.pose, static_cast<double>(req.out_width) / req.out_height);
    return adjust_camera(pose, req.surface, req.dolly_mode, req.grid_rows, req.grid_cols);
}

RenderedImage render_view(const CameraPose& pose, Surface surface, int width, int height,
                          const PanoramaImage& pano)
{
    if (width < 1 || height < 1) {
        throw Error(ErrorCode::InvalidArgument, "output size must be positive");
    }
    RenderedImage out(width, height);
    auto render_rows = [&](int first, int last) {
        for (int py = first; py < last; ++py) {
            const double y = (py + 0.5) / height;
            for (int px = 0; px < width; ++px) {
                const Uv uv = sample_direction(pose, surface, (px + 0.5) / width, y);
                const Rgb color = sample_bilinear(pano, uv.u, uv.v);
                std::uint8_t* dst = out.at(px, py);
                dst[0] = to_byte(color.r);
                dst[1] = to_byte(color.g);
                dst[2] = to_byte(color.b);
            }
        }
    };

    const int workers = std::clamp(static_cast<int>(std::thread::hardware_concurrency()), 1, height);
    if (workers == 1) {
        render_rows(0, height);
        return out;
    }
    {
        std::vector<std::jthread> pool;
        const int chunk = (height + workers - 1) / workers;
        for (int first = 0; first < height; first += chunk) {
            pool.emplace_back(render_rows, first, std::min(height, first + chunk));
        }
    }
    return out;
}

RenderedImage render(const RenderRequest& req, const PanoramaImage& pano)
{
    const DollySolution solution = resolve_pose(req);
    return render_view(solution.adjusted_pose, req.surface, req.out_width, req.out_height, pano);
}

}  // namespace panodolly
