// panodolly: render off-center perspective views of an equirectangular
// panorama, solve dolly-zoom camera adjustments and run distortion sweeps.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "panodolly/dollyzoom.hpp"
#include "panodolly/error.hpp"
#include "panodolly/evaluation.hpp"
#include "panodolly/panorama.hpp"
#include "panodolly/projector.hpp"

using namespace panodolly;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

constexpr double kDegree = kPi / 180.0;

int exit_code(ErrorCode code)
{
    switch (code) {
    case ErrorCode::PoseOutsideSurface:
    case ErrorCode::DegenerateBasis:
    case ErrorCode::InvalidArgument:
    case ErrorCode::EmptyInput:
        return kExitValidation;
    case ErrorCode::IoError:
    case ErrorCode::DecodeError:
        return kExitIo;
    default:
        return kExitNumeric;
    }
}

Vec3 parse_vec3(const std::string& text, const char* flag)
{
    std::vector<double> parts;
    std::istringstream in(text);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(cell, &used));
            if (used != cell.size()) {
                throw std::invalid_argument(cell);
            }
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, std::string(flag) + " expects x,y,z, got '" + text + "'");
        }
    }
    if (parts.size() != 3) {
        throw Error(ErrorCode::InvalidArgument, std::string(flag) + " expects x,y,z, got '" + text + "'");
    }
    return {parts[0], parts[1], parts[2]};
}

struct Orientation {
    Vec3 dir;
    Vec3 up;
};

// Starting from dir = +x, up = +z: yaw about +z, then pitch about the camera's
// left axis (positive looks up), then roll about dir (positive tilts up
// toward the right).
Orientation orientation_from_euler(double yaw, double pitch, double roll)
{
    Vec3 dir{std::cos(yaw), std::sin(yaw), 0.0};
    Vec3 up{0.0, 0.0, 1.0};
    const Vec3 pitched_dir = dir * std::cos(pitch) + up * std::sin(pitch);
    up = up * std::cos(pitch) - dir * std::sin(pitch);
    dir = pitched_dir;
    const Vec3 left = cross(up, dir);
    up = up * std::cos(roll) - left * std::sin(roll);
    return {dir, up};
}

struct PoseFlags {
    std::string pos = "0,0,0";
    double yaw = 0.0;
    double pitch = 0.0;
    double roll = 0.0;
    std::string dir;
    std::string up;
    double fovx = 90.0;

    void add_to(CLI::App& cmd)
    {
        cmd.add_option("--pos", pos, "Camera position x,y,z inside the unit surface")->capture_default_str();
        cmd.add_option("--yaw", yaw, "Yaw about +z in degrees");
        cmd.add_option("--pitch", pitch, "Pitch about the camera's left axis in degrees");
        cmd.add_option("--roll", roll, "Roll about the looking direction in degrees");
        auto* dir_opt = cmd.add_option("--dir", dir, "Looking direction x,y,z (overrides yaw/pitch/roll)");
        cmd.add_option("--up", up, "Up vector x,y,z, used with --dir")->needs(dir_opt);
        cmd.add_option("--fovx", fovx, "Horizontal field of view in degrees")->capture_default_str();
    }

    CameraPose build(double aspect) const
    {
        const Vec3 position = parse_vec3(pos, "--pos");
        Orientation o;
        if (!dir.empty()) {
            o.dir = parse_vec3(dir, "--dir");
            o.up = up.empty() ? Vec3{0.0, 0.0, 1.0} : parse_vec3(up, "--up");
        } else {
            o = orientation_from_euler(yaw * kDegree, pitch * kDegree, roll * kDegree);
        }
        return make_camera(position, o.dir, o.up, fovx * kDegree, aspect);
    }
};

const std::map<std::string, Surface> kSurfaces{{"sphere", Surface::Sphere}, {"cylinder", Surface::Cylinder}};
const std::map<std::string, DollyMode> kDollyModes{
    {"none", DollyMode::None}, {"heuristic", DollyMode::Heuristic}, {"optimized", DollyMode::Optimized}};

json vec_json(const Vec3& v)
{
    return json::array({v.x, v.y, v.z});
}

json solution_json(const DollySolution& s)
{
    const CameraPose& p = s.adjusted_pose;
    json j;
    j["t"] = s.t;
    j["pos"] = vec_json(p.pos);
    j["dir"] = vec_json(p.dir);
    j["up"] = vec_json(p.up);
    j["fovx_left"] = p.fovx_left;
    j["fovx_right"] = p.fovx_right;
    j["fovy"] = p.fovy;
    j["d_original"] = s.d_original;
    j["d_adjusted"] = s.d_adjusted;
    j["mode"] = to_string(s.mode);
    j["fallback"] = s.fallback;
    return j;
}

std::pair<int, int> parse_size(const std::string& text)
{
    int w = 0;
    int h = 0;
    char sep = 0;
    std::istringstream in(text);
    if (!(in >> w >> sep >> h) || (sep != 'x' && sep != 'X') || !in.eof() || w < 1 || h < 1) {
        throw Error(ErrorCode::InvalidArgument, "--size expects WxH, got '" + text + "'");
    }
    return {w, h};
}

void print_quartile_table(const std::vector<SweepRecord>& records)
{
    std::vector<double> ori;
    std::vector<double> heu;
    std::vector<double> opt;
    for (const SweepRecord& r : records) {
        ori.push_back(r.d_orig);
        heu.push_back(r.d_heu);
        opt.push_back(r.d_opt);
    }
    const std::pair<const char*, Quartiles> rows[] = {
        {"Ori.", quartiles(ori)}, {"Heu.", quartiles(heu)}, {"Opt.", quartiles(opt)}};

    std::printf("%-7s %12s %12s %12s %12s %12s\n", "Method", "Zeroth-q", "First-q", "Second-q", "Third-q",
                "Fourth-q");
    json j;
    j["count"] = records.size();
    for (const auto& [name, q] : rows) {
        std::printf("%-7s %12.4g %12.4g %12.4g %12.4g %12.4g\n", name, q.q0, q.q1, q.q2, q.q3, q.q4);
        std::string key = name;
        key.pop_back();
        for (char& c : key) {
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
        j[key] = json::array({q.q0, q.q1, q.q2, q.q3, q.q4});
    }
    std::cout << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Off-center panorama rendering with cylindrical projection and dolly-zoom correction"};
    app.require_subcommand(1);

    // render
    auto* render_cmd = app.add_subcommand("render", "Render a perspective view of a panorama");
    PoseFlags render_pose;
    render_pose.add_to(*render_cmd);
    std::string pano_path;
    std::string out_path;
    std::string size = "1280x720";
    Surface render_surface = Surface::Cylinder;
    DollyMode render_dolly = DollyMode::None;
    render_cmd->add_option("--pano", pano_path, "Equirectangular panorama (PNG or JPEG)")->required();
    render_cmd->add_option("--out", out_path, "Output PNG")->required();
    render_cmd->add_option("--size", size, "Output size WxH")->capture_default_str();
    render_cmd->add_option("--surface", render_surface, "sphere or cylinder")
        ->transform(CLI::CheckedTransformer(kSurfaces, CLI::ignore_case))
        ->default_str("cylinder");
    render_cmd->add_option("--dolly", render_dolly, "none, heuristic or optimized")
        ->transform(CLI::CheckedTransformer(kDollyModes, CLI::ignore_case))
        ->default_str("none");

    // adjust
    auto* adjust_cmd = app.add_subcommand("adjust", "Solve the dolly-zoom adjusted camera and print it as JSON");
    PoseFlags adjust_pose;
    adjust_pose.add_to(*adjust_cmd);
    double adjust_aspect = 16.0 / 9.0;
    Surface adjust_surface = Surface::Cylinder;
    DollyMode adjust_mode = DollyMode::Optimized;
    int adjust_rows = kDefaultGridRows;
    int adjust_cols = kDefaultGridCols;
    adjust_cmd->add_option("--aspect", adjust_aspect, "Image aspect ratio width/height")->capture_default_str();
    adjust_cmd->add_option("--surface", adjust_surface, "sphere or cylinder")
        ->transform(CLI::CheckedTransformer(kSurfaces, CLI::ignore_case))
        ->default_str("cylinder");
    adjust_cmd->add_option("--mode", adjust_mode, "heuristic or optimized")
        ->transform(CLI::CheckedTransformer(kDollyModes, CLI::ignore_case))
        ->default_str("optimized");
    adjust_cmd->add_option("--rows", adjust_rows, "Distortion grid rows")->capture_default_str();
    adjust_cmd->add_option("--cols", adjust_cols, "Distortion grid columns")->capture_default_str();

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate distortion over the pose sweep and write CSV");
    SweepConfig cfg;
    double sweep_fovx = 90.0;
    std::string sweep_out;
    sweep_cmd->add_option("--n-radii", cfg.n_radii, "Radial position samples")->capture_default_str();
    sweep_cmd->add_option("--n-pos-angles", cfg.n_pos_angles, "Angular position samples")->capture_default_str();
    sweep_cmd->add_option("--n-dir-samples", cfg.n_dir_samples, "Looking directions per position")
        ->capture_default_str();
    sweep_cmd->add_option("--surface", cfg.surface, "sphere or cylinder")
        ->transform(CLI::CheckedTransformer(kSurfaces, CLI::ignore_case))
        ->default_str("cylinder");
    sweep_cmd->add_option("--fovx", sweep_fovx, "Horizontal field of view in degrees")->capture_default_str();
    sweep_cmd->add_option("--aspect", cfg.aspect, "Image aspect ratio width/height")->capture_default_str();
    sweep_cmd->add_option("--rows", cfg.rows, "Distortion grid rows")->capture_default_str();
    sweep_cmd->add_option("--cols", cfg.cols, "Distortion grid columns")->capture_default_str();
    sweep_cmd->add_option("--seed", cfg.seed, "Seed of the direction spiral")->capture_default_str();
    sweep_cmd->add_option("--threads", cfg.threads, "Worker threads, 0 for all cores")->capture_default_str();
    sweep_cmd->add_option("--out", sweep_out, "Output CSV")->required();

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "Print distortion quartiles of a sweep CSV");
    std::string stats_in;
    stats_cmd->add_option("--in", stats_in, "Sweep CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*render_cmd) {
            const auto [width, height] = parse_size(size);
            RenderRequest req;
            req.pose = render_pose.build(static_cast<double>(width) / height);
            req.surface = render_surface;
            req.dolly_mode = render_dolly;
            req.out_width = width;
            req.out_height = height;
            const PanoramaImage pano = load_panorama(pano_path);
            const DollySolution solution = resolve_pose(req);
            write_image(render_view(solution.adjusted_pose, req.surface, width, height, pano), out_path);
            std::cout << solution_json(solution).dump() << "\n";
        } else if (*adjust_cmd) {
            const CameraPose pose = adjust_pose.build(adjust_aspect);
            if (adjust_mode == DollyMode::None) {
                throw Error(ErrorCode::InvalidArgument, "--mode must be heuristic or optimized");
            }
            const DollySolution solution = adjust_camera(pose, adjust_surface, adjust_mode, adjust_rows, adjust_cols);
            std::cout << solution_json(solution).dump() << "\n";
        } else if (*sweep_cmd) {
            cfg.fovx = sweep_fovx * kDegree;
            validate(cfg);
            std::ofstream out(sweep_out, std::ios::binary | std::ios::trunc);
            if (!out) {
                throw Error(ErrorCode::IoError, "cannot open " + sweep_out + " for writing");
            }
            const std::vector<SweepRecord> records = sweep(cfg);
            write_sweep_csv(out, cfg, records);
            if (!out.flush()) {
                throw Error(ErrorCode::IoError, "write failed: " + sweep_out);
            }
            std::size_t flagged = 0;
            for (const SweepRecord& r : records) {
                flagged += r.flagged ? 1 : 0;
            }
            std::cerr << records.size() << " poses, " << flagged << " with a fallback solution\n";
        } else if (*stats_cmd) {
            std::ifstream in(stats_in, std::ios::binary);
            if (!in) {
                throw Error(ErrorCode::IoError, "cannot read " + stats_in);
            }
            const std::vector<SweepRecord> records = read_sweep_csv(in);
            if (records.empty()) {
                throw Error(ErrorCode::EmptyInput, stats_in + " has no data rows");
            }
            print_quartile_table(records);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.code());
    }
    return 0;
}
