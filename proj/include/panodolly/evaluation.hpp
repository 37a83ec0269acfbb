#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "panodolly/dollyzoom.hpp"
#include "panodolly/geometry.hpp"

namespace panodolly {

/// Camera positions are sampled up to this radius; distortion diverges as the
/// camera approaches the surface.
inline constexpr double kSweepMaxRadius = 0.9;

struct SweepConfig {
    int n_radii = 6;
    int n_pos_angles = 7;
    int n_dir_samples = 64;
    Surface surface = Surface::Cylinder;
    double fovx = kPi / 2.0;
    double aspect = 16.0 / 9.0;
    int rows = kDefaultGridRows;
    int cols = kDefaultGridCols;
    std::uint64_t seed = 0;
    int threads = 0;  // 0: one per hardware thread
};

/// Throws InvalidArgument for non-positive counts or fovx outside (0, pi).
void validate(const SweepConfig& cfg);

struct SweepRecord {
    Vec3 pos;
    Vec3 dir;
    double d_orig = 0.0;
    double d_heu = 0.0;
    double d_opt = 0.0;
    double t_heu = 0.0;
    double t_opt = 0.0;
    std::int64_t solve_micros = 0;
    bool flagged = false;  // some solve failed and fell back to the original pose

    double imp_heu() const { return d_orig - d_heu; }
    double imp_opt_over_orig() const { return d_orig - d_opt; }
    double imp_opt_over_heu() const { return d_heu - d_opt; }
};

/// Positions on radial samples of the first quadrant of the Y-Z plane, looking
/// directions on a Fibonacci spiral over the hemisphere facing +x. Radius is
/// the outer loop, then position angle, then direction.
std::vector<CameraPose> sample_poses(const SweepConfig& cfg);

SweepRecord evaluate_pose(const CameraPose& pose, const SweepConfig& cfg);

/// One record per sampled pose, in sample_poses order.
std::vector<SweepRecord> sweep(const SweepConfig& cfg);

struct Quartiles {
    double q0 = 0.0;
    double q1 = 0.0;
    double q2 = 0.0;
    double q3 = 0.0;
    double q4 = 0.0;
};

/// Min, 25th, 50th, 75th percentile (linear interpolation between closest
/// ranks) and max. Throws EmptyInput.
Quartiles quartiles(std::span<const double> values);

inline constexpr const char* kSweepCsvHeader =
    "pos_x,pos_y,pos_z,dir_x,dir_y,dir_z,d_orig,d_heu,d_opt,imp_heu,imp_opt_orig,imp_opt_heu,t_heu,t_opt,solve_us";

/// Writes a '#' metadata line echoing the config, the header and one row per
/// record with 17 significant digits.
void write_sweep_csv(std::ostream& out, const SweepConfig& cfg, const std::vector<SweepRecord>& records);

/// Reads rows written by write_sweep_csv; '#' lines are skipped. Throws
/// DecodeError on malformed rows.
std::vector<SweepRecord> read_sweep_csv(std::istream& in);

std::string format_real(double value);

}  // namespace panodolly
