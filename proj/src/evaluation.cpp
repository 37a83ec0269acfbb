#include "panodolly/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "panodolly/error.hpp"

namespace panodolly {

void validate(const SweepConfig& cfg)
{
    if (cfg.n_radii < 1 || cfg.n_pos_angles < 1 || cfg.n_dir_samples < 1) {
        throw Error(ErrorCode::InvalidArgument, "sweep sample counts must be at least 1");
    }
    if (!(cfg.fovx > 0.0 && cfg.fovx < kPi)) {
        throw Error(ErrorCode::InvalidArgument, "fovx must lie in (0, pi)");
    }
    if (!(cfg.aspect > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "aspect must be positive");
    }
    if (cfg.rows < 2 || cfg.cols < 2) {
        throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 rows and 2 columns");
    }
}

std::vector<CameraPose> sample_poses(const SweepConfig& cfg)
{
    validate(cfg);

    // Raw engine output is portable across standard libraries, distributions
    // are not.
    std::mt19937_64 rng(cfg.seed);
    const double spin = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 * kPi;
    const double golden_angle = kPi * (3.0 - std::sqrt(5.0));

    std::vector<Vec3> dirs;
    dirs.reserve(cfg.n_dir_samples);
    for (int k = 0; k < cfg.n_dir_samples; ++k) {
        const double h = 1.0 - (k + 0.5) / cfg.n_dir_samples;
        const double ring = std::sqrt(std::max(0.0, 1.0 - h * h));
        const double psi = spin + k * golden_angle;
        dirs.push_back({h, ring * std::cos(psi), ring * std::sin(psi)});
    }

    std::vector<CameraPose> poses;
    poses.reserve(static_cast<std::size_t>(cfg.n_radii) * cfg.n_pos_angles * cfg.n_dir_samples);
    for (int ri = 0; ri < cfg.n_radii; ++ri) {
        const double r = kSweepMaxRadius * (ri + 1) / cfg.n_radii;
        for (int ai = 0; ai < cfg.n_pos_angles; ++ai) {
            const double alpha = cfg.n_pos_angles == 1 ? 0.0 : (kPi / 2.0) * ai / (cfg.n_pos_angles - 1);
            const Vec3 pos{0.0, r * std::sin(alpha), r * std::cos(alpha)};
            for (const Vec3& dir : dirs) {
                const Vec3 z_up{0.0, 0.0, 1.0};
                const Vec3 up = norm(cross(dir, z_up)) < 1e-9 ? Vec3{1.0, 0.0, 0.0} : z_up;
                poses.push_back(make_camera(pos, dir, up, cfg.fovx, cfg.aspect));
            }
        }
    }
    return poses;
}

SweepRecord evaluate_pose(const CameraPose& pose, const SweepConfig& cfg)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    SweepRecord rec;
    rec.pos = pose.pos;
    rec.dir = pose.dir;

    try {
        rec.d_orig = distortion_value(pose, cfg.surface, cfg.rows, cfg.cols);
    } catch (const Error&) {
        rec.d_orig = rec.d_heu = rec.d_opt = inf;
        rec.flagged = true;
        return rec;
    }

    const DollySolution heu =
        apply_offset(pose, cfg.surface, DollyMode::Heuristic, heuristic_offset(pose), cfg.rows, cfg.cols);
    rec.d_heu = heu.d_adjusted;
    rec.t_heu = heu.t;

    double t_opt = 0.0;
    const auto start = std::chrono::steady_clock::now();
    try {
        t_opt = optimize_offset(pose, cfg.surface, cfg.rows, cfg.cols);
    } catch (const Error&) {
        rec.flagged = true;
    }
    const auto stop = std::chrono::steady_clock::now();
    rec.solve_micros = std::chrono::duration_cast<std::chrono::microseconds>(stop - start).count();

    const DollySolution opt = apply_offset(pose, cfg.surface, DollyMode::Optimized, t_opt, cfg.rows, cfg.cols);
    rec.d_opt = opt.d_adjusted;
    rec.t_opt = opt.t;
    rec.flagged = rec.flagged || heu.fallback || opt.fallback;
    return rec;
}

std::vector<SweepRecord> sweep(const SweepConfig& cfg)
{
    const std::vector<CameraPose> poses = sample_poses(cfg);
    std::vector<SweepRecord> records(poses.size());

    int workers = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, static_cast<int>(std::max<std::size_t>(poses.size(), 1)));

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < poses.size(); k = next++) {
            records[k] = evaluate_pose(poses[k], cfg);
        }
    };
    if (workers == 1) {
        work();
        return records;
    }
    {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
    }
    return records;
}

Quartiles quartiles(std::span<const double> values)
{
    if (values.empty()) {
        throw Error(ErrorCode::EmptyInput, "quartiles of an empty list");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    auto percentile = [&](double p) {
        const double rank = p * static_cast<double>(sorted.size() - 1);
        const auto lower = static_cast<std::size_t>(std::floor(rank));
        const double frac = rank - static_cast<double>(lower);
        if (frac == 0.0 || lower + 1 >= sorted.size()) {
            return sorted[lower];
        }
        return sorted[lower] + frac * (sorted[lower + 1] - sorted[lower]);
    };
    return {sorted.front(), percentile(0.25), percentile(0.5), percentile(0.75), sorted.back()};
}

std::string format_real(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_sweep_csv(std::ostream& out, const SweepConfig& cfg, const std::vector<SweepRecord>& records)
{
    out << "# panodolly sweep seed=" << cfg.seed << " n_radii=" << cfg.n_radii << " n_pos_angles=" << cfg.n_pos_angles
        << " n_dir_samples=" << cfg.n_dir_samples << " surface=" << to_string(cfg.surface)
        << " fovx=" << format_real(cfg.fovx) << " aspect=" << format_real(cfg.aspect) << " rows=" << cfg.rows
        << " cols=" << cfg.cols << "\n";
    out << kSweepCsvHeader << "\n";
    for (const SweepRecord& r : records) {
        const double fields[] = {r.pos.x,   r.pos.y,   r.pos.z,   r.dir.x,   r.dir.y,
                                 r.dir.z,   r.d_orig,  r.d_heu,   r.d_opt,   r.imp_heu(),
                                 r.imp_opt_over_orig(), r.imp_opt_over_heu(), r.t_heu, r.t_opt};
        for (double f : fields) {
            out << format_real(f) << ',';
        }
        out << r.solve_micros << "\n";
    }
}

std::vector<SweepRecord> read_sweep_csv(std::istream& in)
{
    std::vector<SweepRecord> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#' || line.rfind("pos_x", 0) == 0) {
            continue;
        }
        std::vector<double> fields;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) {
            char* end = nullptr;
            const double value = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size()) {
                throw Error(ErrorCode::DecodeError, "line " + std::to_string(line_no) + ": bad number '" + cell + "'");
            }
            fields.push_back(value);
        }
        if (fields.size() != 15) {
            throw Error(ErrorCode::DecodeError,
                        "line " + std::to_string(line_no) + ": expected 15 fields, got " + std::to_string(fields.size()));
        }
        SweepRecord r;
        r.pos = {fields[0], fields[1], fields[2]};
        r.dir = {fields[3], fields[4], fields[5]};
        r.d_orig = fields[6];
        r.d_heu = fields[7];
        r.d_opt = fields[8];
        r.t_heu = fields[12];
        r.t_opt = fields[13];
        r.solve_micros = static_cast<std::int64_t>(fields[14]);
        records.push_back(r);
    }
    return records;
}

}  // namespace panodolly
