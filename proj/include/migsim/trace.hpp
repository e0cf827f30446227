#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "migsim/errors.hpp"
#include "migsim/hex_grid.hpp"

namespace migsim {

/// One GPS fix of a mobile entity.
struct TraceRecord {
    std::string id;
    double timestamp = 0.0; // seconds, epoch
    double lat = 0.0;
    double lon = 0.0;
};

struct IngestResult {
    std::map<std::string, std::vector<TraceRecord>> by_entity; // time-sorted per entity
    int malformed_lines = 0;
    int reordered_records = 0; // adjacent out-of-order pairs before sorting

    std::size_t record_count() const {
        std::size_t n = 0;
        for (const auto& [id, recs] : by_entity) n += recs.size();
        return n;
    }
};

enum class TraceFormat {
    cabspotting, // one whitespace file per entity: lat lon occupancy epoch
    csv          // single file with header id,timestamp,lat,lon
};

namespace detail {

inline bool parse_double(const std::string& tok, double& out) {
    try {
        std::size_t used = 0;
        out = std::stod(tok, &used);
        return used == tok.size();
    } catch (const std::exception&) {
        return false;
    }
}

inline void sort_and_count(IngestResult& result) {
    for (auto& [id, recs] : result.by_entity) {
        for (std::size_t i = 0; i + 1 < recs.size(); ++i)
            if (recs[i + 1].timestamp < recs[i].timestamp) ++result.reordered_records;
        std::stable_sort(recs.begin(), recs.end(),
                         [](const TraceRecord& a, const TraceRecord& b) { return a.timestamp < b.timestamp; });
    }
}

inline void ingest_cabspotting_file(const std::filesystem::path& file, IngestResult& result) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open trace file " + file.string());
    const std::string id = file.stem().string();
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string lat_tok, lon_tok, occupancy_tok, epoch_tok;
        TraceRecord rec;
        rec.id = id;
        if (!(fields >> lat_tok >> lon_tok >> occupancy_tok >> epoch_tok) ||
            !parse_double(lat_tok, rec.lat) || !parse_double(lon_tok, rec.lon) ||
            !parse_double(epoch_tok, rec.timestamp)) {
            ++result.malformed_lines;
            continue;
        }
        result.by_entity[id].push_back(rec);
    }
}

inline void ingest_csv_file(const std::filesystem::path& file, IngestResult& result) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open trace file " + file.string());
    std::string line;
    if (!std::getline(in, line)) throw EmptyTraceError("empty trace file " + file.string());
    if (line.find("id") == std::string::npos)
        throw ParseError(file.string() + ":1: expected header id,timestamp,lat,lon");
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string id_tok, ts_tok, lat_tok, lon_tok;
        if (!std::getline(fields, id_tok, ',') || !std::getline(fields, ts_tok, ',') ||
            !std::getline(fields, lat_tok, ',') || !std::getline(fields, lon_tok)) {
            ++result.malformed_lines;
            continue;
        }
        TraceRecord rec;
        rec.id = id_tok;
        if (!parse_double(ts_tok, rec.timestamp) || !parse_double(lat_tok, rec.lat) ||
            !parse_double(lon_tok, rec.lon)) {
            ++result.malformed_lines;
            continue;
        }
        result.by_entity[rec.id].push_back(rec);
    }
}

} // namespace detail

/**
 * Reads mobility traces from a file or directory. Malformed lines are
 * skipped and counted, out-of-order timestamps are sorted and counted.
 * Throws EmptyTraceError when nothing usable was read.
 */
inline IngestResult ingest_traces(const std::filesystem::path& path, TraceFormat format) {
    IngestResult result;
    if (!std::filesystem::exists(path)) throw IoError("trace path does not exist: " + path.string());
    if (format == TraceFormat::cabspotting) {
        if (std::filesystem::is_directory(path)) {
            std::vector<std::filesystem::path> files;
            for (const auto& entry : std::filesystem::directory_iterator(path))
                if (entry.is_regular_file()) files.push_back(entry.path());
            std::sort(files.begin(), files.end());
            for (const auto& file : files) detail::ingest_cabspotting_file(file, result);
        } else {
            detail::ingest_cabspotting_file(path, result);
        }
    } else {
        detail::ingest_csv_file(path, result);
    }
    if (result.record_count() == 0) throw EmptyTraceError("no usable records in " + path.string());
    detail::sort_and_count(result);
    return result;
}

/// Per-slot cell sequences of all entities on a common slot grid.
struct SlottedTrace {
    double slot_seconds = 60.0;
    std::int64_t first_slot = 0;
    std::int64_t last_slot = -1;
    std::map<std::string, std::map<std::int64_t, AxialCoord>> cells; // entity -> slot -> world cell
};

/// Anchor of the local tangent-plane projection.
struct ProjectionOrigin {
    double lat = 0.0;
    double lon = 0.0;
};

namespace detail {

constexpr double earth_radius_m = 6371000.0;
constexpr double deg = 3.14159265358979323846 / 180.0;

/// Equirectangular projection: accurate to well under a meter at city scale.
inline std::pair<double, double> project(double lat, double lon, const ProjectionOrigin& origin) {
    const double x = earth_radius_m * (lon - origin.lon) * deg * std::cos(origin.lat * deg);
    const double y = earth_radius_m * (lat - origin.lat) * deg;
    return {x, y};
}

/// Nearest hexagon center to a planar point, on the lattice whose
/// adjacent centers are `sep` apart. Exact ties go to the smaller (q, r).
inline AxialCoord nearest_cell(double x, double y, double sep) {
    const double sqrt3 = std::sqrt(3.0);
    const double rf = 2.0 * y / (sqrt3 * sep);
    const double qf = x / sep - rf / 2.0;
    // cube rounding, then an exact scan of the rounded cell and its ring
    const double xf = qf, zf = rf, yf = -qf - rf;
    double rx = std::round(xf), ry = std::round(yf), rz = std::round(zf);
    const double dx = std::abs(rx - xf), dy = std::abs(ry - yf), dz = std::abs(rz - zf);
    if (dx > dy && dx > dz)
        rx = -ry - rz;
    else if (dy > dz)
        ry = -rx - rz;
    else
        rz = -rx - ry;
    const AxialCoord base{static_cast<int>(rx), static_cast<int>(rz)};
    AxialCoord best = base;
    double best_dist = std::numeric_limits<double>::infinity();
    const auto consider = [&](AxialCoord c) {
        const double cx = sep * (c.q + c.r / 2.0);
        const double cy = sep * (sqrt3 / 2.0) * c.r;
        const double dist = std::hypot(x - cx, y - cy);
        if (dist < best_dist - 1e-9 ||
            (std::abs(dist - best_dist) <= 1e-9 && c < best)) {
            best_dist = dist;
            best = c;
        }
    };
    consider(base);
    for (const auto& nb : neighbors(base)) consider(nb);
    return best;
}

} // namespace detail

/**
 * Projects fixes onto a hexagonal basestation lattice and resamples them
 * onto slots of length `slot_seconds`; the last fix within a slot wins.
 * The projection is anchored at `origin` (dataset centroid by default).
 */
inline SlottedTrace tessellate(const IngestResult& records, double cell_separation_m,
                               double slot_seconds,
                               std::optional<ProjectionOrigin> origin = std::nullopt) {
    if (!(cell_separation_m > 0.0)) throw ValidationError("cell separation must be positive");
    if (!(slot_seconds > 0.0)) throw ValidationError("slot length must be positive");

    ProjectionOrigin anchor;
    double t0 = std::numeric_limits<double>::infinity();
    if (origin) {
        anchor = *origin;
    } else {
        double lat_sum = 0.0, lon_sum = 0.0;
        std::size_t n = 0;
        for (const auto& [id, recs] : records.by_entity)
            for (const auto& rec : recs) {
                lat_sum += rec.lat;
                lon_sum += rec.lon;
                ++n;
            }
        if (n == 0) throw EmptyTraceError("no records to tessellate");
        anchor = {lat_sum / static_cast<double>(n), lon_sum / static_cast<double>(n)};
    }
    for (const auto& [id, recs] : records.by_entity)
        for (const auto& rec : recs) t0 = std::min(t0, rec.timestamp);

    SlottedTrace slotted;
    slotted.slot_seconds = slot_seconds;
    slotted.first_slot = 0;
    for (const auto& [id, recs] : records.by_entity) {
        auto& series = slotted.cells[id];
        for (const auto& rec : recs) {
            const auto [x, y] = detail::project(rec.lat, rec.lon, anchor);
            const auto slot = static_cast<std::int64_t>(std::floor((rec.timestamp - t0) / slot_seconds));
            series[slot] = detail::nearest_cell(x, y, cell_separation_m); // later fixes overwrite
            slotted.last_slot = std::max(slotted.last_slot, slot);
        }
    }
    return slotted;
}

/**
 * Synthetic population following the uniform hexagon random walk: each
 * slot an entity moves to one of its six neighbor cells with
 * probability walk_r each. Entities start spread over a disk of
 * `spread_radius` cells. Useful for estimator recovery checks and
 * model-generated pipeline runs.
 */
inline SlottedTrace generate_synthetic_walk(int n_entities, int n_slots, double walk_r,
                                            std::uint64_t seed, int spread_radius = 10);

/**
 * Uniform hexagon walk on a closed q x r parallelogram of cells with
 * wraparound (a hexagonal torus): every cell keeps exactly six
 * neighbors and the per-slot leave probability is exactly 6 walk_r.
 * Unlike the open lattice there is no sparsely-visited frontier, so
 * per-cell occupancy statistics are dense everywhere; this is the right
 * population for estimator recovery experiments.
 */
inline SlottedTrace generate_synthetic_walk_torus(int n_entities, int n_slots, double walk_r,
                                                  std::uint64_t seed, int q_cells = 16,
                                                  int r_cells = 16) {
    if (n_entities < 1 || n_slots < 1) throw ValidationError("need at least one entity and slot");
    if (walk_r < 0.0 || 6.0 * walk_r > 1.0 + 1e-12)
        throw ValidationError("walk probability outside [0, 1/6]");
    if (q_cells < 4 || r_cells < 4) throw ValidationError("torus needs at least 4x4 cells");
    std::mt19937_64 rng(seed);
    const auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    const auto wrap = [](int v, int m) { return ((v % m) + m) % m; };
    SlottedTrace slotted;
    slotted.first_slot = 0;
    slotted.last_slot = n_slots - 1;
    for (int e = 0; e < n_entities; ++e) {
        const std::string num = std::to_string(e);
        const std::string id = "e" + std::string(num.size() < 6 ? 6 - num.size() : 0, '0') + num;
        AxialCoord cell{static_cast<int>(std::floor(uniform() * q_cells)),
                        static_cast<int>(std::floor(uniform() * r_cells))};
        auto& series = slotted.cells[id];
        for (int t = 0; t < n_slots; ++t) {
            series[t] = cell;
            const double u = uniform();
            if (u < 6.0 * walk_r) {
                const auto dir = std::min<std::size_t>(5, static_cast<std::size_t>(u / walk_r));
                cell = cell + hex_directions[dir];
                cell = {wrap(cell.q, q_cells), wrap(cell.r, r_cells)};
            }
        }
    }
    return slotted;
}

inline SlottedTrace generate_synthetic_walk(int n_entities, int n_slots, double walk_r,
                                            std::uint64_t seed, int spread_radius) {
    if (n_entities < 1 || n_slots < 1) throw ValidationError("need at least one entity and slot");
    if (walk_r < 0.0 || 6.0 * walk_r > 1.0 + 1e-12)
        throw ValidationError("walk probability outside [0, 1/6]");
    std::mt19937_64 rng(seed);
    const auto uniform = [&rng]() {
        return static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };
    SlottedTrace slotted;
    slotted.first_slot = 0;
    slotted.last_slot = n_slots - 1;
    for (int e = 0; e < n_entities; ++e) {
        const std::string num = std::to_string(e);
        const std::string id =
            "e" + std::string(num.size() < 6 ? 6 - num.size() : 0, '0') + num; // fixed width keeps map order numeric
        AxialCoord cell{};
        do {
            cell.q = static_cast<int>(std::floor(uniform() * (2 * spread_radius + 1))) - spread_radius;
            cell.r = static_cast<int>(std::floor(uniform() * (2 * spread_radius + 1))) - spread_radius;
        } while (hex_distance(cell, {0, 0}) > spread_radius);
        auto& series = slotted.cells[id];
        for (int t = 0; t < n_slots; ++t) {
            series[t] = cell;
            const double u = uniform();
            if (u < 6.0 * walk_r) {
                const auto dir = std::min<std::size_t>(5, static_cast<std::size_t>(u / walk_r));
                cell = cell + hex_directions[dir];
            }
        }
    }
    return slotted;
}

} // namespace migsim
