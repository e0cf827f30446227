#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "migsim/baselines.hpp"
#include "migsim/distance_mdp.hpp"
#include "migsim/errors.hpp"
#include "migsim/hex_grid.hpp"
#include "migsim/hex_mdp.hpp"

namespace migsim {

/// Shortest decimal form that round-trips the value.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

using TableCell = std::variant<std::int64_t, double, std::string>;

/// A small column-named table that serializes to CSV or JSON rows.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<TableCell>> rows;

    void add_row(std::vector<TableCell> row) { rows.push_back(std::move(row)); }

    void write_csv(const std::filesystem::path& path) const {
        std::ofstream out(path);
        if (!out) throw IoError("cannot write " + path.string());
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << (c ? "," : "") << columns[c];
        out << "\n";
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) out << ",";
                std::visit(
                    [&](const auto& cell) {
                        using T = std::decay_t<decltype(cell)>;
                        if constexpr (std::is_same_v<T, double>)
                            out << format_double(cell);
                        else
                            out << cell;
                    },
                    row[c]);
            }
            out << "\n";
        }
    }

    void write_json(const std::filesystem::path& path) const {
        nlohmann::json rows_json = nlohmann::json::array();
        for (const auto& row : rows) {
            nlohmann::json obj;
            for (std::size_t c = 0; c < row.size() && c < columns.size(); ++c)
                std::visit([&](const auto& cell) { obj[columns[c]] = cell; }, row[c]);
            rows_json.push_back(std::move(obj));
        }
        std::ofstream out(path);
        if (!out) throw IoError("cannot write " + path.string());
        out << rows_json.dump(2) << "\n";
    }

    /// Writes name.csv or name.json under `dir` and returns the path.
    std::filesystem::path write(const std::filesystem::path& dir, const std::string& name,
                                const std::string& format) const {
        const auto path = dir / (name + "." + format);
        if (format == "json")
            write_json(path);
        else
            write_csv(path);
        return path;
    }
};

inline Table table_policy_values_1d(const DistancePolicy& policy, const ValueTable1D& values) {
    Table t;
    t.columns = {"d", "action", "value"};
    for (std::size_t d = 0; d < values.size(); ++d)
        t.add_row({static_cast<std::int64_t>(d), static_cast<std::int64_t>(policy.action[d]), values[d]});
    return t;
}

inline Table table_values_1d(const ValueTable1D& values) {
    Table t;
    t.columns = {"d", "value"};
    for (std::size_t d = 0; d < values.size(); ++d)
        t.add_row({static_cast<std::int64_t>(d), values[d]});
    return t;
}

inline Table table_policy_values_2d(const HexStateSpace& space, const HexPolicy& policy,
                                    const ValueTable2D& values) {
    Table t;
    t.columns = {"ring", "index", "action_ring", "action_index", "value"};
    for (int s = 0; s < space.size(); ++s) {
        const HexOffset state = space.offset(s);
        const HexOffset action = space.offset(policy.action[static_cast<std::size_t>(s)]);
        t.add_row({static_cast<std::int64_t>(state.ring), static_cast<std::int64_t>(state.index),
                   static_cast<std::int64_t>(action.ring), static_cast<std::int64_t>(action.index),
                   values[static_cast<std::size_t>(s)]});
    }
    return t;
}

/// Per-state comparison rows: policy,state,value plus one aggregate row
/// per policy. The 1-D state is the distance d, the 2-D state "ring/index".
inline Table table_comparison(const std::vector<ComparisonRow>& rows,
                              const HexStateSpace* space = nullptr) {
    Table t;
    t.columns = {"policy", "state", "value"};
    for (const auto& row : rows) {
        for (std::size_t s = 0; s < row.values.size(); ++s) {
            std::string state = std::to_string(s);
            if (space) {
                const HexOffset offset = space->offset(static_cast<int>(s));
                state = std::to_string(offset.ring) + "/" + std::to_string(offset.index);
            }
            t.add_row({row.name, state, row.values[s]});
        }
        t.add_row({row.name, std::string("avg"), row.state_avg});
    }
    return t;
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& value) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << value.dump(2) << "\n";
}

namespace detail {

inline void write_costs_section(std::ofstream& out, const ConstPlusExpCost& migration,
                                const ConstPlusExpCost& transmission) {
    out << "[costs]\n";
    out << "beta_c = " << format_double(migration.const_term) << "\n";
    out << "beta_l = " << format_double(migration.lin_term) << "\n";
    out << "mu = " << format_double(migration.base) << "\n";
    out << "delta_c = " << format_double(transmission.const_term) << "\n";
    out << "delta_l = " << format_double(transmission.lin_term) << "\n";
    out << "theta = " << format_double(transmission.base) << "\n";
}

} // namespace detail

/// Serializes a spec back to the run-config format, loadable as-is.
inline void write_spec_config(const std::filesystem::path& path, const DistanceMdpSpec& spec) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "[mdp]\n";
    out << "n_max = " << spec.n_max << "\n";
    out << "gamma = " << format_double(spec.gamma) << "\n";
    out << "p0 = " << format_double(spec.p0) << "\n";
    out << "p = " << format_double(spec.p) << "\n";
    out << "q = " << format_double(spec.q) << "\n\n";
    detail::write_costs_section(out, spec.migration_cost, spec.transmission_cost);
}

inline void write_spec_config(const std::filesystem::path& path, const HexMdpSpec& spec) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "[hex]\n";
    out << "n_max = " << spec.n_max << "\n";
    out << "r = " << format_double(spec.move_prob) << "\n";
    out << "gamma = " << format_double(spec.gamma) << "\n\n";
    detail::write_costs_section(out, spec.migration_cost, spec.transmission_cost);
}

} // namespace migsim
