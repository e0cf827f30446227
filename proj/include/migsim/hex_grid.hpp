#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "migsim/errors.hpp"

namespace migsim {

/// Axial coordinates on the hexagonal lattice (cube coordinates with the
/// third component implied by s = -q - r).
struct AxialCoord {
    int q = 0;
    int r = 0;

    friend constexpr bool operator==(AxialCoord a, AxialCoord b) {
        return a.q == b.q && a.r == b.r;
    }
    friend constexpr bool operator!=(AxialCoord a, AxialCoord b) { return !(a == b); }
    friend constexpr bool operator<(AxialCoord a, AxialCoord b) {
        return a.q != b.q ? a.q < b.q : a.r < b.r;
    }
    friend constexpr AxialCoord operator+(AxialCoord a, AxialCoord b) {
        return {a.q + b.q, a.r + b.r};
    }
    friend constexpr AxialCoord operator-(AxialCoord a, AxialCoord b) {
        return {a.q - b.q, a.r - b.r};
    }
    friend constexpr AxialCoord operator*(int k, AxialCoord a) {
        return {k * a.q, k * a.r};
    }
};

/// The six neighbor directions, in counterclockwise order.
inline constexpr std::array<AxialCoord, 6> hex_directions = {
    {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}}};

/// Minimum number of hops between two cells.
inline int hex_distance(AxialCoord a, AxialCoord b) {
    const int dq = a.q - b.q;
    const int dr = a.r - b.r;
    return (std::abs(dq) + std::abs(dr) + std::abs(dq + dr)) / 2;
}

inline std::array<AxialCoord, 6> neighbors(AxialCoord c) {
    std::array<AxialCoord, 6> out{};
    for (std::size_t k = 0; k < 6; ++k) out[k] = c + hex_directions[k];
    return out;
}

/**
 * Polar indexing of the lattice: `ring` is the hop distance from the
 * origin, `index` counts cells counterclockwise within the ring starting
 * from the cell at ring * hex_directions[0]. Ring 0 has one cell
 * (index 0); ring i >= 1 has 6i cells (index in [0, 6i)).
 */
struct HexOffset {
    int ring = 0;
    int index = 0;

    friend constexpr bool operator==(HexOffset a, HexOffset b) {
        return a.ring == b.ring && a.index == b.index;
    }
    friend constexpr bool operator!=(HexOffset a, HexOffset b) { return !(a == b); }
};

inline int ring_size(int ring) { return ring == 0 ? 1 : 6 * ring; }

/// Number of cells with ring < `ring`, i.e. the flat id of (ring, 0).
inline int ring_start(int ring) { return ring == 0 ? 0 : 3 * ring * (ring - 1) + 1; }

/// Total cells within hop distance n_max of the origin: 3N^2 + 3N + 1.
inline int hex_state_count(int n_max) { return 3 * n_max * n_max + 3 * n_max + 1; }

inline AxialCoord offset_to_axial(HexOffset s) {
    if (s.ring == 0) return {0, 0};
    const int leg = s.index / s.ring;     // which of the 6 ring edges
    const int step = s.index % s.ring;    // position along that edge
    const AxialCoord corner = s.ring * hex_directions[static_cast<std::size_t>(leg)];
    return corner + step * hex_directions[static_cast<std::size_t>((leg + 2) % 6)];
}

inline HexOffset axial_to_offset(AxialCoord c) {
    const int ring = hex_distance(c, {0, 0});
    if (ring == 0) return {0, 0};
    for (int leg = 0; leg < 6; ++leg) {
        const AxialCoord corner = ring * hex_directions[static_cast<std::size_t>(leg)];
        const AxialCoord dir = hex_directions[static_cast<std::size_t>((leg + 2) % 6)];
        const AxialCoord delta = c - corner;
        const int step = dir.q != 0 ? delta.q / dir.q : delta.r / dir.r;
        if (step >= 0 && step < ring && corner + step * dir == c)
            return {ring, leg * ring + step};
    }
    throw Error("axial_to_offset: unreachable"); // every cell lies on one edge
}

/**
 * Enumerated offset states within hop distance n_max of the origin,
 * with flat ids ordered by (ring, index). Precomputes neighbor ids;
 * neighbors beyond ring n_max map to -1.
 */
class HexStateSpace {
public:
    explicit HexStateSpace(int n_max) : n_max_(n_max) {
        if (n_max < 1) throw ValidationError("hex state space needs n_max >= 1");
        const int count = hex_state_count(n_max);
        axial_.reserve(static_cast<std::size_t>(count));
        for (int ring = 0; ring <= n_max; ++ring)
            for (int index = 0; index < ring_size(ring); ++index)
                axial_.push_back(offset_to_axial({ring, index}));
        neighbor_ids_.resize(axial_.size());
        for (std::size_t id = 0; id < axial_.size(); ++id) {
            const auto nbs = neighbors(axial_[id]);
            for (std::size_t k = 0; k < 6; ++k) neighbor_ids_[id][k] = id_of(nbs[k]);
        }
    }

    int n_max() const { return n_max_; }
    int size() const { return static_cast<int>(axial_.size()); }

    AxialCoord axial(int id) const { return axial_[static_cast<std::size_t>(id)]; }

    HexOffset offset(int id) const {
        const int ring = ring_of(id);
        return {ring, id - ring_start(ring)};
    }

    int ring_of(int id) const {
        // inverse of ring_start by solving 3r^2 - 3r + 1 <= id
        if (id == 0) return 0;
        int ring = static_cast<int>((3.0 + std::sqrt(12.0 * id - 3.0)) / 6.0);
        while (ring_start(ring + 1) <= id) ++ring;
        while (ring_start(ring) > id) --ring;
        return ring;
    }

    /// Flat id of a cell, or -1 when it lies beyond ring n_max.
    int id_of(AxialCoord c) const {
        const int ring = hex_distance(c, {0, 0});
        if (ring > n_max_) return -1;
        const HexOffset s = axial_to_offset(c);
        return ring_start(s.ring) + s.index;
    }

    int id_of(HexOffset s) const { return ring_start(s.ring) + s.index; }

    const std::array<int, 6>& neighbor_ids(int id) const {
        return neighbor_ids_[static_cast<std::size_t>(id)];
    }

private:
    int n_max_;
    std::vector<AxialCoord> axial_;
    std::vector<std::array<int, 6>> neighbor_ids_;
};

/**
 * The cell reached by migrating from `from` along a shortest path down
 * to `target_ring` (hop distance = ring(from) - target_ring). Among the
 * candidate cells of the target ring the one with the smallest index is
 * chosen, so the mapping is deterministic.
 */
inline AxialCoord shortest_path_action(AxialCoord from, int target_ring) {
    const int ring = hex_distance(from, {0, 0});
    if (target_ring > ring)
        throw InvalidActionError("shortest_path_action: target ring " + std::to_string(target_ring) +
                                 " above current ring " + std::to_string(ring));
    if (target_ring == ring) return from;
    if (target_ring == 0) return {0, 0};
    const int hops = ring - target_ring;
    for (int index = 0; index < ring_size(target_ring); ++index) {
        const AxialCoord cand = offset_to_axial({target_ring, index});
        if (hex_distance(from, cand) == hops) return cand;
    }
    throw Error("shortest_path_action: unreachable"); // a shortest path always exists
}

} // namespace migsim
