#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "migsim/baselines.hpp"
#include "migsim/distance_mdp.hpp"
#include "migsim/errors.hpp"
#include "migsim/hex_grid.hpp"
#include "migsim/hex_mdp.hpp"
#include "migsim/trace.hpp"

namespace migsim {

struct RandomWalkEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    int episodes = 0;
};

/**
 * Monte Carlo estimate of the discounted sum cost of a policy on the
 * hexagon model, averaging `episodes` independent walks of `horizon`
 * slots from `initial_state`. Costs accrue once per slot, after the
 * action and before the move. Deterministic for a fixed seed.
 */
inline RandomWalkEstimate simulate_random_walk(const HexMdpSpec& spec, const HexPolicy& policy,
                                               int horizon, int episodes, std::uint64_t seed,
                                               int initial_state = 0) {
    spec.require_valid();
    const detail::HexModel model(spec);
    policy.require_valid(model.space);
    if (horizon < 1 || episodes < 1) throw ValidationError("horizon and episodes must be positive");
    if (initial_state < 0 || initial_state >= model.space.size())
        throw ValidationError("initial state out of range");

    std::mt19937_64 rng(seed);
    const auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    double sum = 0.0, sum_sq = 0.0;
    for (int episode = 0; episode < episodes; ++episode) {
        int state = initial_state;
        double total = 0.0, discount = 1.0;
        for (int t = 0; t < horizon; ++t) {
            const int a = policy.action[static_cast<std::size_t>(state)];
            total += discount * model.cost(state, a);
            discount *= spec.gamma;
            double u = uniform();
            int next = a;
            for (const auto& [cell, prob] : transition_distribution(spec, model.space, a)) {
                if (u < prob) {
                    next = cell;
                    break;
                }
                u -= prob;
            }
            state = next;
        }
        sum += total;
        sum_sq += total * total;
    }
    RandomWalkEstimate est;
    est.episodes = episodes;
    est.mean = sum / episodes;
    const double var = std::max(0.0, (sum_sq - sum * sum / episodes) / std::max(1, episodes - 1));
    est.std_error = std::sqrt(var / episodes);
    return est;
}

/**
 * Estimates the per-neighbor move probability r from slotted traces:
 * for each cell, the empirical probability of occupants leaving it per
 * slot over the trailing window, averaged over cells with data, divided
 * by six and clamped to [0, 1/6]. Only consecutive-slot observations
 * ending at or before `at_slot` count.
 */
inline double estimate_r(const SlottedTrace& slotted, double window_s, std::int64_t at_slot) {
    if (!(window_s > 0.0)) throw ValidationError("window must be positive");
    const auto window_slots =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(window_s / slotted.slot_seconds)));
    const std::int64_t from = at_slot - window_slots;

    std::map<AxialCoord, std::pair<long, long>> per_cell; // cell -> (occupant-slots, departures)
    for (const auto& [id, series] : slotted.cells) {
        auto it = series.lower_bound(from);
        for (; it != series.end() && it->first < at_slot; ++it) {
            const auto next = series.find(it->first + 1);
            if (next == series.end()) continue;
            auto& [occ, dep] = per_cell[it->second];
            ++occ;
            if (!(next->second == it->second)) ++dep;
        }
    }
    if (per_cell.empty())
        throw InsufficientDataError("no occupant-slots in the trailing window before slot " +
                                    std::to_string(at_slot));
    double f_sum = 0.0;
    for (const auto& [cell, counts] : per_cell)
        f_sum += static_cast<double>(counts.second) / static_cast<double>(counts.first);
    const double f_bar = f_sum / static_cast<double>(per_cell.size());
    return std::clamp(f_bar / 6.0, 0.0, 1.0 / 6.0);
}

/// System-load inputs at policy-computation time.
struct LoadSnapshot {
    int m_cur = 0;  // active entities now
    int m_max = 0;  // max simultaneously active in the dataset
    double r_t = 1.5; // normalized transmission resource R_t
    double r_p = 1.5; // normalized processing resource R_p
};

/**
 * Load-dependent cost functions: with G = 1 / (1 - m_cur / (R m_max))
 * for each resource, the migration cost is (G_p + G_t, -G_t, mu) and
 * the transmission cost (G_t, -G_t, theta). Throws DivergentLoadError
 * when a resource is saturated (R m_max <= m_cur).
 */
inline std::pair<ConstPlusExpCost, ConstPlusExpCost> load_costs(const LoadSnapshot& load,
                                                                double mu = 0.8,
                                                                double theta = 0.8) {
    if (load.m_cur <= 0 || load.m_cur > load.m_max)
        throw ValidationError("load snapshot needs 0 < m_cur <= m_max");
    if (load.r_t * load.m_max <= load.m_cur || load.r_p * load.m_max <= load.m_cur)
        throw DivergentLoadError("resource saturated: R * m_max <= m_cur");
    const double g_t = 1.0 / (1.0 - load.m_cur / (load.r_t * load.m_max));
    const double g_p = 1.0 / (1.0 - load.m_cur / (load.r_p * load.m_max));
    const ConstPlusExpCost migration{g_p + g_t, -g_t, mu};
    const ConstPlusExpCost transmission{g_t, -g_t, theta};
    return {migration, transmission};
}

/// Relative saving (C0 - C) / C0 of cost C against baseline cost C0.
inline double cost_reduction(double baseline_cost, double proposed_cost) {
    if (!(baseline_cost > 0.0)) throw ZeroBaselineError("baseline cost must be positive");
    return (baseline_cost - proposed_cost) / baseline_cost;
}

enum class PolicyKind { proposed, never_migrate, always_migrate, myopic };

inline std::string to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::proposed: return "proposed";
        case PolicyKind::never_migrate: return "never-migrate";
        case PolicyKind::always_migrate: return "always-migrate";
        case PolicyKind::myopic: return "myopic";
    }
    return "?";
}

struct TraceSimConfig {
    double update_seconds = 60.0;   // T_u, controller period
    double window_seconds = 3600.0; // T_w, estimation lookback
    int n_max = 10;
    double gamma = 0.9;
    double resource_transmission = 1.5; // R_t
    double resource_processing = 1.5;   // R_p
    double mu = 0.8;
    double theta = 0.8;
    double initial_r = 0.05; // used until the first estimate is available
    int gap_carry_slots = 5; // carry the last cell this long, then go inactive
    std::vector<PolicyKind> policies = {PolicyKind::proposed, PolicyKind::never_migrate,
                                        PolicyKind::always_migrate, PolicyKind::myopic};
};

struct SimReport {
    std::vector<std::string> policy_names;

    struct SlotRow {
        std::int64_t slot = 0;
        int active = 0;
        std::vector<double> avg_cost; // per policy
    };
    std::vector<SlotRow> per_slot;

    std::vector<double> total_avg_cost;      // per policy, over entity-slots
    std::vector<double> reduction_vs;        // per policy, vs proposed; NaN when undefined
    std::vector<std::pair<std::int64_t, double>> r_series;
    int max_post_action_distance = 0;
    int m_max = 0;

    std::vector<std::string> entity_ids;
    std::vector<std::vector<double>> per_entity_avg; // [policy][entity], over active slots
};

namespace detail {

struct EntityRun {
    std::vector<std::optional<AxialCoord>> effective_cell; // per slot, nullopt = inactive
    std::vector<bool> reappeared;                          // placement reset at this slot
};

/// Applies the gap rule: carry the last cell up to `carry` slots, then
/// inactive until the entity reappears (which restarts placement).
inline EntityRun expand_entity(const std::map<std::int64_t, AxialCoord>& series,
                               std::int64_t first_slot, std::int64_t last_slot, int carry) {
    const auto slots = static_cast<std::size_t>(last_slot - first_slot + 1);
    EntityRun run;
    run.effective_cell.resize(slots);
    run.reappeared.assign(slots, false);
    std::optional<AxialCoord> last_cell;
    int gap = 0;
    bool was_active = false;
    for (std::int64_t slot = first_slot; slot <= last_slot; ++slot) {
        const auto idx = static_cast<std::size_t>(slot - first_slot);
        const auto it = series.find(slot);
        if (it != series.end()) {
            run.effective_cell[idx] = it->second;
            run.reappeared[idx] = !was_active;
            last_cell = it->second;
            gap = 0;
            was_active = true;
        } else if (was_active && gap < carry) {
            ++gap;
            run.effective_cell[idx] = last_cell;
        } else {
            was_active = false;
        }
    }
    return run;
}

} // namespace detail

/**
 * Trace-driven evaluation of migration policies. Every entity's service
 * starts co-located with it; each slot the observed offset drives the
 * active policy (with forced migration once the distance reaches n_max,
 * targeting the boundary action's ring along a shortest path), and the
 * one-slot cost accrues. Every update period the controller re-estimates
 * r, rebuilds the load-dependent costs from the currently active entity
 * count, and re-solves the adaptive policy through the distance-based
 * approximation; baselines run on the identical trace and costs.
 */
inline SimReport run_trace_simulation(const SlottedTrace& slotted, const TraceSimConfig& config) {
    if (slotted.cells.empty() || slotted.last_slot < slotted.first_slot)
        throw EmptyTraceError("slotted trace is empty");
    if (config.policies.empty()) throw ValidationError("no policies configured");
    if (!(config.update_seconds > 0.0)) throw ValidationError("update period must be positive");

    const int n_max = config.n_max;
    const std::int64_t first = slotted.first_slot;
    const std::int64_t last = slotted.last_slot;
    const auto slot_count = static_cast<std::size_t>(last - first + 1);
    const auto update_slots = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::llround(config.update_seconds / slotted.slot_seconds)));

    SimReport report;
    for (const auto kind : config.policies) report.policy_names.push_back(to_string(kind));
    const auto n_policies = config.policies.size();

    // expand entities onto the slot grid and compute windowed activity
    std::vector<detail::EntityRun> runs;
    for (const auto& [id, series] : slotted.cells) {
        report.entity_ids.push_back(id);
        runs.push_back(detail::expand_entity(series, first, last, config.gap_carry_slots));
    }
    std::vector<int> windowed_active(slot_count, 0);
    for (const auto& [id, series] : slotted.cells) {
        for (std::int64_t slot = first; slot <= last; ++slot) {
            const auto from = slot - update_slots;
            auto it = series.upper_bound(slot);
            if (it == series.begin()) continue;
            --it; // latest fix at or before `slot`
            if (it->first > from) ++windowed_active[static_cast<std::size_t>(slot - first)];
        }
    }
    report.m_max = *std::max_element(windowed_active.begin(), windowed_active.end());

    // per-policy service locations and accumulators
    const auto n_entities = runs.size();
    std::vector<std::vector<std::optional<AxialCoord>>> service(
        n_policies, std::vector<std::optional<AxialCoord>>(n_entities));
    std::vector<double> totals(n_policies, 0.0);
    report.per_entity_avg.assign(n_policies, std::vector<double>(n_entities, 0.0));
    std::vector<long> active_slots_per_entity(n_entities, 0);
    long total_entity_slots = 0;

    double current_r = config.initial_r;
    ConstPlusExpCost cm{1.0 + 1.0, -1.0, config.mu}; // placeholder until the first update
    ConstPlusExpCost cd{1.0, -1.0, config.theta};
    std::vector<DistancePolicy> ring_policy(n_policies);
    bool policies_ready = false;

    const auto rebuild_policies = [&]() {
        const DistanceMdpSpec dspec{n_max,  6.0 * current_r, 2.5 * current_r, 1.5 * current_r,
                                    config.gamma, cm, cd};
        for (std::size_t p = 0; p < n_policies; ++p) {
            switch (config.policies[p]) {
                case PolicyKind::proposed:
                    ring_policy[p] = modified_policy_iteration(dspec).policy;
                    break;
                case PolicyKind::never_migrate:
                    ring_policy[p] = build_baseline_1d(dspec, BaselineKind::never_migrate);
                    break;
                case PolicyKind::always_migrate:
                    ring_policy[p] = build_baseline_1d(dspec, BaselineKind::always_migrate);
                    break;
                case PolicyKind::myopic:
                    ring_policy[p] = build_baseline_1d(dspec, BaselineKind::myopic);
                    break;
            }
        }
        policies_ready = true;
    };

    for (std::int64_t slot = first; slot <= last; ++slot) {
        const auto idx = static_cast<std::size_t>(slot - first);

        if ((slot - first) % update_slots == 0) {
            try {
                current_r = std::max(estimate_r(slotted, config.window_seconds, slot), 1e-6);
            } catch (const InsufficientDataError&) {
                // keep the previous (or initial) estimate
            }
            const int m_cur = windowed_active[idx];
            if (m_cur > 0) {
                const auto [new_cm, new_cd] =
                    load_costs({m_cur, report.m_max, config.resource_transmission,
                                config.resource_processing},
                               config.mu, config.theta);
                cm = new_cm;
                cd = new_cd;
                rebuild_policies();
            } else if (!policies_ready) {
                rebuild_policies();
            }
            report.r_series.emplace_back(slot, current_r);
        } else if (!policies_ready) {
            rebuild_policies();
        }

        SimReport::SlotRow row;
        row.slot = slot;
        row.avg_cost.assign(n_policies, 0.0);
        for (std::size_t e = 0; e < n_entities; ++e) {
            const auto& cell = runs[e].effective_cell[idx];
            if (!cell) {
                for (std::size_t p = 0; p < n_policies; ++p) service[p][e].reset();
                continue;
            }
            ++row.active;
            ++active_slots_per_entity[e];
            ++total_entity_slots;
            for (std::size_t p = 0; p < n_policies; ++p) {
                if (!service[p][e] || runs[e].reappeared[idx]) service[p][e] = *cell; // fresh placement
                const AxialCoord offset = *cell - *service[p][e];
                const int distance = hex_distance(offset, {0, 0});
                const int target_ring =
                    ring_policy[p].action[static_cast<std::size_t>(std::min(distance, n_max))];
                const AxialCoord new_offset = shortest_path_action(offset, target_ring);
                const double cost =
                    eval_cost(cm, distance - target_ring) + eval_cost(cd, target_ring);
                service[p][e] = *cell - new_offset;
                totals[p] += cost;
                report.per_entity_avg[p][e] += cost;
                row.avg_cost[p] += cost;
                report.max_post_action_distance =
                    std::max(report.max_post_action_distance, target_ring);
            }
        }
        if (row.active > 0)
            for (auto& c : row.avg_cost) c /= row.active;
        report.per_slot.push_back(std::move(row));
    }

    report.total_avg_cost.assign(n_policies, 0.0);
    for (std::size_t p = 0; p < n_policies; ++p) {
        report.total_avg_cost[p] =
            total_entity_slots > 0 ? totals[p] / static_cast<double>(total_entity_slots) : 0.0;
        for (std::size_t e = 0; e < n_entities; ++e)
            if (active_slots_per_entity[e] > 0)
                report.per_entity_avg[p][e] /= static_cast<double>(active_slots_per_entity[e]);
    }

    report.reduction_vs.assign(n_policies, std::numeric_limits<double>::quiet_NaN());
    const auto proposed_it =
        std::find(config.policies.begin(), config.policies.end(), PolicyKind::proposed);
    if (proposed_it != config.policies.end()) {
        const auto proposed_idx = static_cast<std::size_t>(proposed_it - config.policies.begin());
        for (std::size_t p = 0; p < n_policies; ++p) {
            if (p == proposed_idx || !(report.total_avg_cost[p] > 0.0)) continue;
            report.reduction_vs[p] =
                cost_reduction(report.total_avg_cost[p], report.total_avg_cost[proposed_idx]);
        }
    }
    return report;
}

} // namespace migsim
