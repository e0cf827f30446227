#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "migsim/distance_mdp.hpp"
#include "migsim/hex_mdp.hpp"

namespace migsim {

/// The comparison policies: hold until forced, migrate to the user every
/// slot, or minimize the one-slot cost.
enum class BaselineKind { never_migrate, always_migrate, myopic };

inline std::string to_string(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::never_migrate: return "never-migrate";
        case BaselineKind::always_migrate: return "always-migrate";
        case BaselineKind::myopic: return "myopic";
    }
    return "?";
}

/// Never-migrate holds everywhere except the boundary state, where it
/// falls back to the user's location; myopic breaks ties toward the
/// smallest action.
inline DistancePolicy build_baseline_1d(const DistanceMdpSpec& spec, BaselineKind kind) {
    spec.require_valid();
    DistancePolicy policy;
    policy.action.assign(static_cast<std::size_t>(spec.n_max + 1), 0);
    switch (kind) {
        case BaselineKind::always_migrate:
            break;
        case BaselineKind::never_migrate:
            for (int d = 1; d < spec.n_max; ++d) policy.action[static_cast<std::size_t>(d)] = d;
            break;
        case BaselineKind::myopic:
            for (int d = 1; d <= spec.n_max; ++d) {
                const int a_max = d == spec.n_max ? d - 1 : d;
                int best = 0;
                double best_cost = one_slot_cost(spec, d, 0);
                for (int a = 1; a <= a_max; ++a) {
                    const double c = one_slot_cost(spec, d, a);
                    if (c < best_cost) {
                        best_cost = c;
                        best = a;
                    }
                }
                policy.action[static_cast<std::size_t>(d)] = best;
            }
            break;
    }
    return policy;
}

inline HexPolicy build_baseline_2d(const HexMdpSpec& spec, BaselineKind kind) {
    spec.require_valid();
    const detail::HexModel model(spec);
    HexPolicy policy;
    policy.action.assign(static_cast<std::size_t>(model.space.size()), 0);
    switch (kind) {
        case BaselineKind::always_migrate:
            break;
        case BaselineKind::never_migrate:
            for (int s = 0; s < model.space.size(); ++s)
                if (model.space.ring_of(s) < spec.n_max)
                    policy.action[static_cast<std::size_t>(s)] = s;
            break;
        case BaselineKind::myopic:
            for (int s = 0; s < model.space.size(); ++s) {
                const int limit = model.action_limit(s);
                int best = 0;
                double best_cost = std::numeric_limits<double>::infinity();
                for (int a = 0; a < limit; ++a) {
                    const double c = model.cost(s, a);
                    if (c < best_cost) {
                        best_cost = c;
                        best = a;
                    }
                }
                policy.action[static_cast<std::size_t>(s)] = best;
            }
            break;
    }
    return policy;
}

/// One evaluated policy in a comparison table.
struct ComparisonRow {
    std::string name;
    std::vector<double> values; // per-state discounted cost
    double state_avg = 0.0;
    double avg_gap_vs_optimal = 0.0;
    double max_gap_vs_optimal = 0.0;
};

namespace detail {

inline double mean(const std::vector<double>& v) {
    double sum = 0.0;
    for (const double x : v) sum += x;
    return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

template <typename Policy, typename Evaluate>
std::vector<ComparisonRow> compare_rows(const std::vector<std::pair<std::string, Policy>>& policies,
                                        const std::vector<double>& optimal, Evaluate&& evaluate) {
    std::vector<ComparisonRow> rows;
    ComparisonRow opt_row;
    opt_row.name = "optimal";
    opt_row.values = optimal;
    opt_row.state_avg = mean(optimal);
    rows.push_back(std::move(opt_row));
    for (const auto& [name, policy] : policies) {
        ComparisonRow row;
        row.name = name;
        row.values = evaluate(policy);
        row.state_avg = mean(row.values);
        row.avg_gap_vs_optimal = row.state_avg - rows.front().state_avg;
        for (std::size_t i = 0; i < row.values.size(); ++i)
            row.max_gap_vs_optimal = std::max(row.max_gap_vs_optimal, row.values[i] - optimal[i]);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace detail

/// Evaluates the given policies exactly and reports them next to the
/// optimal policy with per-state averages and gaps.
inline std::vector<ComparisonRow> compare_policies(
    const HexMdpSpec& spec, const std::vector<std::pair<std::string, HexPolicy>>& policies) {
    spec.require_valid();
    const auto optimal = solve_exact(spec, SolveMethod::policy_iteration);
    return detail::compare_rows(policies, optimal.values,
                                [&](const HexPolicy& p) { return evaluate_policy_2d(spec, p); });
}

inline std::vector<ComparisonRow> compare_policies(
    const DistanceMdpSpec& spec, const std::vector<std::pair<std::string, DistancePolicy>>& policies) {
    spec.require_valid();
    const auto optimal = modified_policy_iteration(spec);
    return detail::compare_rows(policies, optimal.values, [&](const DistancePolicy& p) {
        return evaluate_policy_linear_system(spec, p);
    });
}

} // namespace migsim
