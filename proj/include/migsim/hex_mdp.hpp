#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "migsim/cost_model.hpp"
#include "migsim/distance_mdp.hpp"
#include "migsim/errors.hpp"
#include "migsim/hex_grid.hpp"

namespace migsim {

/**
 * The 2-D offset MDP on hexagon cells. States are user-service offsets
 * within hop distance n_max of the origin (3N^2 + 3N + 1 cells). Each
 * timeslot the offset moves to one of its six neighbors with
 * probability move_prob and stays put otherwise; mass toward cells
 * beyond ring n_max is redirected to staying.
 */
struct HexMdpSpec {
    int n_max = 10;
    double move_prob = 0.1; // r, per-neighbor
    double gamma = 0.9;
    ConstPlusExpCost migration_cost;    // c_m
    ConstPlusExpCost transmission_cost; // c_d

    std::vector<std::string> validate() const {
        std::vector<std::string> v;
        if (n_max < 1) v.push_back("n_max < 1");
        if (move_prob < 0.0 || 6.0 * move_prob > 1.0 + 1e-12)
            v.push_back("move_prob outside [0, 1/6]");
        if (!(gamma > 0.0 && gamma < 1.0)) v.push_back("gamma outside (0, 1)");
        for (const auto& m : migsim::validate(migration_cost)) v.push_back("migration_cost: " + m);
        for (const auto& m : migsim::validate(transmission_cost)) v.push_back("transmission_cost: " + m);
        return v;
    }

    void require_valid() const {
        const auto v = validate();
        if (!v.empty()) {
            std::string msg = "invalid hex MDP spec:";
            for (const auto& s : v) msg += " [" + s + "]";
            throw ValidationError(msg);
        }
    }
};

/// Deterministic stationary policy over flat state ids: action[s] is the
/// id of the post-migration offset.
struct HexPolicy {
    std::vector<int> action;

    std::vector<std::string> validate(const HexStateSpace& space) const {
        std::vector<std::string> v;
        if (static_cast<int>(action.size()) != space.size()) {
            v.push_back("policy size != state count");
            return v;
        }
        for (int s = 0; s < space.size(); ++s) {
            const int a = action[static_cast<std::size_t>(s)];
            if (a < 0 || a >= space.size()) {
                v.push_back("action id out of range at state " + std::to_string(s));
                continue;
            }
            if (space.ring_of(a) > space.ring_of(s))
                v.push_back("action above current ring at state " + std::to_string(s));
            if (space.ring_of(s) == space.n_max() && space.ring_of(a) >= space.n_max())
                v.push_back("no migration at boundary state " + std::to_string(s));
        }
        return v;
    }

    void require_valid(const HexStateSpace& space) const {
        const auto v = validate(space);
        if (!v.empty()) {
            std::string msg = "invalid hex policy:";
            for (const auto& s : v) msg += " [" + s + "]";
            throw ValidationError(msg);
        }
    }

    friend bool operator==(const HexPolicy& a, const HexPolicy& b) { return a.action == b.action; }
};

using ValueTable2D = std::vector<double>;

/// Transition distribution out of an intermediate state: stay with
/// 1 - 6r plus the redirected mass of out-of-range neighbors, move to
/// each in-range neighbor with r.
inline std::vector<std::pair<int, double>> transition_distribution(const HexMdpSpec& spec,
                                                                   const HexStateSpace& space,
                                                                   int intermediate) {
    const double r = spec.move_prob;
    std::vector<std::pair<int, double>> dist;
    dist.reserve(7);
    int out_of_range = 0;
    for (const int nb : space.neighbor_ids(intermediate)) {
        if (nb < 0)
            ++out_of_range;
        else
            dist.emplace_back(nb, r);
    }
    const double stay = std::max(0.0, 1.0 - 6.0 * r) + out_of_range * r;
    dist.emplace_back(intermediate, stay);
    return dist;
}

/// One-slot cost of migrating from offset s to offset a and serving the
/// user from ring(a).
inline double one_slot_cost(const HexMdpSpec& spec, const HexStateSpace& space, int s, int a) {
    return eval_cost(spec.migration_cost, hex_distance(space.axial(s), space.axial(a))) +
           eval_cost(spec.transmission_cost, space.ring_of(a));
}

namespace detail {

struct HexModel {
    const HexMdpSpec& spec;
    HexStateSpace space;
    std::vector<double> cm_by_distance; // [0, 2N]
    std::vector<double> cd_by_ring;     // [0, N]
    std::vector<double> stay_prob;      // per state, with redirected mass

    explicit HexModel(const HexMdpSpec& s) : spec(s), space(s.n_max) {
        cm_by_distance.resize(static_cast<std::size_t>(2 * s.n_max + 1));
        for (int x = 0; x <= 2 * s.n_max; ++x)
            cm_by_distance[static_cast<std::size_t>(x)] = eval_cost(s.migration_cost, x);
        cd_by_ring.resize(static_cast<std::size_t>(s.n_max + 1));
        for (int x = 0; x <= s.n_max; ++x)
            cd_by_ring[static_cast<std::size_t>(x)] = eval_cost(s.transmission_cost, x);
        stay_prob.resize(static_cast<std::size_t>(space.size()));
        for (int id = 0; id < space.size(); ++id) {
            int out = 0;
            for (const int nb : space.neighbor_ids(id))
                if (nb < 0) ++out;
            stay_prob[static_cast<std::size_t>(id)] =
                std::max(0.0, 1.0 - 6.0 * s.move_prob) + out * s.move_prob;
        }
    }

    double cost(int s, int a) const {
        return cm_by_distance[static_cast<std::size_t>(hex_distance(space.axial(s), space.axial(a)))] +
               cd_by_ring[static_cast<std::size_t>(space.ring_of(a))];
    }

    /// Expected value after one move out of intermediate state a.
    double continuation(const ValueTable2D& values, int a) const {
        double sum = stay_prob[static_cast<std::size_t>(a)] * values[static_cast<std::size_t>(a)];
        for (const int nb : space.neighbor_ids(a))
            if (nb >= 0) sum += spec.move_prob * values[static_cast<std::size_t>(nb)];
        return sum;
    }

    /// One past the largest action id allowed at state s (actions are a
    /// contiguous prefix of ids because ids are ordered by ring).
    int action_limit(int s) const {
        const int ring = space.ring_of(s);
        return ring == spec.n_max ? ring_start(spec.n_max) : ring_start(ring + 1);
    }

    HexPolicy greedy(const ValueTable2D& values) const {
        HexPolicy policy;
        policy.action.resize(static_cast<std::size_t>(space.size()));
        std::vector<double> cont(static_cast<std::size_t>(space.size()));
        for (int a = 0; a < space.size(); ++a)
            cont[static_cast<std::size_t>(a)] = continuation(values, a);
        for (int s = 0; s < space.size(); ++s) {
            const int limit = action_limit(s);
            int best = 0;
            double best_q = std::numeric_limits<double>::infinity();
            for (int a = 0; a < limit; ++a) {
                const double q = cost(s, a) + spec.gamma * cont[static_cast<std::size_t>(a)];
                if (q < best_q) {
                    best_q = q;
                    best = a;
                }
            }
            policy.action[static_cast<std::size_t>(s)] = best;
        }
        return policy;
    }

    ValueTable2D evaluate(const HexPolicy& policy) const {
        const int n = space.size();
        Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
        Eigen::VectorXd rhs(n);
        for (int s = 0; s < n; ++s) {
            const int a = policy.action[static_cast<std::size_t>(s)];
            rhs(s) = cost(s, a);
            system(s, a) -= spec.gamma * stay_prob[static_cast<std::size_t>(a)];
            for (const int nb : space.neighbor_ids(a))
                if (nb >= 0) system(s, nb) -= spec.gamma * spec.move_prob;
        }
        const Eigen::VectorXd solution = system.partialPivLu().solve(rhs);
        return {solution.data(), solution.data() + n};
    }
};

} // namespace detail

enum class SolveMethod { value_iteration, policy_iteration };

struct SolveResult2D {
    HexPolicy policy;
    ValueTable2D values;
    int iterations = 0;
};

/**
 * Optimal policy and value table of the 2-D offset MDP. Actions are
 * restricted to rings at or below the current one (farther migrations
 * are never optimal) and the boundary ring must migrate inward.
 *
 * Policy iteration evaluates each policy exactly through a linear
 * system; value iteration sweeps the Bellman operator until the
 * sup-norm change is below tolerance * (1 - gamma) / gamma.
 */
inline SolveResult2D solve_exact(const HexMdpSpec& spec, SolveMethod method,
                                 double tolerance = 1e-9) {
    spec.require_valid();
    const detail::HexModel model(spec);
    if (method == SolveMethod::policy_iteration) {
        HexPolicy policy;
        policy.action.assign(static_cast<std::size_t>(model.space.size()), 0);
        const int cap = 10 * (model.space.size() + 1);
        for (int iter = 1; iter <= cap; ++iter) {
            ValueTable2D values = model.evaluate(policy);
            HexPolicy improved = model.greedy(values);
            if (improved == policy) return {std::move(policy), std::move(values), iter};
            policy = std::move(improved);
        }
        throw NonConvergenceError("2-D policy iteration exceeded its iteration cap");
    }

    if (!(tolerance > 0.0)) throw ValidationError("tolerance must be positive");
    const double stop = tolerance * (1.0 - spec.gamma) / spec.gamma;
    ValueTable2D values(static_cast<std::size_t>(model.space.size()), 0.0);
    ValueTable2D next(values.size(), 0.0);
    std::vector<double> cont(values.size());
    int iterations = 0;
    double change = std::numeric_limits<double>::infinity();
    while (change >= stop) {
        if (++iterations > 2000000)
            throw NonConvergenceError("2-D value iteration exceeded its iteration cap");
        change = 0.0;
        for (int a = 0; a < model.space.size(); ++a)
            cont[static_cast<std::size_t>(a)] = model.continuation(values, a);
        for (int s = 0; s < model.space.size(); ++s) {
            const int limit = model.action_limit(s);
            double best = std::numeric_limits<double>::infinity();
            for (int a = 0; a < limit; ++a)
                best = std::min(best, model.cost(s, a) + spec.gamma * cont[static_cast<std::size_t>(a)]);
            next[static_cast<std::size_t>(s)] = best;
            change = std::max(change, std::abs(best - values[static_cast<std::size_t>(s)]));
        }
        values.swap(next);
    }
    HexPolicy policy = model.greedy(values);
    return {std::move(policy), std::move(values), iterations};
}

/// Exact policy evaluation over all offset states via a linear system.
inline ValueTable2D evaluate_policy_2d(const HexMdpSpec& spec, const HexPolicy& policy) {
    spec.require_valid();
    const detail::HexModel model(spec);
    policy.require_valid(model.space);
    return model.evaluate(policy);
}

/// Companion distance-based MDP of a hexagon spec: p0 = 6r, p = 2.5r,
/// q = 1.5r with the same horizon, discount, and costs.
inline DistanceMdpSpec build_approx_distance_spec(const HexMdpSpec& spec) {
    spec.require_valid();
    return DistanceMdpSpec{spec.n_max,      6.0 * spec.move_prob, 2.5 * spec.move_prob,
                           1.5 * spec.move_prob, spec.gamma,      spec.migration_cost,
                           spec.transmission_cost};
}

/**
 * Lifts a distance-based policy onto the hexagon. A state in ring i
 * whose 1-D action is ring i' migrates to a ring-i' cell on a shortest
 * path (hop distance i - i'), so the lifted one-slot cost matches the
 * 1-D one exactly; stay actions map to stay.
 */
inline HexPolicy map_1d_policy_to_2d(const HexMdpSpec& spec, const DistancePolicy& dpolicy) {
    spec.require_valid();
    dpolicy.require_valid(spec.n_max);
    const HexStateSpace space(spec.n_max);
    HexPolicy policy;
    policy.action.resize(static_cast<std::size_t>(space.size()));
    for (int s = 0; s < space.size(); ++s) {
        const int ring = space.ring_of(s);
        const int target_ring = dpolicy.action[static_cast<std::size_t>(ring)];
        policy.action[static_cast<std::size_t>(s)] =
            target_ring == ring ? s : space.id_of(shortest_path_action(space.axial(s), target_ring));
    }
    return policy;
}

/**
 * Worst-case penalty of using the distance-based policy instead of the
 * true 2-D optimum: gamma * r * k / (1 - gamma) with
 * k = max over model distances x of c_m(x + 2) - c_m(x).
 */
inline double error_bound(const HexMdpSpec& spec) {
    spec.require_valid();
    double k = 0.0;
    for (int x = 0; x <= spec.n_max - 2; ++x)
        k = std::max(k, eval_cost(spec.migration_cost, x + 2) - eval_cost(spec.migration_cost, x));
    return spec.gamma * spec.move_prob * k / (1.0 - spec.gamma);
}

} // namespace migsim
