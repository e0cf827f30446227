#pragma once

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "migsim/cost_model.hpp"
#include "migsim/errors.hpp"

namespace migsim {

/**
 * The 1-D distance-based MDP. States d in [0, n_max] are user-service
 * distances observed before migration. After the action a(d) the chain
 * sits in intermediate state a and moves up with probability p, down
 * with probability q (p0 up from state 0), else stays.
 */
struct DistanceMdpSpec {
    int n_max = 10;
    double p0 = 0.0;
    double p = 0.0;
    double q = 0.0;
    double gamma = 0.9;
    ConstPlusExpCost migration_cost;    // c_m
    ConstPlusExpCost transmission_cost; // c_d

    /// Spec for a uniform 1-D random walk that moves one step left or
    /// right with probability r1 each: p = q = r1 and p0 = 2 r1.
    static DistanceMdpSpec from_random_walk_1d(int n_max, double r1, double gamma,
                                               ConstPlusExpCost migration_cost,
                                               ConstPlusExpCost transmission_cost) {
        return DistanceMdpSpec{n_max, 2.0 * r1, r1, r1, gamma, migration_cost, transmission_cost};
    }

    std::vector<std::string> validate() const {
        std::vector<std::string> v;
        if (n_max < 2) v.push_back("n_max < 2");
        if (p0 < 0.0 || p0 > 1.0) v.push_back("p0 outside [0, 1]");
        if (p <= 0.0) v.push_back("p <= 0 (degenerate chain)");
        if (q < 0.0) v.push_back("q < 0");
        if (p + q > 1.0) v.push_back("p + q > 1");
        if (!(gamma > 0.0 && gamma < 1.0)) v.push_back("gamma outside (0, 1)");
        for (const auto& m : migsim::validate(migration_cost)) v.push_back("migration_cost: " + m);
        for (const auto& m : migsim::validate(transmission_cost)) v.push_back("transmission_cost: " + m);
        return v;
    }

    void require_valid() const {
        const auto v = validate();
        if (!v.empty()) {
            std::string msg = "invalid distance MDP spec:";
            for (const auto& s : v) msg += " [" + s + "]";
            throw ValidationError(msg);
        }
    }
};

/**
 * Deterministic stationary policy: action[d] is the post-migration
 * distance from state d. Valid policies satisfy action[0] == 0,
 * action[d] <= d, and action[n_max] < n_max (forced migration at the
 * boundary).
 */
struct DistancePolicy {
    std::vector<int> action;

    std::vector<std::string> validate(int n_max) const {
        std::vector<std::string> v;
        if (static_cast<int>(action.size()) != n_max + 1) {
            v.push_back("policy size != n_max + 1");
            return v;
        }
        if (action[0] != 0) v.push_back("action at 0 must be 0");
        for (int d = 0; d <= n_max; ++d)
            if (action[static_cast<std::size_t>(d)] < 0 || action[static_cast<std::size_t>(d)] > d)
                v.push_back("action at " + std::to_string(d) + " outside [0, d]");
        if (action[static_cast<std::size_t>(n_max)] >= n_max)
            v.push_back("no migration at the boundary state");
        return v;
    }

    void require_valid(int n_max) const {
        const auto v = validate(n_max);
        if (!v.empty()) {
            std::string msg = "invalid distance policy:";
            for (const auto& s : v) msg += " [" + s + "]";
            throw ValidationError(msg);
        }
    }

    friend bool operator==(const DistancePolicy& a, const DistancePolicy& b) {
        return a.action == b.action;
    }
};

/// Discounted sum cost per state, indexed by distance d.
using ValueTable1D = std::vector<double>;

/// One-slot cost of taking action a at state d: migrate |d - a| hops,
/// then serve the user from distance a.
inline double one_slot_cost(const DistanceMdpSpec& spec, int d, int a) {
    if (a < 0 || a > d)
        throw InvalidActionError("action " + std::to_string(a) + " invalid at state " + std::to_string(d));
    return eval_cost(spec.migration_cost, d - a) + eval_cost(spec.transmission_cost, a);
}

/**
 * Constants of the difference-equation solution
 *
 *   V(d) = A m1^d + B m2^d + D + H theta^d
 *
 * with phi1 = gamma q / (1 - gamma (1 - p - q)) and so on. `degenerate`
 * is set when theta collides with a characteristic root
 * (|1 - phi1/theta - phi2 theta| below tolerance), in which case
 * h_const carries the coefficient of the resonant d * theta^d form
 * instead.
 */
struct PhiConstants {
    double phi0 = 0.0;
    double phi1 = 0.0;
    double phi2 = 0.0;
    double phi3 = 0.0;
    double phi4 = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
    double d_const = 0.0;
    double h_const = 0.0;
    bool degenerate = false;
};

inline PhiConstants phi_constants(const DistanceMdpSpec& spec, double degenerate_tol = 1e-9) {
    if (spec.p <= 0.0)
        throw DegenerateSpecError("p == 0: characteristic roots undefined");
    PhiConstants c;
    const double denom = 1.0 - spec.gamma * (1.0 - spec.p - spec.q);
    c.phi0 = spec.gamma * spec.p0 / (1.0 - spec.gamma * (1.0 - spec.p0));
    c.phi1 = spec.gamma * spec.q / denom;
    c.phi2 = spec.gamma * spec.p / denom;
    c.phi3 = spec.transmission_cost.const_term / denom;
    c.phi4 = spec.transmission_cost.lin_term / denom;
    const double disc = std::sqrt(std::max(1.0 - 4.0 * c.phi1 * c.phi2, 0.0));
    c.m1 = (1.0 + disc) / (2.0 * c.phi2);
    c.m2 = (1.0 - disc) / (2.0 * c.phi2);
    c.d_const = c.phi3 / (1.0 - c.phi1 - c.phi2);
    const double theta = spec.transmission_cost.base;
    if (theta == 0.0) {
        // theta^d vanishes for d >= 1, so no exponential particular term
        c.h_const = 0.0;
    } else {
        const double resonance = 1.0 - c.phi1 / theta - c.phi2 * theta;
        if (std::abs(resonance) < degenerate_tol) {
            c.degenerate = true;
            c.h_const = c.phi4 / (c.phi1 / theta - c.phi2 * theta);
        } else {
            c.h_const = c.phi4 / resonance;
        }
    }
    return c;
}

/**
 * Per-segment coefficients of the closed-form solution. Exponents are
 * taken relative to the segment start: for d in [lo_k, n_k],
 *
 *   V(d) = a_k m1^(d - lo_k) + b_k m2^(d - lo_k) + D + H theta^d
 *
 * where lo_0 = 0 and lo_k = n_(k-1). The relative form keeps the 2x2
 * segment systems well conditioned and stays meaningful when m2 == 0.
 */
struct ClosedFormSegment {
    int n_k = 0;
    double a_k = 0.0;
    double b_k = 0.0;
};

struct ClosedFormCoeffs {
    PhiConstants phi;
    std::vector<ClosedFormSegment> segments;
    bool theta_perturbed = false;
    double theta_used = 0.0;
};

namespace detail {

inline double pow_i(double base, int e) { return std::pow(base, static_cast<double>(e)); }

// Solves [c1a c1b; c2a c2b] [a; b] = [r1; r2].
inline std::pair<double, double> solve_2x2(double c1a, double c1b, double r1, double c2a,
                                           double c2b, double r2) {
    const double det = c1a * c2b - c1b * c2a;
    const double scale = std::max({std::abs(c1a * c2b), std::abs(c1b * c2a), 1e-300});
    if (std::abs(det) <= 1e-12 * scale)
        throw SingularSegmentError("segment system is numerically singular");
    return {(r1 * c2b - r2 * c1b) / det, (c1a * r2 - c2a * r1) / det};
}

} // namespace detail

/**
 * Closed-form policy evaluation via the difference-equation solution.
 *
 * Splits [0, n_max] at the policy's migration states {n_k}, solves a
 * 2x2 system per segment, and evaluates V(d) from the segment formulas
 * in O(n_max) total work. The first segment is pinned by the balance
 * equation at d = 0 plus the migration relation at n_0; later segments
 * by continuity at n_(k-1) plus the migration relation at n_k. The
 * direct relation V(n_k) = c_m + V(target) requires the target to hold
 * still; when the target migrates too, the constraint falls back to the
 * exact one-step balance equation through the intermediate state. Both
 * forms coincide whenever the direct one applies.
 *
 * Specs whose theta collides with a characteristic root are evaluated
 * with theta perturbed by 1e-7 (flagged in the returned coefficients);
 * evaluate_policy_linear_system stays exact for such cases.
 */
inline std::pair<ValueTable1D, ClosedFormCoeffs> closed_form_value(const DistanceMdpSpec& spec,
                                                                   const DistancePolicy& policy) {
    spec.require_valid();
    policy.require_valid(spec.n_max);

    DistanceMdpSpec work = spec;
    ClosedFormCoeffs coeffs;
    PhiConstants phi = phi_constants(work);
    if (phi.degenerate) {
        // resonant theta equals a characteristic root (m2 < 1 or m1 > 1);
        // nudging away from 1 keeps the sign constraints intact
        double& theta = work.transmission_cost.base;
        theta += theta >= 1.0 || theta < 1e-6 ? 1e-7 : -1e-7;
        phi = phi_constants(work);
        if (phi.degenerate)
            throw DegenerateSpecError("theta still resonant after perturbation");
        coeffs.theta_perturbed = true;
    }
    coeffs.phi = phi;
    coeffs.theta_used = work.transmission_cost.base;

    const int n = work.n_max;
    const double gamma = work.gamma;
    const double theta = work.transmission_cost.base;
    const double m1 = phi.m1;
    const double m2 = phi.m2;
    const double dc = phi.d_const;
    const double hc = phi.h_const;
    const auto theta_pow = [&](int d) { return detail::pow_i(theta, d); };

    std::vector<int> migration_states;
    for (int d = 1; d <= n; ++d)
        if (policy.action[static_cast<std::size_t>(d)] != d) migration_states.push_back(d);
    // the boundary state always migrates, so the list is never empty
    ValueTable1D values(static_cast<std::size_t>(n + 1), 0.0);

    // true one-step balance: V(n_k) = C_a(n_k) + gamma * E[V(next) | intermediate m]
    const auto successor_terms = [&](int m) {
        std::vector<std::pair<double, int>> terms;
        if (m == 0) {
            terms.emplace_back(gamma * work.p0, 1);
            terms.emplace_back(gamma * (1.0 - work.p0), 0);
        } else {
            terms.emplace_back(gamma * work.q, m - 1);
            terms.emplace_back(gamma * (1.0 - work.p - work.q), m);
            terms.emplace_back(gamma * work.p, m + 1);
        }
        return terms;
    };

    int lo = 0;
    for (std::size_t k = 0; k < migration_states.size(); ++k) {
        const int hi = migration_states[k];
        const int target = policy.action[static_cast<std::size_t>(hi)];
        const int len = hi - lo;
        double c1a, c1b, r1;
        if (k == 0) {
            // balance at d = 0 (exponents are absolute since lo == 0)
            c1a = 1.0 - phi.phi0 * m1;
            c1b = 1.0 - phi.phi0 * m2;
            r1 = dc * (phi.phi0 - 1.0) + hc * (phi.phi0 * theta - 1.0);
        } else {
            // continuity with the already-computed V(n_(k-1))
            c1a = 1.0;
            c1b = 1.0;
            r1 = values[static_cast<std::size_t>(lo)] - dc - hc * theta_pow(lo);
        }

        double c2a, c2b, r2;
        const bool target_holds = policy.action[static_cast<std::size_t>(target)] == target;
        if (target > lo || (k == 0 && target_holds)) {
            // migration relation with the target inside this segment
            c2a = detail::pow_i(m1, len) - detail::pow_i(m1, target - lo);
            c2b = detail::pow_i(m2, len) - detail::pow_i(m2, target - lo);
            r2 = eval_cost(work.migration_cost, hi - target) - hc * (theta_pow(hi) - theta_pow(target));
        } else if (target_holds) {
            // migration relation with a known value below the segment
            c2a = detail::pow_i(m1, len);
            c2b = detail::pow_i(m2, len);
            r2 = eval_cost(work.migration_cost, hi - target) + values[static_cast<std::size_t>(target)] -
                 dc - hc * theta_pow(hi);
        } else {
            // target migrates too: use the exact balance through it
            c2a = detail::pow_i(m1, len);
            c2b = detail::pow_i(m2, len);
            r2 = eval_cost(work.migration_cost, hi - target) + eval_cost(work.transmission_cost, target) -
                 dc - hc * theta_pow(hi);
            for (const auto& [weight, state] : successor_terms(target)) {
                if (state <= lo) {
                    r2 += weight * values[static_cast<std::size_t>(state)];
                } else {
                    // state == lo + 1 expressed through this segment's formula
                    c2a -= weight * detail::pow_i(m1, state - lo);
                    c2b -= weight * detail::pow_i(m2, state - lo);
                    r2 += weight * (dc + hc * theta_pow(state));
                }
            }
        }

        const auto [a_k, b_k] = detail::solve_2x2(c1a, c1b, r1, c2a, c2b, r2);
        coeffs.segments.push_back({hi, a_k, b_k});
        const int fill_from = k == 0 ? 0 : lo + 1;
        for (int d = fill_from; d <= hi; ++d)
            values[static_cast<std::size_t>(d)] =
                a_k * detail::pow_i(m1, d - lo) + b_k * detail::pow_i(m2, d - lo) + dc + hc * theta_pow(d);
        lo = hi;
    }

    return {std::move(values), std::move(coeffs)};
}

/**
 * Exact policy evaluation by solving the (n_max + 1)-state balance
 * equations (I - gamma P) V = C with partial-pivot LU. Cubic in n_max;
 * serves as the reference for closed_form_value.
 */
inline ValueTable1D evaluate_policy_linear_system(const DistanceMdpSpec& spec,
                                                  const DistancePolicy& policy) {
    spec.require_valid();
    policy.require_valid(spec.n_max);
    const int n = spec.n_max + 1;
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd rhs(n);
    for (int d = 0; d < n; ++d) {
        const int a = policy.action[static_cast<std::size_t>(d)];
        rhs(d) = one_slot_cost(spec, d, a);
        if (a == 0) {
            system(d, 1) -= spec.gamma * spec.p0;
            system(d, 0) -= spec.gamma * (1.0 - spec.p0);
        } else {
            system(d, a - 1) -= spec.gamma * spec.q;
            system(d, a) -= spec.gamma * (1.0 - spec.p - spec.q);
            system(d, a + 1) -= spec.gamma * spec.p;
        }
    }
    const Eigen::VectorXd solution = system.partialPivLu().solve(rhs);
    return {solution.data(), solution.data() + n};
}

namespace detail {

/// Expected next-state value from intermediate state a.
inline double continuation(const DistanceMdpSpec& spec, const ValueTable1D& values, int a) {
    if (a == 0)
        return spec.p0 * values[1] + (1.0 - spec.p0) * values[0];
    return spec.q * values[static_cast<std::size_t>(a - 1)] +
           (1.0 - spec.p - spec.q) * values[static_cast<std::size_t>(a)] +
           spec.p * values[static_cast<std::size_t>(a + 1)];
}

inline double q_value(const DistanceMdpSpec& spec, const ValueTable1D& values, int d, int a) {
    return one_slot_cost(spec, d, a) + spec.gamma * continuation(spec, values, a);
}

} // namespace detail

/// Greedy improvement with smallest-action tie-breaking. Actions at the
/// boundary state exclude staying, so no value beyond n_max is needed.
inline DistancePolicy greedy_improvement(const DistanceMdpSpec& spec, const ValueTable1D& values) {
    DistancePolicy policy;
    policy.action.assign(static_cast<std::size_t>(spec.n_max + 1), 0);
    for (int d = 1; d <= spec.n_max; ++d) {
        const int a_max = d == spec.n_max ? d - 1 : d;
        int best = 0;
        double best_q = detail::q_value(spec, values, d, 0);
        for (int a = 1; a <= a_max; ++a) {
            const double q = detail::q_value(spec, values, d, a);
            if (q < best_q) {
                best_q = q;
                best = a;
            }
        }
        policy.action[static_cast<std::size_t>(d)] = best;
    }
    return policy;
}

struct SolveResult1D {
    DistancePolicy policy;
    ValueTable1D values;
    int iterations = 0;
};

/**
 * Policy iteration with closed-form policy evaluation. Starts from the
 * always-migrate policy, alternates closed_form_value with greedy
 * improvement, and stops when the policy is stable. Each iteration is
 * O(n_max^2), dominated by the improvement sweep.
 */
inline SolveResult1D modified_policy_iteration(const DistanceMdpSpec& spec) {
    spec.require_valid();
    DistancePolicy policy;
    policy.action.assign(static_cast<std::size_t>(spec.n_max + 1), 0);
    const int cap = 10 * (spec.n_max + 1);
    for (int iter = 1; iter <= cap; ++iter) {
        ValueTable1D values = closed_form_value(spec, policy).first;
        DistancePolicy improved = greedy_improvement(spec, values);
        if (improved == policy) return {std::move(policy), std::move(values), iter};
        policy = std::move(improved);
    }
    throw NonConvergenceError("policy iteration exceeded " + std::to_string(cap) + " iterations");
}

/**
 * Plain value iteration on the Bellman operator. Stops once the
 * sup-norm change drops below tolerance * (1 - gamma) / gamma, which
 * bounds the optimality gap of the returned table by `tolerance`.
 */
inline SolveResult1D value_iteration_1d(const DistanceMdpSpec& spec, double tolerance) {
    spec.require_valid();
    if (!(tolerance > 0.0)) throw ValidationError("tolerance must be positive");
    const double stop = tolerance * (1.0 - spec.gamma) / spec.gamma;
    ValueTable1D values(static_cast<std::size_t>(spec.n_max + 1), 0.0);
    ValueTable1D next(values.size(), 0.0);
    int iterations = 0;
    double change = std::numeric_limits<double>::infinity();
    while (change >= stop) {
        ++iterations;
        change = 0.0;
        for (int d = 0; d <= spec.n_max; ++d) {
            const int a_max = d == spec.n_max ? d - 1 : d;
            double best = detail::q_value(spec, values, d, 0);
            for (int a = 1; a <= a_max; ++a)
                best = std::min(best, detail::q_value(spec, values, d, a));
            next[static_cast<std::size_t>(d)] = best;
            change = std::max(change, std::abs(best - values[static_cast<std::size_t>(d)]));
        }
        values.swap(next);
    }
    DistancePolicy policy = greedy_improvement(spec, values);
    return {std::move(policy), std::move(values), iterations};
}

} // namespace migsim
