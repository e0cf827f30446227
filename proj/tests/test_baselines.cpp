#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "migsim/baselines.hpp"

#include "oracles.hpp"

using namespace migsim;

namespace {

HexMdpSpec family_spec(double beta_l_neg, double gamma, int n_max = 4, double r = 0.1) {
    HexMdpSpec spec;
    spec.n_max = n_max;
    spec.move_prob = r;
    spec.gamma = gamma;
    spec.migration_cost = {1.0 + beta_l_neg, -beta_l_neg, 0.8}; // beta_c + beta_l = 1
    spec.transmission_cost = {1.0, -1.0, 0.8};
    return spec;
}

} // namespace

TEST_CASE("baseline construction on the distance model") {
    const DistanceMdpSpec spec = build_approx_distance_spec(family_spec(0.5, 0.9));
    const auto never = build_baseline_1d(spec, BaselineKind::never_migrate);
    const auto always = build_baseline_1d(spec, BaselineKind::always_migrate);
    for (int d = 1; d < spec.n_max; ++d) {
        CHECK(never.action[static_cast<std::size_t>(d)] == d);
        CHECK(always.action[static_cast<std::size_t>(d)] == 0);
    }
    CHECK(never.action[static_cast<std::size_t>(spec.n_max)] == 0);
    CHECK(always.action[0] == 0);
    CHECK(never.validate(spec.n_max).empty());
    CHECK(always.validate(spec.n_max).empty());
}

TEST_CASE("baseline construction on the hexagon model") {
    const HexMdpSpec spec = family_spec(0.5, 0.9);
    const HexStateSpace space(spec.n_max);
    const auto never = build_baseline_2d(spec, BaselineKind::never_migrate);
    const auto always = build_baseline_2d(spec, BaselineKind::always_migrate);
    for (int s = 0; s < space.size(); ++s) {
        if (space.ring_of(s) < spec.n_max)
            CHECK(never.action[static_cast<std::size_t>(s)] == s);
        else
            CHECK(never.action[static_cast<std::size_t>(s)] == 0);
        CHECK(always.action[static_cast<std::size_t>(s)] == 0);
    }
    CHECK(never.validate(space).empty());
    CHECK(always.validate(space).empty());
}

TEST_CASE("myopic equals never-migrate when migration dominates transmission") {
    // -beta_l >= 0.5 makes c_m(x) >= c_d(x) everywhere in range
    for (const double beta_l_neg : {0.5, 0.75, 1.0}) {
        const HexMdpSpec spec = family_spec(beta_l_neg, 0.9);
        for (int x = 1; x <= spec.n_max; ++x)
            REQUIRE(eval_cost(spec.migration_cost, x) >= eval_cost(spec.transmission_cost, x));
        const auto myopic = build_baseline_2d(spec, BaselineKind::myopic);
        const auto never = build_baseline_2d(spec, BaselineKind::never_migrate);
        CHECK(myopic == never);

        const DistanceMdpSpec dspec = build_approx_distance_spec(spec);
        CHECK(build_baseline_1d(dspec, BaselineKind::myopic) ==
              build_baseline_1d(dspec, BaselineKind::never_migrate));
    }
}

TEST_CASE("myopic minimizes the one-slot cost with smallest-action ties") {
    oracles::SpecSampler sampler(99);
    for (int trial = 0; trial < 10; ++trial) {
        const DistanceMdpSpec spec = sampler.distance_spec(8);
        const auto myopic = build_baseline_1d(spec, BaselineKind::myopic);
        for (int d = 1; d <= 8; ++d) {
            const int chosen = myopic.action[static_cast<std::size_t>(d)];
            const double chosen_cost = one_slot_cost(spec, d, chosen);
            const int a_max = d == 8 ? 7 : d;
            for (int a = 0; a <= a_max; ++a) {
                const double cost = one_slot_cost(spec, d, a);
                CHECK(chosen_cost <= cost + 1e-12);
                if (a < chosen) CHECK(cost > chosen_cost); // ties break low
            }
        }
    }
}

TEST_CASE("the optimal policy dominates every baseline at every state") {
    oracles::SpecSampler sampler(271828);
    for (int trial = 0; trial < 5; ++trial) {
        const HexMdpSpec spec = sampler.hex_spec(3);
        const auto rows = compare_policies(
            spec, {{"never-migrate", build_baseline_2d(spec, BaselineKind::never_migrate)},
                   {"always-migrate", build_baseline_2d(spec, BaselineKind::always_migrate)},
                   {"myopic", build_baseline_2d(spec, BaselineKind::myopic)}});
        REQUIRE(rows.size() == 4);
        const auto& optimal = rows.front();
        CHECK(optimal.name == "optimal");
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(rows[i].avg_gap_vs_optimal >= -1e-9);
            for (std::size_t s = 0; s < optimal.values.size(); ++s)
                CHECK(optimal.values[s] <= rows[i].values[s] + 1e-9);
        }
    }
}

TEST_CASE("optimal cost tracks always-migrate for cheap migrations and never-migrate for dear ones") {
    const double gamma = 0.9;
    const auto gap_to = [&](double beta_l_neg, BaselineKind kind) {
        const HexMdpSpec spec = family_spec(beta_l_neg, gamma);
        const auto rows =
            compare_policies(spec, {{to_string(kind), build_baseline_2d(spec, kind)}});
        return rows[1].state_avg - rows[0].state_avg;
    };
    // trend across the sweep, not absolute closeness
    CHECK(gap_to(0.05, BaselineKind::always_migrate) < gap_to(0.95, BaselineKind::always_migrate));
    CHECK(gap_to(0.95, BaselineKind::never_migrate) < gap_to(0.05, BaselineKind::never_migrate));
}
