#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "migsim/cost_model.hpp"

#include "oracles.hpp"

using namespace migsim;

namespace {

TabulatedCost tabulate(double (*f)(int), int width) {
    TabulatedCost t;
    t.width = width;
    for (int n = 0; n <= 2 * width; ++n) t.values.push_back(f(n));
    return t;
}

double square(int n) { return static_cast<double>(n) * n; }
double log_plus_10(int n) { return std::log(n + 1.0) + 10.0; }
double sqrt_plus_5(int n) { return std::sqrt(n + 1.0) + 5.0; }

// The two fit candidates derived straight from the three-point system,
// for checking the library's root selection independently.
std::pair<ConstPlusExpCost, ConstPlusExpCost> both_roots(const TabulatedCost& f, double eps = 1e-6) {
    const double f0 = f.values.front();
    const double fw = f.values[static_cast<std::size_t>(f.width)];
    const double f2w = f.values.back();
    const double ratio = (f2w - f0) / (fw - f0);
    const double disc = std::sqrt(std::max(ratio * ratio - 4.0 * (ratio - 1.0), 0.0));
    const auto from_root = [&](double y) {
        if (std::abs(y - 1.0) < eps) y = y >= 1.0 ? 1.0 + eps : 1.0 - eps;
        return ConstPlusExpCost{(f0 * y - fw) / (y - 1.0), (fw - f0) / (y - 1.0),
                                std::pow(y, 1.0 / f.width)};
    };
    return {from_root((ratio + disc) / 2.0), from_root((ratio - disc) / 2.0)};
}

} // namespace

TEST_CASE("eval_cost matches hand-computed values") {
    const ConstPlusExpCost cd{1.0, -1.0, 0.8};
    CHECK(eval_cost(cd, 0) == 0.0);
    CHECK_THAT(eval_cost(cd, 1), Catch::Matchers::WithinAbs(0.2, 1e-12));

    const ConstPlusExpCost cm{1.5, -0.5, 0.8};
    CHECK_THAT(eval_cost(cm, 2), Catch::Matchers::WithinAbs(1.18, 1e-12));
}

TEST_CASE("validate reports sign and non-negativity violations") {
    CHECK(validate({1.0, -1.0, 0.8}).empty()); // const + lin == 0 boundary is fine
    CHECK(validate({1.0, 1.0, 0.8}).size() == 1);
    CHECK(validate({0.4, -0.5, 0.8}).size() == 1);
    CHECK(validate({1.0, 0.5, 1.2}).empty());
    CHECK(validate({1.0, -0.5, 1.2}).size() == 1);
    CHECK(!validate({1.0, -0.5, -0.2}).empty());
}

TEST_CASE("valid costs are non-negative and non-decreasing") {
    oracles::SpecSampler sampler(20240811);
    for (int trial = 0; trial < 200; ++trial) {
        const ConstPlusExpCost c = sampler.cost();
        REQUIRE(is_valid(c));
        double prev = eval_cost(c, 0);
        CHECK(prev == 0.0);
        for (int x = 1; x <= 40; ++x) {
            const double cur = eval_cost(c, x);
            CHECK(cur >= 0.0);
            CHECK(cur >= prev - 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("fit of n^2 with W=1 solves the three-point system exactly") {
    const auto f = tabulate(square, 1);
    const FitResult fit = fit_exponential(f);
    CHECK_THAT(fit.params.base, Catch::Matchers::WithinAbs(3.0, 1e-12));
    CHECK_THAT(fit.params.const_term, Catch::Matchers::WithinAbs(-0.5, 1e-12));
    CHECK_THAT(fit.params.lin_term, Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK(fit.sse < 1e-18);
    CHECK(fit.root_used == FitRoot::plus); // the other root is theta^W = 1, rejected
    CHECK_FALSE(fit.guarded);
    // negative constant term, but still on the valid side of beta_c >= -beta_l
    CHECK(fit.params.const_term >= -fit.params.lin_term);
    CHECK(is_valid(fit.params));
}

TEST_CASE("fit rejects degenerate and decreasing tables") {
    TabulatedCost constant{{2.0, 2.0, 2.0}, 1};
    CHECK_THROWS_AS(fit_exponential(constant), DegenerateInputError);

    TabulatedCost decreasing{{0.0, 2.0, 1.0}, 1};
    CHECK_THROWS_AS(fit_exponential(decreasing), NonMonotoneError);
}

TEST_CASE("fit interpolates the table at 0, W and 2W") {
    double (*functions[])(int) = {square, log_plus_10, sqrt_plus_5};
    for (auto* f : functions) {
        for (const int w : {1, 2, 5}) {
            const auto table = tabulate(f, w);
            const FitResult fit = fit_exponential(table);
            REQUIRE_FALSE(fit.guarded);
            for (const int n : {0, w, 2 * w}) {
                const double expected = table.values[static_cast<std::size_t>(n)];
                const double got = fit.params.const_term +
                                   fit.params.lin_term * std::pow(fit.params.base, n);
                CHECK_THAT(got, Catch::Matchers::WithinAbs(expected, 1e-9 * (1.0 + std::abs(expected))));
            }
        }
    }
}

TEST_CASE("fit returns the smaller-error root of the two candidates") {
    double (*functions[])(int) = {square, log_plus_10, sqrt_plus_5};
    for (auto* f : functions) {
        for (const int w : {1, 2, 5}) {
            const auto table = tabulate(f, w);
            const FitResult fit = fit_exponential(table);
            const auto [plus, minus] = both_roots(table);
            const double sse_plus = sum_squared_error(table, plus);
            const double sse_minus = sum_squared_error(table, minus);
            CHECK_THAT(fit.sse, Catch::Matchers::WithinAbs(std::min(sse_plus, sse_minus), 1e-12));
            if (fit.root_used == FitRoot::plus)
                CHECK(sse_plus <= sse_minus);
            else
                CHECK(sse_minus <= sse_plus);
        }
    }
}

TEST_CASE("linear tables trigger the epsilon guard on both roots") {
    // f(n) = n gives R = 2, so both roots collide with theta^W = 1
    TabulatedCost linear{{0.0, 1.0, 2.0}, 1};
    const FitResult fit = fit_exponential(linear);
    CHECK(fit.guarded);
    CHECK(std::isfinite(fit.sse));
}

TEST_CASE("sum squared error uses the exponential form at n = 0 too") {
    const ConstPlusExpCost c{1.5, -0.5, 0.8};
    TabulatedCost exact;
    exact.width = 2;
    for (int n = 0; n <= 4; ++n)
        exact.values.push_back(c.const_term + c.lin_term * std::pow(c.base, n));
    CHECK_THAT(sum_squared_error(exact, c), Catch::Matchers::WithinAbs(0.0, 1e-18));

    // residuals at n in {1, 3} only: SSE = (3 - 2 sqrt 3)^2 + (11 - 6 sqrt 3)^2
    const auto f = tabulate(square, 2);
    const FitResult fit = fit_exponential(f);
    const double expected = 250.0 - 144.0 * std::sqrt(3.0);
    CHECK_THAT(fit.sse, Catch::Matchers::WithinAbs(expected, 1e-9));
    CHECK(fit.sse > 0.0);
}
