#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "migsim/errors.hpp"

namespace migsim {

/**
 * Constant-plus-exponential cost function
 *
 *   c(x) = 0                              if x = 0
 *   c(x) = const_term + lin_term * base^x if x > 0
 *
 * used for both the migration cost c_m (const_term = beta_c,
 * lin_term = beta_l, base = mu) and the transmission cost c_d
 * (const_term = delta_c, lin_term = delta_l, base = theta).
 *
 * Valid parameter sets keep the function non-negative and
 * non-decreasing over integer distances x >= 0; see validate().
 */
struct ConstPlusExpCost {
    double const_term = 0.0;
    double lin_term = 0.0;
    double base = 1.0;
};

/// Evaluates the cost at an integer distance. Zero distance is free by
/// definition.
inline double eval_cost(const ConstPlusExpCost& params, int x) {
    if (x <= 0) return 0.0;
    return params.const_term + params.lin_term * std::pow(params.base, x);
}

/**
 * Checks the sign and monotonicity constraints on the parameters:
 *
 *  - base >= 0
 *  - lin_term <= 0 when base < 1, lin_term >= 0 when base > 1
 *    (monotone non-decreasing)
 *  - const_term >= -lin_term (non-negative for x > 0)
 *
 * Returns the list of violated constraints; empty means valid.
 */
inline std::vector<std::string> validate(const ConstPlusExpCost& params) {
    std::vector<std::string> violations;
    if (params.base < 0.0) violations.push_back("base < 0");
    if (params.base < 1.0 && params.lin_term > 0.0)
        violations.push_back("lin_term > 0 with base < 1");
    if (params.base > 1.0 && params.lin_term < 0.0)
        violations.push_back("lin_term < 0 with base > 1");
    if (params.const_term < -params.lin_term)
        violations.push_back("const_term < -lin_term");
    return violations;
}

inline bool is_valid(const ConstPlusExpCost& params) {
    return validate(params).empty();
}

/**
 * A cost function tabulated at integer distances 0..2W, the input of
 * fit_exponential(). `values[n]` is f(n) and must be non-decreasing.
 */
struct TabulatedCost {
    std::vector<double> values;
    int width = 0; // W; values.size() == 2W + 1
};

/// Which of the two candidate roots of theta^W was selected by the fit.
enum class FitRoot { plus, minus };

struct FitResult {
    ConstPlusExpCost params;
    double sse = 0.0;
    FitRoot root_used = FitRoot::plus;
    bool guarded = false; // epsilon guard moved theta^W off 1
};

/// Sum squared error of the exponential form against a table, evaluated
/// over n in [0, 2W]. Note the exponential form is used at n = 0 as well
/// (const_term + lin_term, not the zero special case of eval_cost).
inline double sum_squared_error(const TabulatedCost& f, const ConstPlusExpCost& params) {
    double sse = 0.0;
    for (std::size_t n = 0; n < f.values.size(); ++n) {
        const double fit = params.const_term + params.lin_term * std::pow(params.base, static_cast<double>(n));
        const double resid = f.values[n] - fit;
        sse += resid * resid;
    }
    return sse;
}

namespace detail {

struct FitCandidate {
    ConstPlusExpCost params;
    double sse = 0.0;
    bool guarded = false;
};

inline FitCandidate fit_candidate(const TabulatedCost& f, double theta_pow_w, double guard_eps) {
    FitCandidate cand;
    if (std::abs(theta_pow_w - 1.0) < guard_eps) {
        theta_pow_w = theta_pow_w >= 1.0 ? 1.0 + guard_eps : 1.0 - guard_eps;
        cand.guarded = true;
    }
    const int w = f.width;
    const double f0 = f.values[0];
    const double fw = f.values[static_cast<std::size_t>(w)];
    cand.params.base = std::pow(theta_pow_w, 1.0 / w);
    cand.params.const_term = (f0 * theta_pow_w - fw) / (theta_pow_w - 1.0);
    cand.params.lin_term = (fw - f0) / (theta_pow_w - 1.0);
    cand.sse = sum_squared_error(f, cand.params);
    return cand;
}

} // namespace detail

/**
 * Fits the constant-plus-exponential form to a tabulated cost by exact
 * interpolation at the three points n = 0, W, 2W:
 *
 *   const + lin         = f(0)
 *   const + lin*theta^W  = f(W)
 *   const + lin*theta^2W = f(2W)
 *
 * Both candidate roots theta^W = (R +- sqrt(R^2 - 4(R-1))) / 2 with
 * R = (f(2W) - f(0)) / (f(W) - f(0)) are formed; a root within
 * `guard_eps` of 1 is nudged to 1 +- guard_eps. The candidate with the
 * smaller sum squared error over n in [0, 2W] wins.
 *
 * Throws DegenerateInputError when f(W) == f(0) and NonMonotoneError
 * when the table decreases. The output parameters are not forced
 * through validate(); callers that need a usable cost function should
 * check them (the procedure can legitimately produce e.g. a negative
 * constant term).
 */
inline FitResult fit_exponential(const TabulatedCost& f, double guard_eps = 1e-6) {
    const int w = f.width;
    if (w < 1 || f.values.size() != static_cast<std::size_t>(2 * w + 1))
        throw ValidationError("tabulated cost must hold 2W+1 values for width W >= 1");
    for (std::size_t n = 0; n + 1 < f.values.size(); ++n)
        if (f.values[n + 1] < f.values[n])
            throw NonMonotoneError("tabulated cost decreases at n=" + std::to_string(n + 1));
    const double f0 = f.values[0];
    const double fw = f.values[static_cast<std::size_t>(w)];
    const double f2w = f.values[static_cast<std::size_t>(2 * w)];
    if (fw == f0)
        throw DegenerateInputError("f(W) == f(0): ratio R undefined");

    const double ratio = (f2w - f0) / (fw - f0);
    const double disc = std::sqrt(std::max(ratio * ratio - 4.0 * (ratio - 1.0), 0.0));
    const auto plus = detail::fit_candidate(f, (ratio + disc) / 2.0, guard_eps);
    const auto minus = detail::fit_candidate(f, (ratio - disc) / 2.0, guard_eps);

    FitResult result;
    if (plus.sse <= minus.sse) {
        result.params = plus.params;
        result.sse = plus.sse;
        result.root_used = FitRoot::plus;
        result.guarded = plus.guarded;
    } else {
        result.params = minus.params;
        result.sse = minus.sse;
        result.root_used = FitRoot::minus;
        result.guarded = minus.guarded;
    }
    return result;
}

} // namespace migsim
