#pragma once

// Power-constrained spacing design.
//
// On the constraint circle d1^2 + d2^2 = rho^2 we write
//     d1 = rho sqrt(0.5 - t),  d2 = rho sqrt(0.5 + t),  t in (-0.5, 0.5),
// which removes the Lagrange multiplier. Stationarity of mu(d1) + q^2 mu(d2)
// then reads
//     sum_m w_m / (d1 (1 + (theta_m d1)^2)) = q^2 sum_m w_m / (d2 (1 + (theta_m d2)^2)),
// theta_m = (2m-1)/gamma, with exact weights w_m = alpha_m (2m-1). For large K
// the weights are replaced by (2m-1)^2 > 0; the resulting scalar function G(t)
// is strictly increasing and has a single root t* in (0, 0.5).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "summation.hpp"

namespace otac {

/// Average power P and the matching radius rho = sqrt(6P/(Q-1)).
class PowerBudget {
public:
    PowerBudget(double P, std::int64_t Q) : P_(P) {
        if (!(P > 0.0) || !std::isfinite(P)) throw DomainError("power must be positive and finite");
        if (Q < 2) throw DomainError("Q must be >= 2");
        rho_ = std::sqrt(6.0 * P / static_cast<double>(Q - 1));
    }

    double P() const noexcept { return P_; }
    double rho() const noexcept { return rho_; }

private:
    double P_;
    double rho_;
};

enum class OptimizationMethod { theorem_root, exact_scan };

inline const char* to_string(OptimizationMethod m) noexcept {
    return m == OptimizationMethod::theorem_root ? "theorem_root" : "exact_scan";
}

struct OptimizationResult {
    double t_star = 0.0;
    double d1_star = 0.0;
    double d2_star = 0.0;
    double g_residual = 0.0;
    double kkt_residual = 0.0;
    OptimizationMethod method = OptimizationMethod::theorem_root;
    /// False when the scan found no interior local minimum and fell back to
    /// the best grid point (possibly a degenerate end of the circle).
    bool interior = true;
};

/// Denominator of G. theta_squared follows from substituting d = rho sqrt(0.5 -+ t)
/// into the stationarity condition; theta_linear reproduces the typeset variant
/// (1 + theta rho^2 (0.5 - t)) and exists only for comparison.
enum class GForm { theta_squared, theta_linear };

/// Weights in the stationarity sums.
enum class KktWeights { exact, large_k };

/// Interior margin kept from t = +-0.5.
inline constexpr double t_margin = 1e-12;

inline double spacing_low(double rho, double t) { return rho * std::sqrt(0.5 - t); }
inline double spacing_high(double rho, double t) { return rho * std::sqrt(0.5 + t); }

namespace detail {

inline void check_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " must be positive and finite");
}

} // namespace detail

inline double g_function(double t, int q, std::int64_t N, double gamma, double rho,
                         GForm form = GForm::theta_squared) {
    if (!(t > -0.5 && t < 0.5)) throw DomainError("g_function: t must lie in (-0.5, 0.5)");
    if (q < 1) throw DomainError("g_function: q must be >= 1");
    if (N < 2) throw DomainError("g_function: N must be >= 2");
    detail::check_positive(gamma, "gamma");
    detail::check_positive(rho, "rho");

    const double lo = 0.5 - t;
    const double hi = 0.5 + t;
    const double rho2 = rho * rho;
    const double q2 = static_cast<double>(q) * q;
    CompensatedSum first;
    CompensatedSum second;
    for (std::int64_t m = 1; m < N; ++m) {
        const double theta = (2.0 * static_cast<double>(m) - 1.0) / gamma;
        const double theta2 = theta * theta;
        const double slope = form == GForm::theta_squared ? theta2 : theta;
        first += theta2 / (std::sqrt(lo) * (1.0 + slope * rho2 * lo));
        second += q2 * theta2 / (std::sqrt(hi) * (1.0 + slope * rho2 * hi));
    }
    return first.value() - second.value();
}

struct KktSides {
    double lhs = 0.0;
    double rhs = 0.0;

    double residual() const noexcept { return lhs - rhs; }
};

inline KktSides kkt_sides(double d1, double d2, int q, std::int64_t N, double gamma,
                          KktWeights weights = KktWeights::exact) {
    detail::check_positive(d1, "d1");
    detail::check_positive(d2, "d2");
    detail::check_positive(gamma, "gamma");
    if (N < 2) throw DomainError("kkt: N must be >= 2");
    const auto coeffs = coefficients_for(N);
    const double q2 = static_cast<double>(q) * q;
    CompensatedSum lhs;
    CompensatedSum rhs;
    for (std::int64_t m = 1; m < N; ++m) {
        const double odd = 2.0 * static_cast<double>(m) - 1.0;
        const double w = weights == KktWeights::exact ? coeffs->alpha(m) * odd : odd * odd;
        const double theta = odd / gamma;
        lhs += w / (d1 * (1.0 + theta * theta * d1 * d1));
        rhs += q2 * w / (d2 * (1.0 + theta * theta * d2 * d2));
    }
    return {lhs.value(), rhs.value()};
}

/// LHS - RHS of the exact stationarity condition.
inline double kkt_residual(double d1, double d2, int q, std::int64_t N, double gamma) {
    return kkt_sides(d1, d2, q, N, gamma).residual();
}

/// Bisection for the positive root of G (large-K weights).
inline OptimizationResult solve_t_star(int q, std::int64_t N, double gamma, double rho, double tol) {
    if (q < 2) throw DomainError("solve_t_star: q must be >= 2");
    if (N < 2) throw DomainError("solve_t_star: N must be >= 2");
    detail::check_positive(tol, "tol");

    double lo = 0.0;
    double hi = 0.5 - t_margin;
    double g_lo = g_function(lo, q, N, gamma, rho);
    const double g_hi = g_function(hi, q, N, gamma, rho);
    if (!(g_lo < 0.0 && g_hi > 0.0))
        throw DegenerateConfiguration("G has no sign change on (0, 0.5)");

    double t = 0.5 * (lo + hi);
    double g = g_function(t, q, N, gamma, rho);
    while (std::abs(g) > tol && hi - lo > 1e-14) {
        if ((g < 0.0) == (g_lo < 0.0)) {
            lo = t;
            g_lo = g;
        } else {
            hi = t;
        }
        t = 0.5 * (lo + hi);
        g = g_function(t, q, N, gamma, rho);
    }

    OptimizationResult r;
    r.t_star = t;
    r.d1_star = spacing_low(rho, t);
    r.d2_star = spacing_high(rho, t);
    r.g_residual = g;
    r.kkt_residual = kkt_residual(r.d1_star, r.d2_star, q, N, gamma);
    r.method = OptimizationMethod::theorem_root;
    return r;
}

namespace detail {

// mu(d1) + quad_weight * mu(d2) along the constraint circle.
inline double circle_objective(double t, double quad_weight, double gamma, double rho,
                               const MseCoefficients& coeffs) {
    return mu(spacing_low(rho, t), gamma, coeffs) + quad_weight * mu(spacing_high(rho, t), gamma, coeffs);
}

struct ScanOutcome {
    double t = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    bool interior = true;
};

// Uniform grid over t, then golden-section around the lowest interior local
// minimum. Near t = +-0.5 one spacing collapses and mu(d -> 0) tends to
// sum(alpha), which can undercut every interior value; those ends are not
// stationary points and are only returned when no interior minimum exists.
inline ScanOutcome scan_minimize(double quad_weight, double gamma, double rho, const MseCoefficients& coeffs,
                                 int grid_points) {
    if (grid_points < 100) throw DomainError("exact_scan: grid_points must be >= 100");
    const double t_min = -0.5 + t_margin;
    const double t_max = 0.5 - t_margin;
    const double step = (t_max - t_min) / (grid_points - 1);
    auto node = [&](int i) { return i == grid_points - 1 ? t_max : t_min + step * i; };

    std::vector<double> values(static_cast<std::size_t>(grid_points));
    for (int i = 0; i < grid_points; ++i)
        values[static_cast<std::size_t>(i)] = circle_objective(node(i), quad_weight, gamma, rho, coeffs);

    int best = -1;
    double best_val = std::numeric_limits<double>::infinity();
    for (int i = 1; i + 1 < grid_points; ++i) {
        const double v = values[static_cast<std::size_t>(i)];
        if (v <= values[static_cast<std::size_t>(i - 1)] && v <= values[static_cast<std::size_t>(i + 1)] &&
            v < best_val) {
            best_val = v;
            best = i;
        }
    }
    const bool interior = best >= 0;
    if (!interior) {
        const auto it = std::min_element(values.begin(), values.end());
        best = static_cast<int>(it - values.begin());
        best_val = *it;
    }

    double a = node(std::max(best - 1, 0));
    double b = node(std::min(best + 1, grid_points - 1));
    const double bracket_lo = a;
    const double bracket_hi = b;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = circle_objective(c, quad_weight, gamma, rho, coeffs);
    double fd = circle_objective(d, quad_weight, gamma, rho, coeffs);
    while (b - a > 1e-10) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = circle_objective(c, quad_weight, gamma, rho, coeffs);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = circle_objective(d, quad_weight, gamma, rho, coeffs);
        }
    }
    double t = 0.5 * (a + b);
    // Golden-section cannot be trusted past ~sqrt(eps) here; keep the better endpoint
    // value if the midpoint got worse.
    if (circle_objective(t, quad_weight, gamma, rho, coeffs) > best_val) t = node(best);
    return {t, bracket_lo, bracket_hi, interior};
}

} // namespace detail

/// Direct minimization of the exact closed-form objective over the constraint circle.
inline OptimizationResult exact_scan(int q, int K, double gamma, double rho, int grid_points) {
    const ConstellationParams shape(q, K, 1.0, 1.0);
    detail::check_positive(gamma, "gamma");
    detail::check_positive(rho, "rho");
    const auto N = shape.N();
    const auto coeffs = coefficients_for(N);
    const double q2 = static_cast<double>(shape.Q());

    const auto scan = detail::scan_minimize(q2, gamma, rho, *coeffs, grid_points);
    double t = scan.t;

    // The t-derivative of the objective is a positive multiple of the exact
    // stationarity residual, so bisecting the residual sharpens the minimizer
    // beyond what function comparisons can resolve.
    auto residual_at = [&](double s) {
        return kkt_residual(spacing_low(rho, s), spacing_high(rho, s), q, N, gamma);
    };
    double lo = scan.bracket_lo;
    double hi = scan.bracket_hi;
    const double r_lo = residual_at(lo);
    const double r_hi = residual_at(hi);
    if (r_lo < 0.0 && r_hi > 0.0) {
        while (hi - lo > 1e-15) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (residual_at(mid) < 0.0)
                lo = mid;
            else
                hi = mid;
        }
        const double polished = 0.5 * (lo + hi);
        if (detail::circle_objective(polished, q2, gamma, rho, *coeffs) <=
            detail::circle_objective(t, q2, gamma, rho, *coeffs))
            t = polished;
    }

    OptimizationResult r;
    r.t_star = t;
    r.d1_star = spacing_low(rho, t);
    r.d2_star = spacing_high(rho, t);
    r.g_residual = g_function(t, q, N, gamma, rho);
    r.kkt_residual = residual_at(t);
    r.method = OptimizationMethod::exact_scan;
    r.interior = scan.interior;
    return r;
}

/// Number of strict sign changes of G over the given t values.
inline int count_sign_changes(int q, std::int64_t N, double gamma, double rho, std::span<const double> ts) {
    int changes = 0;
    int prev_sign = 0;
    for (double t : ts) {
        const double g = g_function(t, q, N, gamma, rho);
        const int s = (g > 0.0) - (g < 0.0);
        if (s == 0) continue;
        if (prev_sign != 0 && s != prev_sign) ++changes;
        prev_sign = s;
    }
    return changes;
}

/// True iff G is strictly increasing over the given increasing t values.
inline bool g_is_increasing(int q, std::int64_t N, double gamma, double rho, std::span<const double> ts) {
    double prev = -std::numeric_limits<double>::infinity();
    for (double t : ts) {
        const double g = g_function(t, q, N, gamma, rho);
        if (!(g > prev)) return false;
        prev = g;
    }
    return true;
}

/// Evenly spaced interior points of (0, 0.5).
inline std::vector<double> interior_points(int samples) {
    std::vector<double> ts;
    ts.reserve(static_cast<std::size_t>(samples));
    for (int i = 1; i <= samples; ++i) ts.push_back(0.5 * i / (samples + 1.0));
    return ts;
}

inline bool g_monotonicity_check(int q, std::int64_t N, double gamma, double rho, int samples) {
    if (samples < 10) throw DomainError("g_monotonicity_check: samples must be >= 10");
    const auto ts = interior_points(samples);
    return g_is_increasing(q, N, gamma, rho, ts);
}

} // namespace otac
