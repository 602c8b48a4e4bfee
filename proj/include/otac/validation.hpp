#pragma once

// Cross-module self-check suite behind `otac validate`.
//
// Every check reports a measured value against a tolerance. The closed-form
// checks compare against references computed along a different route
// (enumeration, Monte Carlo), so a corrupted coefficient table is caught.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "grid.hpp"
#include "noise.hpp"
#include "optimizer.hpp"
#include "rng.hpp"
#include "simulator.hpp"

namespace otac::validation {

struct CheckResult {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string detail;
};

struct Budget {
    std::int64_t mc_trials = 1'000'000;
    std::int64_t sampler_draws = 1'000'000;
    int monotonicity_samples = 10'000;
    double sigma_multiplier = 3.0;
    double sampler_quartile_tol = 0.02;
    double sampler_median_tol = 0.01;

    static Budget quick() {
        Budget b;
        b.mc_trials = 100'000;
        b.sampler_draws = 200'000;
        b.monotonicity_samples = 1'000;
        b.sigma_multiplier = 4.0;
        b.sampler_quartile_tol = 0.04;
        b.sampler_median_tol = 0.02;
        return b;
    }
};

struct Options {
    Budget budget{};
    bool corrupt_alpha = false;
    unsigned workers = 1;
    std::uint64_t seed = 1;
};

namespace detail {

inline double cauchy_tail(double u, double gamma) { return 0.5 - std::atan(u / gamma) / std::numbers::pi; }

// Squared-error mean of the error model the closed form describes, summed over
// offsets k with probability (N-k)/N [T(2k-1) - T(2k+1)] and T(2N-3)/N for the
// largest offset, T(c) = P(z > c x).
inline double lemma_model_axis_mse(double x, double gamma, std::int64_t N) {
    const double n = static_cast<double>(N);
    auto tail = [&](std::int64_t k) { return cauchy_tail((2.0 * static_cast<double>(k) - 1.0) * x, gamma); };
    long double acc = 0.0L;
    for (std::int64_t k = 1; k < N; ++k) {
        const double kd = static_cast<double>(k);
        const double p = k < N - 1 ? (n - kd) / n * (tail(k) - tail(k + 1)) : tail(k) / n;
        acc += 2.0L * kd * kd * p;
    }
    return static_cast<double>(acc);
}

inline MseCoefficients corrupted(std::int64_t N) {
    const auto base = coefficients_for(N);
    std::vector<double> alpha(base->alpha().begin(), base->alpha().end());
    for (auto& a : alpha) a *= 1.05;
    return MseCoefficients(N, std::move(alpha));
}

inline MseCoefficients coefficients(std::int64_t N, bool corrupt) {
    return corrupt ? corrupted(N) : MseCoefficients(N);
}

} // namespace detail

inline CheckResult check_closed_form_vs_enumeration(const Options& opt) {
    double worst = 0.0;
    for (std::int64_t N = 2; N <= 9; ++N) {
        const auto coeffs = detail::coefficients(N, opt.corrupt_alpha);
        for (double x : {0.05, 0.4, 1.0, 6.0})
            for (double g : {0.01, 0.5, 2.0})
                worst = std::max(worst, std::abs(mu(x, g, coeffs) - detail::lemma_model_axis_mse(x, g, N)));
    }
    const double tol = 1e-9;
    return {"closed_form_vs_enumeration", worst, tol, worst <= tol, "max |mu - enumerated error model|, N<=9"};
}

inline CheckResult check_closed_form_vs_mc(const Options& opt) {
    // Monte Carlo of the same error model on a 3-point axis.
    const std::int64_t N = 3;
    const double x = 1.0;
    const NoiseModel model(1.0);
    const auto n = opt.budget.mc_trials;
    long double sum = 0.0L, sum_sq = 0.0L;
    for (std::int64_t i = 0; i < n; ++i) {
        CounterRng rng(opt.seed ^ 0x5eedULL, static_cast<std::uint64_t>(i));
        const auto a = static_cast<std::int64_t>(uniform_index(rng, N));
        const auto k = static_cast<std::int64_t>(std::round(sample_component(model, rng) / (2.0 * x)));
        std::int64_t e = 0;
        if (a + k >= 0 && a + k <= N - 1)
            e = k;
        else if (a == 0 && k > 0)
            e = N - 1;
        else if (a == N - 1 && k < 0)
            e = -(N - 1);
        const auto e2 = static_cast<long double>(e * e);
        sum += e2;
        sum_sq += e2 * e2;
    }
    const double mean = static_cast<double>(sum / n);
    const double se = std::sqrt(std::max(0.0, static_cast<double>(sum_sq / n) - mean * mean) / static_cast<double>(n));
    const double closed = mu(x, model.gamma(), detail::coefficients(N, opt.corrupt_alpha));
    const double z = se > 0 ? std::abs(closed - mean) / se : 0.0;
    return {"closed_form_vs_mc", z, opt.budget.sigma_multiplier, z <= opt.budget.sigma_multiplier,
            "|mu - MC| in standard errors, N=3, x=gamma=1"};
}

inline CheckResult check_exact_form_vs_simulator(const Options& opt, double* lemma_ratio = nullptr) {
    const PowerBudget budget(1.0, 16);
    const double d = budget.rho() / std::sqrt(2.0);
    const McConfig cfg{ConstellationParams(4, 10, d, d), NoiseModel(gamma_from_snr_db(10.0, 1.0)),
                       opt.budget.mc_trials, opt.seed, SymbolMode::uniform_grid};
    const auto r = run_monte_carlo(cfg, opt.workers);
    const double exact = exact_uniform_grid_mse(cfg.params, cfg.model);
    if (lemma_ratio) {
        const auto coeffs = detail::coefficients(cfg.params.N(), opt.corrupt_alpha);
        *lemma_ratio = closed_form_mse(cfg.params, cfg.model, coeffs) / r.mse;
    }
    const double z = std::abs(exact - r.mse) / r.std_error;
    return {"exact_clamped_vs_simulator", z, opt.budget.sigma_multiplier, z <= opt.budget.sigma_multiplier,
            "uniform-grid MC vs exact clamped MSE, K=10 q=4 10 dB, in standard errors"};
}

struct DesignPoint {
    int q;
    int K;
    double snr_db;
};

inline std::vector<DesignPoint> design_grid() {
    std::vector<DesignPoint> out;
    for (int q : {2, 4, 8})
        for (int K : {2, 10, 100})
            for (double db : {0.0, 10.0, 20.0}) out.push_back({q, K, db});
    return out;
}

inline CheckResult check_g_monotonicity(const Options& opt) {
    int failures = 0;
    for (const auto& p : design_grid()) {
        const ConstellationParams shape(p.q, p.K, 1.0, 1.0);
        const PowerBudget budget(1.0, shape.Q());
        failures += !g_monotonicity_check(p.q, shape.N(), gamma_from_snr_db(p.snr_db, 1.0), budget.rho(),
                                          opt.budget.monotonicity_samples);
    }
    return {"g_monotonicity", static_cast<double>(failures), 0.0, failures == 0,
            "configs where G is not strictly increasing on (0, 0.5)"};
}

inline CheckResult check_unique_root(const Options& opt) {
    const auto ts = interior_points(opt.budget.monotonicity_samples);
    int worst = 1;
    for (const auto& p : design_grid()) {
        const ConstellationParams shape(p.q, p.K, 1.0, 1.0);
        const PowerBudget budget(1.0, shape.Q());
        const int changes = count_sign_changes(p.q, shape.N(), gamma_from_snr_db(p.snr_db, 1.0), budget.rho(), ts);
        if (changes != 1) worst = changes;
    }
    return {"g_single_sign_change", static_cast<double>(worst), 1.0, worst == 1, "sign changes of G on (0, 0.5)"};
}

inline CheckResult check_theorem_vs_scan(const Options& opt) {
    double worst = 0.0;
    for (int q : {4, 8}) {
        for (double db : {0.0, 10.0, 20.0}) {
            const ConstellationParams shape(q, 100, 1.0, 1.0);
            const PowerBudget budget(1.0, shape.Q());
            const double gamma = gamma_from_snr_db(db, 1.0);
            const auto root = solve_t_star(q, shape.N(), gamma, budget.rho(), design_tolerance);
            const auto scan = exact_scan(q, 100, gamma, budget.rho(), 1001);
            const auto coeffs = detail::coefficients(shape.N(), opt.corrupt_alpha);
            const NoiseModel model(gamma);
            const double j_root = closed_form_mse(shape.with_spacing(root.d1_star, root.d2_star), model, coeffs);
            const double j_scan = closed_form_mse(shape.with_spacing(scan.d1_star, scan.d2_star), model, coeffs);
            worst = std::max(worst, j_root / j_scan - 1.0);
        }
    }
    return {"theorem_root_excess", worst, 0.05, worst <= 0.05, "relative MSE excess of theorem root over exact scan, K=100"};
}

inline CheckResult check_kkt_at_scan(const Options&) {
    double worst = 0.0;
    int boundary = 0;
    for (const auto& p : design_grid()) {
        const ConstellationParams shape(p.q, p.K, 1.0, 1.0);
        const PowerBudget budget(1.0, shape.Q());
        const double gamma = gamma_from_snr_db(p.snr_db, 1.0);
        const auto scan = exact_scan(p.q, p.K, gamma, budget.rho(), 1001);
        if (!scan.interior) {
            ++boundary;
            continue;
        }
        const auto sides = kkt_sides(scan.d1_star, scan.d2_star, p.q, shape.N(), gamma);
        worst = std::max(worst, std::abs(sides.residual()) / std::max(std::abs(sides.lhs), std::abs(sides.rhs)));
    }
    return {"kkt_residual_at_scan", worst, 1e-6, worst <= 1e-6,
            "relative stationarity residual at interior minimizers (" + std::to_string(boundary) +
                " boundary-only configs skipped)"};
}

inline CheckResult check_sampler(const Options& opt) {
    const double gamma = 1.7;
    const NoiseModel model(gamma);
    std::vector<double> v(static_cast<std::size_t>(opt.budget.sampler_draws));
    CounterRng rng(opt.seed, 0xC0FFEE);
    for (auto& x : v) x = sample_component(model, rng);
    auto quantile = [&](double p) {
        const auto k = static_cast<std::ptrdiff_t>(p * static_cast<double>(v.size() - 1));
        std::nth_element(v.begin(), v.begin() + k, v.end());
        return v[static_cast<std::size_t>(k)];
    };
    const double median_err = std::abs(quantile(0.5)) / gamma;
    const double q1_err = std::abs(quantile(0.25) + gamma) / gamma;
    const double q3_err = std::abs(quantile(0.75) - gamma) / gamma;
    const double worst_quartile = std::max(q1_err, q3_err);
    const bool ok = median_err <= opt.budget.sampler_median_tol && worst_quartile <= opt.budget.sampler_quartile_tol;
    return {"sampler_quartiles", worst_quartile, opt.budget.sampler_quartile_tol, ok,
            "max relative quartile error (median error " + std::to_string(median_err) + " gamma)"};
}

inline CheckResult check_noise_free_roundtrip(const Options& opt) {
    int failures = 0;
    CounterRng rng(opt.seed, 0xABCDEF);
    for (int q : {2, 4, 8}) {
        for (int rep = 0; rep < 1000; ++rep) {
            const int K = 1 + static_cast<int>(uniform_index(rng, 20));
            const ConstellationParams p(q, K, 0.1 + uniform_open01(rng), 0.1 + uniform_open01(rng));
            std::vector<std::int64_t> s(static_cast<std::size_t>(K));
            for (auto& x : s) x = static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(p.Q())));
            const auto f = std::accumulate(s.begin(), s.end(), std::int64_t{0});
            failures += estimate_sum(decode(superimpose(s, p), p), p) != f;
        }
    }
    return {"noise_free_roundtrip", static_cast<double>(failures), 0.0, failures == 0, "failed recoveries out of 3000"};
}

inline CheckResult check_scheduling(const Options& opt) {
    const McConfig cfg{ConstellationParams(4, 10, 0.3, 0.5), NoiseModel(0.3), 50'000, opt.seed,
                       SymbolMode::per_node_uniform};
    const auto a = run_monte_carlo(cfg, 1);
    const auto b = run_monte_carlo(cfg, 4);
    const auto c = run_monte_carlo(cfg, 16);
    const double diff = std::max(std::abs(a.mse - b.mse), std::abs(a.mse - c.mse));
    return {"scheduling_invariance", diff, 0.0, diff == 0.0 && a.std_error == b.std_error && a.std_error == c.std_error,
            "|mse(workers=1) - mse(workers=4,16)|"};
}

struct Report {
    std::vector<CheckResult> checks;
    double lemma_to_simulator_ratio = 0.0;

    bool all_passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
    }
};

inline Report run_all(const Options& opt) {
    Report rep;
    rep.checks.push_back(check_closed_form_vs_enumeration(opt));
    rep.checks.push_back(check_closed_form_vs_mc(opt));
    rep.checks.push_back(check_exact_form_vs_simulator(opt, &rep.lemma_to_simulator_ratio));
    rep.checks.push_back(check_g_monotonicity(opt));
    rep.checks.push_back(check_unique_root(opt));
    rep.checks.push_back(check_theorem_vs_scan(opt));
    rep.checks.push_back(check_kkt_at_scan(opt));
    rep.checks.push_back(check_sampler(opt));
    rep.checks.push_back(check_noise_free_roundtrip(opt));
    rep.checks.push_back(check_scheduling(opt));
    return rep;
}

} // namespace otac::validation
