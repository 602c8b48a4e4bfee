#pragma once

// Monte-Carlo estimate of E|f - f_hat|^2 for the full chain
//     symbols -> encode -> superimpose -> + Cauchy noise -> decode -> estimate.
//
// Trial i draws everything from CounterRng(seed, i): symbols first, then the
// in-phase and quadrature noise components. Squared errors are integers and
// are accumulated exactly, so results do not depend on the worker count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "noise.hpp"
#include "optimizer.hpp"
#include "rng.hpp"

namespace otac {

enum class SymbolMode {
    per_node_uniform, ///< K i.i.d. uniform symbols on [0, Q-1]
    uniform_grid,     ///< one superimposed grid point uniform on [0, N-1]^2
};

struct McConfig {
    ConstellationParams params;
    NoiseModel model;
    std::int64_t trials = 1;
    std::uint64_t seed = 0;
    SymbolMode symbol_mode = SymbolMode::per_node_uniform;
};

struct McResult {
    double mse = 0.0;
    double std_error = 0.0;
    std::int64_t trials = 0;
    double max_abs_error = 0.0;
};

/// Signed error f - f_hat of one trial.
inline std::int64_t trial_error(const McConfig& cfg, std::int64_t trial_index) {
    const auto& p = cfg.params;
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(trial_index));

    std::int64_t digits_re = 0;
    std::int64_t digits_im = 0;
    std::int64_t f = 0;
    if (cfg.symbol_mode == SymbolMode::per_node_uniform) {
        const auto Q = static_cast<std::uint64_t>(p.Q());
        for (int k = 0; k < p.K(); ++k) {
            const auto s = static_cast<std::int64_t>(uniform_index(rng, Q));
            digits_re += s % p.q();
            digits_im += s / p.q();
            f += s;
        }
    } else {
        const auto N = static_cast<std::uint64_t>(p.N());
        digits_re = static_cast<std::int64_t>(uniform_index(rng, N));
        digits_im = static_cast<std::int64_t>(uniform_index(rng, N));
        f = digits_re + std::int64_t{p.q()} * digits_im;
    }

    const ComplexSample clean{static_cast<double>(digits_re) * p.d1(), static_cast<double>(digits_im) * p.d2()};
    const ComplexSample received = clean + sample(cfg.model, rng);
    return f - estimate_sum(decode(received, p), p);
}

/// Squared error (f - f_hat)^2 of one trial.
inline double run_trial(const McConfig& cfg, std::int64_t trial_index) {
    if (trial_index < 0 || trial_index >= cfg.trials) throw DomainError("trial index out of range");
    const auto e = trial_error(cfg, trial_index);
    return static_cast<double>(e * e);
}

namespace detail {

struct ErrorTally {
    std::int64_t count = 0;
    unsigned __int128 sum = 0;    // sum of e^2
    unsigned __int128 sum_sq = 0; // sum of e^4
    std::int64_t max_abs = 0;

    void add(std::int64_t e) noexcept {
        const auto e2 = static_cast<unsigned __int128>(e * e);
        ++count;
        sum += e2;
        sum_sq += e2 * e2;
        max_abs = std::max(max_abs, e < 0 ? -e : e);
    }

    void merge(const ErrorTally& o) noexcept {
        count += o.count;
        sum += o.sum;
        sum_sq += o.sum_sq;
        max_abs = std::max(max_abs, o.max_abs);
    }
};

inline constexpr std::int64_t chunk_trials = 4096;

} // namespace detail

/// Mean and plug-in standard error of the squared error over all trials.
///
/// workers = 0 uses the hardware concurrency. The result is identical for
/// every worker count.
inline McResult run_monte_carlo(const McConfig& cfg, unsigned workers = 1) {
    if (cfg.trials < 1) throw DomainError("trials must be >= 1");
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());

    const std::int64_t chunks = (cfg.trials + detail::chunk_trials - 1) / detail::chunk_trials;
    workers = static_cast<unsigned>(std::min<std::int64_t>(workers, chunks));
    std::vector<detail::ErrorTally> tallies(workers);
    std::atomic<std::int64_t> next{0};

    auto work = [&](unsigned w) {
        auto& tally = tallies[w];
        for (;;) {
            const std::int64_t c = next.fetch_add(1, std::memory_order_relaxed);
            if (c >= chunks) break;
            const std::int64_t begin = c * detail::chunk_trials;
            const std::int64_t end = std::min(cfg.trials, begin + detail::chunk_trials);
            for (std::int64_t i = begin; i < end; ++i) tally.add(trial_error(cfg, i));
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }

    detail::ErrorTally total;
    for (const auto& t : tallies) total.merge(t);

    const auto n = static_cast<long double>(total.count);
    const auto mean = static_cast<long double>(total.sum) / n;
    const auto second = static_cast<long double>(total.sum_sq) / n;
    const long double var = std::max<long double>(0.0L, second - mean * mean);

    McResult r;
    r.trials = total.count;
    r.mse = static_cast<double>(mean);
    r.std_error = total.count > 1 ? static_cast<double>(std::sqrt(var / n)) : 0.0;
    r.max_abs_error = static_cast<double>(total.max_abs);
    return r;
}

// ---------------------------------------------------------------------------
// SNR sweeps

enum class Design { optimized, equal };

/// Equal-spacing reference: power_matched puts d1 = d2 = rho/sqrt(2), so the
/// average power is exactly P; caption uses d1 = d2 = sqrt(6P/(Q-1)) = rho,
/// which spends 2P.
enum class Baseline { power_matched, caption };

struct SweepRecord {
    double xi_db = 0.0;
    double mse_opt = 0.0;
    double mse_eq = 0.0;
    double se_opt = 0.0;
    double se_eq = 0.0;
};

/// gamma such that 10 log10(P / gamma) = snr_db.
inline double gamma_from_snr_db(double snr_db, double P) { return P / std::pow(10.0, snr_db / 10.0); }

inline double equal_spacing(const PowerBudget& budget, Baseline baseline) {
    return baseline == Baseline::power_matched ? budget.rho() / std::sqrt(2.0) : budget.rho();
}

/// Bisection tolerance used for the optimized design in sweeps.
inline constexpr double design_tolerance = 1e-12;

/// Optimized spacing for one operating point.
inline OptimizationResult optimized_design(int q, int K, double gamma, const PowerBudget& budget) {
    const ConstellationParams shape(q, K, 1.0, 1.0);
    return solve_t_star(q, shape.N(), gamma, budget.rho(), design_tolerance);
}

struct SweepOptions {
    std::vector<Design> designs{Design::optimized, Design::equal};
    Baseline baseline = Baseline::power_matched;
    unsigned workers = 1;
};

/// One record per SNR point; both designs share the seed, so they see common
/// random numbers. Designs not requested are reported as zero.
inline std::vector<SweepRecord> sweep_snr(const McConfig& base, const PowerBudget& budget,
                                          const std::vector<double>& snr_db_list, const SweepOptions& opts = {}) {
    const auto& shape = base.params;
    const bool want_opt = std::find(opts.designs.begin(), opts.designs.end(), Design::optimized) != opts.designs.end();
    const bool want_eq = std::find(opts.designs.begin(), opts.designs.end(), Design::equal) != opts.designs.end();

    std::vector<SweepRecord> out;
    out.reserve(snr_db_list.size());
    for (double snr : snr_db_list) {
        if (!std::isfinite(snr)) throw DomainError("SNR values must be finite");
        const NoiseModel model(gamma_from_snr_db(snr, budget.P()));
        SweepRecord rec;
        rec.xi_db = snr;
        if (want_opt) {
            const auto design = optimized_design(shape.q(), shape.K(), model.gamma(), budget);
            McConfig cfg{shape.with_spacing(design.d1_star, design.d2_star), model, base.trials, base.seed,
                         base.symbol_mode};
            const auto r = run_monte_carlo(cfg, opts.workers);
            rec.mse_opt = r.mse;
            rec.se_opt = r.std_error;
        }
        if (want_eq) {
            const double d = equal_spacing(budget, opts.baseline);
            McConfig cfg{shape.with_spacing(d, d), model, base.trials, base.seed, base.symbol_mode};
            const auto r = run_monte_carlo(cfg, opts.workers);
            rec.mse_eq = r.mse;
            rec.se_eq = r.std_error;
        }
        out.push_back(rec);
    }
    return out;
}

/// SNR grid start, start+step, ... not exceeding stop (with a small slack for
/// rounding). A step larger than the range yields just the start point.
inline std::vector<double> snr_grid(double start, double stop, double step) {
    if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step))
        throw DomainError("SNR grid bounds must be finite");
    if (!(step > 0.0)) throw DomainError("SNR step must be positive");
    if (stop < start) throw DomainError("SNR stop must not be below start");
    std::vector<double> grid;
    const auto count = static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    grid.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) grid.push_back(start + static_cast<double>(i) * step);
    return grid;
}

} // namespace otac
