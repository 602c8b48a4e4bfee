#pragma once

// Closed-form MSE of the recovered sum.
//
// The quadrature digit carries weight q in f = a + q*b, so the error splits
// into an in-phase term and a q^2-weighted quadrature term:
//     J(d1, d2) = mu(d1) + q^2 mu(d2),
//     mu(x)     = (2/pi) sum_{m=1}^{N-1} alpha_m atan(gamma / ((2m-1) x)),
//     alpha_m   = 2m - 1 + (3m(1-m) - 1) / N.
//
// mu is the analytical large-grid model used for constellation design. The
// exact MSE of the clamped nearest-point decoder with a uniformly drawn grid
// point is provided alongside it as exact_axis_mse; the two differ because mu
// places decision thresholds at odd multiples of x and credits boundary
// pile-up only for the largest error.

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "noise.hpp"
#include "summation.hpp"

namespace otac {

/// alpha_m for m = 1..N-1, stored 0-based. Immutable once built.
class MseCoefficients {
public:
    explicit MseCoefficients(std::int64_t N) : N_(N) {
        if (N < 2) throw DomainError("N must be >= 2 (N = " + std::to_string(N) + ")");
        alpha_.reserve(static_cast<std::size_t>(N - 1));
        const auto n = static_cast<double>(N);
        for (std::int64_t m = 1; m < N; ++m) {
            const auto md = static_cast<double>(m);
            alpha_.push_back(2.0 * md - 1.0 + (3.0 * md * (1.0 - md) - 1.0) / n);
        }
    }

    /// Explicit coefficient list; used to inject faults and by test oracles.
    MseCoefficients(std::int64_t N, std::vector<double> alpha) : N_(N), alpha_(std::move(alpha)) {
        if (N < 2) throw DomainError("N must be >= 2");
        if (alpha_.size() != static_cast<std::size_t>(N - 1))
            throw DomainError("alpha must hold N-1 coefficients");
    }

    std::int64_t N() const noexcept { return N_; }
    std::span<const double> alpha() const noexcept { return alpha_; }
    /// 1-based access, m in [1, N-1].
    double alpha(std::int64_t m) const { return alpha_.at(static_cast<std::size_t>(m - 1)); }

private:
    std::int64_t N_;
    std::vector<double> alpha_;
};

/// Shared coefficient table for N. Entries are built once and never mutated,
/// so concurrent readers need no further synchronization.
inline std::shared_ptr<const MseCoefficients> coefficients_for(std::int64_t N) {
    static std::mutex mutex;
    static std::map<std::int64_t, std::shared_ptr<const MseCoefficients>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[N];
    if (!slot) slot = std::make_shared<const MseCoefficients>(N);
    return slot;
}

inline double mu(double x, double gamma, const MseCoefficients& coeffs) {
    if (!(x > 0.0)) throw DomainError("mu: x must be positive");
    if (!(gamma > 0.0)) throw DomainError("mu: gamma must be positive");
    CompensatedSum acc;
    const auto alpha = coeffs.alpha();
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        const double odd = 2.0 * static_cast<double>(i + 1) - 1.0;
        acc += alpha[i] * std::atan(gamma / (odd * x));
    }
    return 2.0 / std::numbers::pi * acc.value();
}

inline double mu(double x, double gamma, std::int64_t N) { return mu(x, gamma, *coefficients_for(N)); }

/// mu(d1) + q^2 mu(d2) for the params' superimposed grid size.
inline double closed_form_mse(const ConstellationParams& p, const NoiseModel& model) {
    const auto coeffs = coefficients_for(p.N());
    const double q2 = static_cast<double>(p.Q());
    return mu(p.d1(), model.gamma(), *coeffs) + q2 * mu(p.d2(), model.gamma(), *coeffs);
}

/// Same objective with caller-supplied coefficients.
inline double closed_form_mse(const ConstellationParams& p, const NoiseModel& model,
                              const MseCoefficients& coeffs) {
    if (coeffs.N() != p.N()) throw DomainError("coefficient table does not match N");
    const double q2 = static_cast<double>(p.Q());
    return mu(p.d1(), model.gamma(), coeffs) + q2 * mu(p.d2(), model.gamma(), coeffs);
}

/// Exact per-axis squared index error of the clamped nearest-point decoder on
/// an N-point lattice with spacing x, the transmitted index uniform on [0, N-1].
///
/// E[e^2] = sum_k (2k-1) P(|e| >= k); an offset of k is reachable from N-k
/// positions and needs the noise to pass (k - 1/2) x in that direction.
inline double exact_axis_mse(double x, double gamma, std::int64_t N) {
    if (!(x > 0.0)) throw DomainError("exact_axis_mse: x must be positive");
    if (!(gamma > 0.0)) throw DomainError("exact_axis_mse: gamma must be positive");
    if (N < 2) throw DomainError("exact_axis_mse: N must be >= 2");
    CompensatedSum acc;
    const auto n = static_cast<double>(N);
    for (std::int64_t k = 1; k < N; ++k) {
        const double odd = 2.0 * static_cast<double>(k) - 1.0;
        const double weight = odd * (n - static_cast<double>(k)) / n;
        acc += weight * std::atan(2.0 * gamma / (odd * x));
    }
    return 2.0 / std::numbers::pi * acc.value();
}

/// Exact MSE of f for a uniformly drawn superimposed grid point.
inline double exact_uniform_grid_mse(const ConstellationParams& p, const NoiseModel& model) {
    const double q2 = static_cast<double>(p.Q());
    return exact_axis_mse(p.d1(), model.gamma(), p.N()) + q2 * exact_axis_mse(p.d2(), model.gamma(), p.N());
}

} // namespace otac
