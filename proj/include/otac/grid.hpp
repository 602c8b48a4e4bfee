#pragma once

// Transmit-side encoder and receiver-side grid geometry for sum computation
// over a multiple-access channel.
//
// Each node maps its integer s in [0, q^2) to the point
//     (s mod q) * d1 + floor(s / q) * d2 * i
// so that channel superposition adds the base-q digits of the inputs. The
// receiver sees a square N x N grid, N = K(q-1)+1, and recovers the sum from
// the nearest grid point.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>

#include "errors.hpp"

namespace otac {

struct ComplexSample {
    double re = 0.0;
    double im = 0.0;

    friend bool operator==(const ComplexSample&, const ComplexSample&) = default;
};

inline ComplexSample operator+(ComplexSample a, ComplexSample b) noexcept {
    return {a.re + b.re, a.im + b.im};
}

inline bool is_finite(ComplexSample z) noexcept {
    return std::isfinite(z.re) && std::isfinite(z.im);
}

/// Index pair on the superimposed grid; a on the in-phase axis, b on quadrature.
struct GridPoint {
    std::int64_t a = 0;
    std::int64_t b = 0;

    friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

/// Geometry of the per-node q x q constellation and the K-fold superimposed grid.
class ConstellationParams {
public:
    ConstellationParams(int q, int K, double d1, double d2) : q_(q), K_(K), d1_(d1), d2_(d2) {
        if (q < 2) throw DomainError("q must be >= 2 (q = " + std::to_string(q) + ")");
        if (K < 1) throw DomainError("K must be >= 1 (K = " + std::to_string(K) + ")");
        if (!(d1 > 0.0) || !std::isfinite(d1)) throw DomainError("d1 must be positive and finite");
        if (!(d2 > 0.0) || !std::isfinite(d2)) throw DomainError("d2 must be positive and finite");
    }

    int q() const noexcept { return q_; }
    int K() const noexcept { return K_; }
    double d1() const noexcept { return d1_; }
    double d2() const noexcept { return d2_; }

    /// Alphabet size per node.
    std::int64_t Q() const noexcept { return std::int64_t{q_} * q_; }
    /// Superimposed points per axis.
    std::int64_t N() const noexcept { return std::int64_t{K_} * (q_ - 1) + 1; }

    ConstellationParams with_spacing(double d1, double d2) const { return {q_, K_, d1, d2}; }

private:
    int q_;
    int K_;
    double d1_;
    double d2_;
};

inline ComplexSample encode(std::int64_t s, const ConstellationParams& p) {
    if (s < 0 || s >= p.Q())
        throw DomainError("symbol " + std::to_string(s) + " outside [0, " + std::to_string(p.Q() - 1) + "]");
    const auto row = s / p.q();
    const auto col = s - p.q() * row;
    return {static_cast<double>(col) * p.d1(), static_cast<double>(row) * p.d2()};
}

/// Power accounting used for the design constraint, (Q-1)(d1^2 + d2^2)/6.
///
/// This is twice centered_symbol_energy. It coincides with the raw mean
/// symbol energy of the encoder only for q = 2.
inline double average_power(const ConstellationParams& p) noexcept {
    return static_cast<double>(p.Q() - 1) * (p.d1() * p.d1() + p.d2() * p.d2()) / 6.0;
}

/// Mean |encode(s)|^2 over equiprobable s, digits in [0, q-1] on both axes.
inline double mean_symbol_energy(const ConstellationParams& p) noexcept {
    const double q = p.q();
    return (q - 1.0) * (2.0 * q - 1.0) / 6.0 * (p.d1() * p.d1() + p.d2() * p.d2());
}

/// Mean energy after removing the constellation's centroid.
inline double centered_symbol_energy(const ConstellationParams& p) noexcept {
    return static_cast<double>(p.Q() - 1) * (p.d1() * p.d1() + p.d2() * p.d2()) / 12.0;
}

/// Noiseless channel output: the sum of all node encodings.
inline ComplexSample superimpose(std::span<const std::int64_t> symbols, const ConstellationParams& p) {
    if (symbols.size() != static_cast<std::size_t>(p.K()))
        throw DomainError("expected " + std::to_string(p.K()) + " symbols, got " +
                          std::to_string(symbols.size()));
    std::int64_t digits_re = 0;
    std::int64_t digits_im = 0;
    for (auto s : symbols) {
        if (s < 0 || s >= p.Q()) throw DomainError("symbol " + std::to_string(s) + " out of range");
        digits_re += s % p.q();
        digits_im += s / p.q();
    }
    // Digit sums are exact integers; scaling once keeps the result exactly on the grid.
    return {static_cast<double>(digits_re) * p.d1(), static_cast<double>(digits_im) * p.d2()};
}

namespace detail {

// Nearest index on a 0..n-1 lattice with the given spacing; std::round breaks
// ties away from zero. Clamping happens in floating point so that huge noise
// samples never overflow the integer conversion.
inline std::int64_t nearest_clamped(double value, double spacing, std::int64_t n) noexcept {
    const double idx = std::round(value / spacing);
    return static_cast<std::int64_t>(std::clamp(idx, 0.0, static_cast<double>(n - 1)));
}

} // namespace detail

/// Maximum-likelihood grid point under componentwise Cauchy noise.
///
/// The Cauchy density is a decreasing function of |r - y| and the grid is a
/// product of two lattices, so the ML point is obtained by rounding each axis
/// independently and clamping to the valid index range.
inline GridPoint decode(ComplexSample r, const ConstellationParams& p) {
    if (!is_finite(r)) throw DomainError("received sample is not finite");
    return {detail::nearest_clamped(r.re, p.d1(), p.N()), detail::nearest_clamped(r.im, p.d2(), p.N())};
}

/// Maps a grid point back to the integer sum, f = a + q*b.
inline std::int64_t estimate_sum(GridPoint g, const ConstellationParams& p) noexcept {
    return g.a + std::int64_t{p.q()} * g.b;
}

} // namespace otac
