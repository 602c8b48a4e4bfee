#pragma once

#include <cmath>
#include <numbers>

#include "errors.hpp"
#include "grid.hpp"
#include "rng.hpp"

namespace otac {

/// Complex Cauchy noise z = z1 + i z2 with z1, z2 i.i.d. Cauchy(0, gamma).
class NoiseModel {
public:
    explicit NoiseModel(double gamma) : gamma_(gamma) {
        if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be positive and finite");
    }

    double gamma() const noexcept { return gamma_; }

private:
    double gamma_;
};

/// Channel transition density g(r | y) = gamma / (pi (gamma^2 + |r - y|^2)).
inline double density(ComplexSample r, ComplexSample y, const NoiseModel& model) noexcept {
    const double g = model.gamma();
    const double dist2 = std::hypot(r.re - y.re, r.im - y.im);
    return g / (std::numbers::pi * (g * g + dist2 * dist2));
}

/// One Cauchy(0, gamma) variate by inverse CDF, gamma * tan(pi (U - 1/2)).
template <class Rng>
double sample_component(const NoiseModel& model, Rng& rng) {
    for (;;) {
        const double u = uniform_open01(rng);
        const double z = model.gamma() * std::tan(std::numbers::pi * (u - 0.5));
        if (std::isfinite(z)) return z;
    }
}

/// Complex sample; the in-phase component is drawn first.
template <class Rng>
ComplexSample sample(const NoiseModel& model, Rng& rng) {
    const double z1 = sample_component(model, rng);
    const double z2 = sample_component(model, rng);
    return {z1, z2};
}

} // namespace otac
