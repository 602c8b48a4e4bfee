#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <otac/analysis.hpp>
#include <otac/optimizer.hpp>

using namespace otac;

namespace {

struct Config {
    int q;
    int K;
    double gamma;
    double P = 1.0;

    std::int64_t N() const { return std::int64_t{K} * (q - 1) + 1; }
    double rho() const { return PowerBudget(P, std::int64_t{q} * q).rho(); }
};

double gamma_at_db(double db) { return std::pow(10.0, -db / 10.0); }

double mse_at(const Config& c, double d1, double d2) {
    return closed_form_mse(ConstellationParams(c.q, c.K, d1, d2), NoiseModel(c.gamma));
}

std::vector<Config> sweep_configs() {
    std::vector<Config> out;
    for (int q : {2, 4, 8})
        for (int K : {2, 10, 100})
            for (double db : {0.0, 10.0, 20.0}) out.push_back({q, K, gamma_at_db(db)});
    return out;
}

} // namespace

TEST(PowerBudget, RadiusMatchesPower) {
    for (double P : {0.1, 1.0, 3.7})
        for (std::int64_t Q : {4, 16, 64}) {
            const PowerBudget b(P, Q);
            EXPECT_NEAR(b.rho() * b.rho(), 6.0 * P / static_cast<double>(Q - 1), 1e-12);
        }
    EXPECT_THROW(PowerBudget(0.0, 16), DomainError);
    EXPECT_THROW(PowerBudget(1.0, 1), DomainError);
}

TEST(GFunction, NegativeAtZeroForAsymmetricWeights) {
    for (const auto& c : sweep_configs()) EXPECT_LT(g_function(0.0, c.q, c.N(), c.gamma, c.rho()), 0.0);
}

TEST(GFunction, ZeroAtOriginForUnitWeight) {
    EXPECT_EQ(g_function(0.0, 1, 31, 0.5, 0.6), 0.0);
}

TEST(GFunction, DivergesTowardUpperEnd) {
    const Config c{4, 10, 1.0};
    double prev = g_function(0.49, c.q, c.N(), c.gamma, c.rho());
    for (double gap : {1e-3, 1e-6, 1e-9, 1e-12}) {
        const double v = g_function(0.5 - gap, c.q, c.N(), c.gamma, c.rho());
        EXPECT_GT(v, prev);
        prev = v;
    }
    EXPECT_GT(prev, 1e6);
}

TEST(GFunction, RejectsOutOfRangeT) {
    EXPECT_THROW(g_function(0.5, 4, 31, 1.0, 0.5), DomainError);
    EXPECT_THROW(g_function(-0.5, 4, 31, 1.0, 0.5), DomainError);
    EXPECT_THROW(g_function(0.7, 4, 31, 1.0, 0.5), DomainError);
}

TEST(GFunction, IsScaledLargeKStationarityResidual) {
    // Substituting d = rho sqrt(0.5 -+ t) into the large-K condition gives G up to
    // the positive factor rho / gamma^2.
    for (const auto& c : sweep_configs()) {
        for (double t : {-0.3, 0.0, 0.2, 0.45}) {
            const double g = g_function(t, c.q, c.N(), c.gamma, c.rho());
            const auto sides = kkt_sides(spacing_low(c.rho(), t), spacing_high(c.rho(), t), c.q, c.N(), c.gamma,
                                         KktWeights::large_k);
            const double scaled = c.rho() / (c.gamma * c.gamma) * sides.residual();
            EXPECT_NEAR(g, scaled, 1e-10 * std::max(std::abs(sides.lhs), std::abs(sides.rhs)) * c.rho() /
                                       (c.gamma * c.gamma));
        }
    }
}

TEST(GFunction, LinearThetaVariantDiffers) {
    const Config c{4, 10, 0.1};
    EXPECT_NE(g_function(0.2, c.q, c.N(), c.gamma, c.rho(), GForm::theta_linear),
              g_function(0.2, c.q, c.N(), c.gamma, c.rho(), GForm::theta_squared));
}

TEST(SolveTStar, BracketsTheRoot) {
    for (const auto& c : sweep_configs()) {
        const auto r = solve_t_star(c.q, c.N(), c.gamma, c.rho(), 1e-12);
        EXPECT_EQ(r.method, OptimizationMethod::theorem_root);
        EXPECT_GT(r.t_star, 0.0);
        EXPECT_LT(r.t_star, 0.5);
        EXPECT_GT(r.d2_star, r.d1_star);
        const double g_minus = g_function(r.t_star - 1e-9, c.q, c.N(), c.gamma, c.rho());
        const double g_plus = g_function(r.t_star + 1e-9, c.q, c.N(), c.gamma, c.rho());
        EXPECT_LT(g_minus, 0.0);
        EXPECT_GT(g_plus, 0.0);
        EXPECT_NEAR(r.d1_star, c.rho() * std::sqrt(0.5 - r.t_star), 1e-15);
        EXPECT_NEAR(r.d2_star, c.rho() * std::sqrt(0.5 + r.t_star), 1e-15);
    }
}

TEST(SolveTStar, RejectsDegenerateInputs) {
    EXPECT_THROW(solve_t_star(1, 5, 1.0, 0.5, 1e-9), DomainError);
    EXPECT_THROW(solve_t_star(4, 1, 1.0, 0.5, 1e-9), DomainError);
    EXPECT_THROW(solve_t_star(4, 31, 1.0, 0.5, 0.0), DomainError);
}

TEST(SolveTStar, BeatsEqualSpacingAndTracksExactScan) {
    const Config c{4, 100, gamma_at_db(10.0)};
    const auto r = solve_t_star(c.q, c.N(), c.gamma, c.rho(), 1e-12);
    const double eq = c.rho() / std::sqrt(2.0);
    EXPECT_LE(mse_at(c, r.d1_star, r.d2_star), mse_at(c, eq, eq));
    const auto s = exact_scan(c.q, c.K, c.gamma, c.rho(), 2001);
    EXPECT_LE(std::abs(r.t_star - s.t_star), 0.02);
}

TEST(ExactScan, PrefersWiderQuadratureSpacing) {
    for (const auto& c : sweep_configs()) {
        const auto s = exact_scan(c.q, c.K, c.gamma, c.rho(), 1001);
        EXPECT_EQ(s.method, OptimizationMethod::exact_scan);
        EXPECT_GT(s.t_star, 0.0) << "q=" << c.q << " K=" << c.K << " gamma=" << c.gamma;
        EXPECT_GT(s.d2_star, s.d1_star);
    }
}

TEST(ExactScan, SymmetricWeightsGiveSymmetricOptimum) {
    // q = 1 is not a valid constellation; force the symmetric objective directly.
    const auto coeffs = coefficients_for(31);
    for (double gamma : {0.01, 0.1, 1.0}) {
        const auto s = detail::scan_minimize(1.0, gamma, 0.6, *coeffs, 1001);
        EXPECT_NEAR(s.t, 0.0, 1e-6) << gamma;
    }
}

TEST(ExactScan, RejectsCoarseGrid) {
    EXPECT_THROW(exact_scan(4, 10, 1.0, 0.5, 50), DomainError);
}

TEST(KktResidual, VanishesAtExactMinimizer) {
    for (const auto& c : sweep_configs()) {
        const auto s = exact_scan(c.q, c.K, c.gamma, c.rho(), 1001);
        if (!s.interior) continue;
        const auto sides = kkt_sides(s.d1_star, s.d2_star, c.q, c.N(), c.gamma);
        EXPECT_LE(std::abs(sides.residual()), 1e-6 * std::max(std::abs(sides.lhs), std::abs(sides.rhs)))
            << "q=" << c.q << " K=" << c.K << " gamma=" << c.gamma;
        EXPECT_EQ(s.kkt_residual, sides.residual());
    }
}

TEST(ExactScan, InteriorMinimumAtReferencePoints) {
    for (int K : {10, 100}) {
        for (int q : {4, 8}) {
            const Config c{q, K, 1.0};
            EXPECT_TRUE(exact_scan(c.q, c.K, c.gamma, c.rho(), 1001).interior) << "q=" << q << " K=" << K;
        }
    }
}

TEST(KktResidual, NonzeroAtEqualSpacing) {
    for (const auto& c : sweep_configs()) {
        const double eq = c.rho() / std::sqrt(2.0);
        EXPECT_NE(kkt_residual(eq, eq, c.q, c.N(), c.gamma), 0.0);
    }
}

TEST(KktResidual, FirstExactWeight) {
    // w_1 = alpha_1 * 1 = 0.75 for N = 4; isolate it with a single active term.
    const double lhs = kkt_sides(1.0, 1.0, 1, 4, 1e6).lhs;
    double expected = 0.0;
    for (int m = 1; m < 4; ++m) {
        const double odd = 2.0 * m - 1.0;
        const double theta = odd / 1e6;
        expected += coefficients_for(4)->alpha(m) * odd / (1.0 + theta * theta);
    }
    EXPECT_NEAR(lhs, expected, 1e-12);
    EXPECT_EQ(coefficients_for(4)->alpha(1) * 1.0, 0.75);
}

TEST(Monotonicity, ReferenceConfiguration) {
    const Config c{4, 10, 1.0};
    EXPECT_TRUE(g_monotonicity_check(c.q, c.N(), c.gamma, c.rho(), 1000));
    const std::vector<double> ends{0.01, 0.49};
    EXPECT_TRUE(g_is_increasing(c.q, c.N(), c.gamma, c.rho(), ends));
    EXPECT_THROW(g_monotonicity_check(c.q, c.N(), c.gamma, c.rho(), 5), DomainError);
}

TEST(Monotonicity, HoldsAcrossSweep) {
    for (const auto& c : sweep_configs()) EXPECT_TRUE(g_monotonicity_check(c.q, c.N(), c.gamma, c.rho(), 2000));
}

TEST(Monotonicity, DetectsDecrease) {
    const Config c{4, 10, 1.0};
    const std::vector<double> backwards{0.4, 0.1};
    EXPECT_FALSE(g_is_increasing(c.q, c.N(), c.gamma, c.rho(), backwards));
}

TEST(Optimizer, PowerFeasibility) {
    for (const auto& c : sweep_configs()) {
        for (const auto& r : {solve_t_star(c.q, c.N(), c.gamma, c.rho(), 1e-12),
                              exact_scan(c.q, c.K, c.gamma, c.rho(), 501)}) {
            const ConstellationParams p(c.q, c.K, r.d1_star, r.d2_star);
            EXPECT_NEAR(average_power(p), c.P, 1e-9 * c.P);
            EXPECT_NEAR(r.d1_star * r.d1_star + r.d2_star * r.d2_star, c.rho() * c.rho(), 1e-9 * c.rho() * c.rho());
        }
    }
}

TEST(Optimizer, OracleDominanceChain) {
    for (const auto& c : sweep_configs()) {
        const auto root = solve_t_star(c.q, c.N(), c.gamma, c.rho(), 1e-12);
        const auto scan = exact_scan(c.q, c.K, c.gamma, c.rho(), 1001);
        const double eq = c.rho() / std::sqrt(2.0);
        const double j_scan = mse_at(c, scan.d1_star, scan.d2_star);
        const double j_root = mse_at(c, root.d1_star, root.d2_star);
        const double j_eq = mse_at(c, eq, eq);
        EXPECT_LE(j_scan, j_root * (1.0 + 1e-12)) << "q=" << c.q << " K=" << c.K << " gamma=" << c.gamma;
        EXPECT_LE(j_root, j_eq) << "q=" << c.q << " K=" << c.K << " gamma=" << c.gamma;
    }
}

TEST(Optimizer, SingleSignChange) {
    std::vector<double> ts;
    for (int i = 1; i < 10000; ++i) ts.push_back(0.5 * i / 10000.0);
    for (const auto& c : sweep_configs()) EXPECT_EQ(count_sign_changes(c.q, c.N(), c.gamma, c.rho(), ts), 1);
}

TEST(Optimizer, ScaleConsistency) {
    for (const auto& c : sweep_configs()) {
        const auto base = solve_t_star(c.q, c.N(), c.gamma, c.rho(), 1e-13);
        for (double k : {0.1, 10.0}) {
            const auto scaled = solve_t_star(c.q, c.N(), k * c.gamma, k * c.rho(), 1e-13);
            EXPECT_NEAR(scaled.t_star, base.t_star, 1e-9);
            EXPECT_NEAR(scaled.d1_star, k * base.d1_star, 1e-9 * k * base.d1_star);
            EXPECT_NEAR(scaled.d2_star, k * base.d2_star, 1e-9 * k * base.d2_star);
        }
    }
}
