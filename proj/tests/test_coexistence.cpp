#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "gibbsgeo/coexistence.hpp"
#include "gibbsgeo/error.hpp"
#include "oracle.hpp"

using namespace gibbsgeo;

namespace {

std::vector<double> linear_grid(double a, double b, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
    return g;
}

}  // namespace

TEST(Spinodal, MatchesDenseScan) {
    const EosParams p;
    const SpinodalVolumes sp = spinodal(p, 0.9);
    EXPECT_LT(sp.liquid, 1.0);
    EXPECT_GT(sp.vapor, 1.0);
    // sign changes of the isotherm slope on a 10^6-point grid, refined by bisection
    const auto slope = [](double V) { return -0.9 / std::pow(V - 1.0 / 3.0, 2) + 9.0 / (4.0 * V * V * V); };
    std::vector<double> roots;
    const int n = 1000000;
    const double a = 0.34, b = 5.0;
    for (int i = 0; i < n; ++i) {
        const double v0 = a + (b - a) * i / n, v1 = a + (b - a) * (i + 1) / n;
        if ((slope(v0) < 0) != (slope(v1) < 0)) roots.push_back(oracle::bisect(slope, v0, v1));
    }
    ASSERT_EQ(roots.size(), 2u);
    EXPECT_NEAR(sp.liquid, roots[0], 1e-12);
    EXPECT_NEAR(sp.vapor, roots[1], 1e-12);
    EXPECT_LE(std::abs(dP_dV_T(p, 0.9, sp.liquid)), 1e-12);
    EXPECT_LE(std::abs(dP_dV_T(p, 0.9, sp.vapor)), 1e-12);

    const SpinodalVolumes near = spinodal(p, 1.0 - 1e-8);
    EXPECT_NEAR(near.liquid, 1.0, 1e-3);
    EXPECT_NEAR(near.vapor, 1.0, 1e-3);
}

TEST(Coexistence, EqualAreaOracle) {
    const EosParams p;
    for (double T : {0.55, 0.7, 0.9, 0.98}) {
        const oracle::Maxwell m = oracle::maxwell(T);
        const CoexistencePoint c = solve_coexistence(p, T);
        EXPECT_NEAR(c.P_sat, m.P, 1e-11 * m.P) << T;
        EXPECT_NEAR(c.liquid.V, m.V_L, 1e-9 * m.V_L) << T;
        EXPECT_NEAR(c.vapor.V, m.V_G, 1e-9 * m.V_G) << T;
    }
    const CoexistencePoint c = solve_coexistence(p, 0.9);
    EXPECT_NEAR(c.liquid.V, 0.603, 5e-4);
    EXPECT_NEAR(c.vapor.V, 2.349, 5e-4);
    // vapor state from (S, V) reproduces the saturation pressure
    const ThermoState g = state_from_SV(p, entropy(p, 0.9, c.vapor.V), c.vapor.V);
    EXPECT_NEAR(g.P, c.P_sat, 1e-13);
    // chemical potential at the oracle pair
    const oracle::Maxwell m = oracle::maxwell(0.9);
    EXPECT_NEAR(c.mu_sat, chemical_potential(p, 0.9, m.V_G), 1e-9);
}

TEST(Coexistence, IdentitiesOnGrid) {
    const EosParams p;
    for (double T : linear_grid(0.5, 0.999, 60)) {
        const CoexistencePoint c = solve_coexistence(p, T);
        EXPECT_EQ(c.liquid.T, c.vapor.T);
        EXPECT_LE(std::abs(c.liquid.P - c.vapor.P), 1e-11 * c.P_sat) << T;
        EXPECT_LE(std::abs(c.liquid.mu - c.vapor.mu), 1e-11 * (std::abs(c.vapor.U) + std::abs(c.vapor.T * c.vapor.S) + c.P_sat * c.vapor.V));
        EXPECT_LE(orthogonality_residual(c), 1e-11);
        EXPECT_LE(gibbs_duhem_residual(c), 1e-11);
        EXPECT_LE(energy_slope_residual(c), 1e-10);
        const ClausiusClapeyronResidual cc = clausius_clapeyron_residual(p, c);
        EXPECT_EQ(cc.construction, 0.0);
        EXPECT_LE(cc.finite_difference, 1e-8) << T;
    }
}

TEST(Coexistence, ClausiusClapeyronNearCritical) {
    const EosParams p;
    const CoexistencePoint c = solve_coexistence(p, 1.0 - 1e-4);
    EXPECT_LE(clausius_clapeyron_residual(p, c, 2e-5).finite_difference, 1e-6);
}

// Branch derivatives against differenced solves.
TEST(Coexistence, ExactDerivativesMatchFiniteDifferences) {
    const EosParams p;
    for (double T : {0.6, 0.8, 0.95}) {
        const CoexistencePoint c = solve_coexistence(p, T);
        const auto diff = [&](auto field) {
            return oracle::derivative([&](double t) { return field(solve_coexistence(p, t)); }, T, 1e-3);
        };
        EXPECT_LE(oracle::rel_diff(c.Pprime, diff([](const CoexistencePoint& x) { return x.P_sat; })), 1e-8);
        EXPECT_LE(oracle::rel_diff(c.muprime, diff([](const CoexistencePoint& x) { return x.mu_sat; })), 1e-8);
        EXPECT_LE(oracle::rel_diff(c.Vprime_L, diff([](const CoexistencePoint& x) { return x.liquid.V; })), 1e-7);
        EXPECT_LE(oracle::rel_diff(c.Vprime_G, diff([](const CoexistencePoint& x) { return x.vapor.V; })), 1e-7);
        EXPECT_LE(oracle::rel_diff(c.Sprime_L, diff([](const CoexistencePoint& x) { return x.liquid.S; })), 1e-7);
        EXPECT_LE(oracle::rel_diff(c.Sprime_G, diff([](const CoexistencePoint& x) { return x.vapor.S; })), 1e-7);
    }
}

TEST(Coexistence, DomainAndWarmStart) {
    const EosParams p;
    EXPECT_THROW(solve_coexistence(p, 1.0), DomainError);
    EXPECT_THROW(solve_coexistence(p, 0.4), DomainError);
    SolverOptions low;
    low.T_min = 0.3;
    EXPECT_NO_THROW(solve_coexistence(p, 0.4, low));

    const CoexistencePoint cold = solve_coexistence(p, 0.85);
    const CoexistencePoint warm = solve_coexistence(p, 0.85, {}, std::pair{0.62, 2.1});
    EXPECT_NEAR(warm.liquid.V, cold.liquid.V, 1e-13);
    EXPECT_NEAR(warm.vapor.V, cold.vapor.V, 1e-12);
    // a hopeless guess falls back to the bracketed start
    const CoexistencePoint bad = solve_coexistence(p, 0.85, {}, std::pair{0.99, 1.01});
    EXPECT_NEAR(bad.vapor.V, cold.vapor.V, 1e-12);

    // one iteration from the equal-area start cannot reach this
    SolverOptions strict;
    strict.residual_tol = 1e-30;
    strict.max_iterations = 1;
    EXPECT_THROW(solve_coexistence(p, 0.85, strict), ConvergenceError);
}

TEST(SaturationScan, Preconditions) {
    const EosParams p;
    EXPECT_THROW(saturation_scan(p, linear_grid(0.5, 0.9, 4)), std::invalid_argument);
    EXPECT_THROW(saturation_scan(p, std::vector<double>{0.5, 0.6, 0.6, 0.7, 0.8}), std::invalid_argument);
    EXPECT_ANY_THROW(saturation_scan(p, linear_grid(0.5, 1.0, 6)));
    const SaturationCurve c = saturation_scan(p, linear_grid(0.5, 0.9, 5));
    EXPECT_EQ(c.index_of(0.7), 2u);
    EXPECT_THROW(c.index_of(0.71), std::out_of_range);
}

TEST(SaturationScan, MonotoneAndSecondDerivatives) {
    const EosParams p;
    for (const auto method : {SecondDerivativeMethod::grid, SecondDerivativeMethod::local}) {
        ScanOptions o;
        o.second_derivative = method;
        const SaturationCurve c = saturation_scan(p, linear_grid(0.5, 0.99, 50), o);
        ASSERT_EQ(c.size(), 50u);
        for (std::size_t i = 1; i < c.size(); ++i) EXPECT_GT(c.points[i].P_sat, c.points[i - 1].P_sat);
        for (std::size_t i = 0; i < c.size(); ++i) {
            EXPECT_TRUE(std::isfinite(c.musecond[i]));
            EXPECT_LE(second_derivative_residual(c, i), method == SecondDerivativeMethod::local ? 1e-6 : 1e-3);
        }
    }
}

// P' against the differenced saturation pressure on a grid and on the halved
// grid: the error falls by about 2^4.
TEST(SaturationScan, GridDifferenceConvergence) {
    const EosParams p;
    const auto error_at = [&](double h) {
        const std::vector<double> g = {0.8 - 2 * h, 0.8 - h, 0.8, 0.8 + h, 0.8 + 2 * h};
        const SaturationCurve c = saturation_scan(p, g);
        const std::vector<double> w = fd_weights(0.8, g, 1);
        double d = 0.0;
        for (int k = 0; k < 5; ++k) d += w[k] * c.points[k].P_sat;
        return std::abs(d - c.points[2].Pprime);
    };
    const double e1 = error_at(0.02), e2 = error_at(0.01);
    EXPECT_GT(e1 / e2, 12.0);
    EXPECT_LT(e1 / e2, 20.0);
}

TEST(SaturationScan, RectilinearDiameter) {
    const EosParams p;
    double prev_ratio = 0.0;
    for (double tau : {1e-2, 1e-3, 1e-4}) {
        const CoexistencePoint c = solve_coexistence(p, 1.0 - tau);
        const double dev = 0.5 * (c.liquid.V + c.vapor.V) - 1.0;
        const double ratio = dev / tau;
        if (prev_ratio != 0.0) EXPECT_NEAR(ratio, prev_ratio, 0.2 * std::abs(prev_ratio));
        prev_ratio = ratio;
    }
}

TEST(FdWeights, ExactOnPolynomials) {
    const std::vector<double> x = {0.0, 0.3, 0.7, 1.2, 2.0};
    const std::vector<double> w1 = fd_weights(0.5, x, 1);
    const std::vector<double> w2 = fd_weights(0.5, x, 2);
    double d1 = 0, d2 = 0;
    for (int k = 0; k < 5; ++k) {
        const double f = std::pow(x[k], 4) - 2 * x[k] * x[k] + 3;
        d1 += w1[k] * f;
        d2 += w2[k] * f;
    }
    EXPECT_NEAR(d1, 4 * 0.125 - 2, 1e-12);
    EXPECT_NEAR(d2, 12 * 0.25 - 4, 1e-11);
}
