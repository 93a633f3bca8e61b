#include <cmath>

#include <gtest/gtest.h>

#include "gibbsgeo/eos.hpp"
#include "gibbsgeo/error.hpp"
#include "oracle.hpp"

using namespace gibbsgeo;

namespace {

struct Sample {
    double T, V;
};

Sample random_state() { return {oracle::uniform(0.3, 3.0), oracle::log_uniform(0.4, 30.0)}; }

}  // namespace

TEST(Eos, CriticalPointAndLimits) {
    const EosParams p;
    EXPECT_NEAR(pressure(p, 1.0, 1.0), 3.0 / 8.0, 1e-15);
    EXPECT_NEAR(dP_dV_T(p, 1.0, 1.0), 0.0, 1e-15);
    EXPECT_NEAR(pressure(p, 1.0, 1e8) * 1e8, 1.0, 1e-7);
    EXPECT_NEAR(pressure(p, 0.9, 0.6034), 0.2426, 5e-4);
    EXPECT_NEAR(pressure(p, 0.9, 0.6034), oracle::vdw_pressure(0.9, 0.6034), 1e-15);
}

TEST(Eos, DomainErrors) {
    const EosParams p;
    EXPECT_THROW(state_from_TV(p, 0.0, 1.0), DomainError);
    EXPECT_THROW(state_from_TV(p, 1.0, 1.0 / 3.0), DomainError);
    EXPECT_THROW(state_from_SV(p, 0.0, 0.2), DomainError);
    EosParams bad;
    bad.c = -1.0;
    EXPECT_THROW(state_from_TV(bad, 1.0, 1.0), DomainError);
    EXPECT_EQ(eos_model_from_string("vdw"), EosModel::van_der_waals);
    EXPECT_THROW(eos_model_from_string("peng-robinson"), std::exception);
}

TEST(Eos, InversionRoundTrip) {
    const EosParams p;
    const ThermoState a = state_from_TV(p, 0.8, 2.0);
    const ThermoState b = state_from_SV(p, a.S, 2.0);
    EXPECT_NEAR(b.T, 0.8, 1e-12);
    EXPECT_NEAR(b.U, a.U, 1e-12);

    const ThermoState crit = state_from_SV(p, entropy(p, 1.0, 1.0), 1.0);
    EXPECT_NEAR(crit.T, 1.0, 1e-14);
    EXPECT_NEAR(crit.U, p.c - 9.0 / 8.0, 1e-14);
}

TEST(Eos, ChemicalPotentialForms) {
    const EosParams p;
    for (int i = 0; i < 100; ++i) {
        const auto [T, V] = random_state();
        const ThermoState s = state_from_TV(p, T, V);
        const double scale = std::abs(s.U) + std::abs(s.P * s.V) + std::abs(s.T * s.S);
        EXPECT_LE(std::abs(chemical_potential(s) - chemical_potential_normal_form(s)), 1e-14 * scale);
        EXPECT_LE(std::abs(chemical_potential(s) - (s.U + s.P * s.V - s.T * s.S)), 1e-14 * scale);
    }
}

// Every closed-form partial against Richardson-extrapolated central differences.
TEST(Eos, PartialsMatchFiniteDifferences) {
    const EosParams p;
    for (int i = 0; i < 200; ++i) {
        const auto [T, V] = random_state();
        const ThermoState s = state_from_TV(p, T, V);
        const DerivativeBundle d = derivative_bundle(p, s);
        const double hT = 1e-4 * T;
        const double hV = 1e-4 * (V - 1.0 / 3.0);
        const double hS = 1e-4;
        const auto P_of_T = [&](double t) { return oracle::vdw_pressure(t, V); };
        const auto P_of_V = [&](double v) { return oracle::vdw_pressure(T, v); };
        const auto S_of_T = [&](double t) { return p.c * std::log(t) + std::log(V - 1.0 / 3.0); };
        const auto S_of_V = [&](double v) { return p.c * std::log(T) + std::log(v - 1.0 / 3.0); };
        // T(S, V) and P(S, V) from the energy U(S, V)
        const auto T_SV = [&](double S, double v) {
            return oracle::derivative([&](double x) { return state_from_SV(p, x, v).U; }, S, hS);
        };
        const auto P_SV = [&](double S, double v) {
            return -oracle::derivative([&](double x) { return state_from_SV(p, S, x).U; }, v, hV);
        };
        EXPECT_LE(oracle::rel_diff(d.dP_dT_V, oracle::derivative(P_of_T, T, hT)), 1e-7);
        EXPECT_LE(std::abs(d.dP_dV_T - oracle::derivative(P_of_V, V, hV)),
                  1e-7 * (T / std::pow(V - 1.0 / 3.0, 2) + 1.0));
        EXPECT_LE(oracle::rel_diff(d.dS_dT_V, oracle::derivative(S_of_T, T, hT)), 1e-7);
        EXPECT_LE(oracle::rel_diff(d.dS_dV_T, oracle::derivative(S_of_V, V, hV)), 1e-7);

        EXPECT_LE(oracle::rel_diff(T_SV(s.S, V), T), 1e-7);
        EXPECT_LE(std::abs(P_SV(s.S, V) - s.P), 1e-7 * (std::abs(s.P) + T / V));
        const auto dS = [&](auto f) { return oracle::derivative([&](double x) { return f(x, V); }, s.S, hS); };
        const auto dV = [&](auto f) {
            return oracle::derivative([&](double x) { return f(s.S, x); }, V, hV);
        };
        const auto T_direct = [&](double S, double v) { return state_from_SV(p, S, v).T; };
        const auto P_direct = [&](double S, double v) { return state_from_SV(p, S, v).P; };
        EXPECT_LE(oracle::rel_diff(d.dT_dS_V, dS(T_direct)), 1e-7);
        EXPECT_LE(oracle::rel_diff(d.dT_dV_S, dV(T_direct)), 1e-7);
        EXPECT_LE(oracle::rel_diff(d.dP_dS_V, dS(P_direct)), 1e-7);
        EXPECT_LE(std::abs(d.dP_dV_S - dV(P_direct)), 1e-7 * (std::abs(d.dP_dV_S) + T / std::pow(V, 2)));
    }
}

TEST(Eos, MaxwellRelationAtRandomStates) {
    const EosParams p;
    for (int i = 0; i < 1000; ++i) {
        const auto [T, V] = random_state();
        const DerivativeBundle d = derivative_bundle(p, state_from_TV(p, T, V));
        EXPECT_LE(std::abs(d.dT_dV_S + d.dP_dS_V), 1e-12 * std::abs(d.dP_dS_V));
        EXPECT_LE(std::abs(d.dP_dT_V - d.dS_dV_T), 1e-12 * std::abs(d.dS_dV_T));
    }
}

// dU/dt = T dS/dt - P dV/dt along smooth paths, with dU/dt differenced.
TEST(Eos, GibbsRelationAlongPaths) {
    const EosParams p;
    for (int k = 0; k < 50; ++k) {
        const double S0 = oracle::uniform(-2.0, 2.0);
        const double V0 = oracle::log_uniform(0.6, 10.0);
        const double a = oracle::uniform(-0.5, 0.5);
        const double b = oracle::uniform(-0.2, 0.2) * V0;
        const auto S = [&](double t) { return S0 + a * std::sin(t); };
        const auto V = [&](double t) { return V0 + b * t * t; };
        for (double t : {0.1, 0.4, 0.7}) {
            const ThermoState s = state_from_SV(p, S(t), V(t));
            const double dU = oracle::derivative([&](double x) { return state_from_SV(p, S(x), V(x)).U; }, t, 1e-3);
            const double rhs = s.T * a * std::cos(t) - s.P * 2.0 * b * t;
            EXPECT_LE(std::abs(dU - rhs), 1e-10 * (std::abs(s.T * a) + std::abs(s.P * b) + 1e-3));
        }
    }
}

TEST(Eos, StabilityRegion) {
    const EosParams p;
    for (int i = 0; i < 1000; ++i) {
        const auto [T, V] = random_state();
        EXPECT_GT(dS_dT_V(p, T, V), 0.0);
    }
    // Between the spinodal volumes at T = 0.9 the isotherm rises.
    EXPECT_GT(dP_dV_T(p, 0.9, 1.0), 0.0);
    EXPECT_LT(dP_dV_T(p, 0.9, 3.0), 0.0);
    EXPECT_LT(dP_dV_T(p, 0.9, 0.5), 0.0);
    EXPECT_TRUE(mechanically_stable(p, 0.9, 3.0));
    EXPECT_FALSE(mechanically_stable(p, 0.9, 1.0));
    EXPECT_LT(oracle::derivative([](double v) { return oracle::vdw_pressure(0.9, v); }, 3.0, 1e-6), 0.0);
}
