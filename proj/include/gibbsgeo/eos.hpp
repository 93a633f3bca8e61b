#pragma once

// Reduced van der Waals fluid in Gibbs-consistent units.
//
// Units: T/T_c, V/V_c, S/R, U/(R T_c), P V_c/(R T_c). In these units
// dU = T dS - P dV holds with unit coefficients and
//
//   P(T, V) = T / (V - 1/3) - (9/8) / V^2
//   S(T, V) = c ln T + ln(V - 1/3)          (entropy constant S0 = 0)
//   U(T, V) = c T - (9/8) / V
//
// with critical point (T, V, P) = (1, 1, 3/8).

#include <string_view>

namespace gibbsgeo {

enum class EosModel { van_der_waals };

std::string_view to_string(EosModel model);
EosModel eos_model_from_string(std::string_view name);

struct EosParams {
    double c = 1.5;  // c_v / R
    EosModel model = EosModel::van_der_waals;

    /// Throws DomainError unless c > 0.
    void validate() const;

    bool operator==(const EosParams&) const = default;
};

namespace vdw {
inline constexpr double covolume = 1.0 / 3.0;
inline constexpr double attraction = 9.0 / 8.0;
inline constexpr double critical_temperature = 1.0;
inline constexpr double critical_volume = 1.0;
inline constexpr double critical_pressure = 3.0 / 8.0;
}  // namespace vdw

/// One equilibrium point of the energy surface.
struct ThermoState {
    double S = 0.0;
    double V = 0.0;
    double U = 0.0;
    double T = 0.0;
    double P = 0.0;
    double mu = 0.0;
};

/// Closed-form partial derivatives among S, V, T, P at one state.
struct DerivativeBundle {
    double dT_dS_V = 0.0;
    double dT_dV_S = 0.0;
    double dP_dS_V = 0.0;
    double dP_dV_S = 0.0;
    double dP_dV_T = 0.0;
    double dS_dT_V = 0.0;
    double dP_dT_V = 0.0;
    double dS_dV_T = 0.0;
};

ThermoState state_from_TV(const EosParams& params, double T, double V);

/// Inverts S(T, V) for T at fixed V.
ThermoState state_from_SV(const EosParams& params, double S, double V);

DerivativeBundle derivative_bundle(const EosParams& params, const ThermoState& state);

/// mu = U + P V - T S.
double chemical_potential(const ThermoState& state);

/// mu = -(T, -P, -1) . (S, V, U), the normal-vector form.
double chemical_potential_normal_form(const ThermoState& state);

// Scalar evaluators on the (T, V) chart, used by the coexistence solver.
double pressure(const EosParams& params, double T, double V);
double entropy(const EosParams& params, double T, double V);
double energy(const EosParams& params, double T, double V);
double chemical_potential(const EosParams& params, double T, double V);
double dP_dV_T(const EosParams& params, double T, double V);
double dP_dT_V(const EosParams& params, double T, double V);
double dS_dT_V(const EosParams& params, double T, double V);

/// True where the isotherm slope is negative (outside the spinodal).
bool mechanically_stable(const EosParams& params, double T, double V);

}  // namespace gibbsgeo
