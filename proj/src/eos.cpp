#include "gibbsgeo/eos.hpp"

#include <cmath>
#include <fmt/format.h>

#include "gibbsgeo/error.hpp"

namespace gibbsgeo {

namespace {

void check_domain(double T, double V) {
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw DomainError(fmt::format("temperature must be positive and finite, got T={}", T));
    }
    if (!(V > vdw::covolume) || !std::isfinite(V)) {
        throw DomainError(fmt::format("volume must exceed the covolume 1/3, got V={}", V));
    }
}

}  // namespace

std::string_view to_string(EosModel model) {
    switch (model) {
        case EosModel::van_der_waals:
            return "vdw";
    }
    return "unknown";
}

EosModel eos_model_from_string(std::string_view name) {
    if (name == "vdw" || name == "van_der_waals") {
        return EosModel::van_der_waals;
    }
    throw DomainError(fmt::format("unrecognized equation-of-state model '{}'", name));
}

void EosParams::validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw DomainError(fmt::format("heat capacity c must be positive, got {}", c));
    }
}

double pressure(const EosParams&, double T, double V) {
    return T / (V - vdw::covolume) - vdw::attraction / (V * V);
}

double entropy(const EosParams& params, double T, double V) {
    return params.c * std::log(T) + std::log(V - vdw::covolume);
}

double energy(const EosParams& params, double T, double V) {
    return params.c * T - vdw::attraction / V;
}

double chemical_potential(const EosParams& params, double T, double V) {
    return energy(params, T, V) + pressure(params, T, V) * V - T * entropy(params, T, V);
}

double dP_dV_T(const EosParams&, double T, double V) {
    const double gap = V - vdw::covolume;
    return -T / (gap * gap) + 2.0 * vdw::attraction / (V * V * V);
}

double dP_dT_V(const EosParams&, double, double V) { return 1.0 / (V - vdw::covolume); }

double dS_dT_V(const EosParams& params, double T, double) { return params.c / T; }

bool mechanically_stable(const EosParams& params, double T, double V) {
    return dP_dV_T(params, T, V) < 0.0;
}

ThermoState state_from_TV(const EosParams& params, double T, double V) {
    params.validate();
    check_domain(T, V);
    ThermoState s;
    s.T = T;
    s.V = V;
    s.P = pressure(params, T, V);
    s.S = entropy(params, T, V);
    s.U = energy(params, T, V);
    s.mu = chemical_potential(s);
    return s;
}

ThermoState state_from_SV(const EosParams& params, double S, double V) {
    params.validate();
    if (!(V > vdw::covolume) || !std::isfinite(V)) {
        throw DomainError(fmt::format("volume must exceed the covolume 1/3, got V={}", V));
    }
    const double T = std::exp((S - std::log(V - vdw::covolume)) / params.c);
    return state_from_TV(params, T, V);
}

DerivativeBundle derivative_bundle(const EosParams& params, const ThermoState& state) {
    params.validate();
    check_domain(state.T, state.V);
    const double T = state.T;
    const double gap = state.V - vdw::covolume;
    const double c = params.c;

    DerivativeBundle d;
    d.dS_dT_V = c / T;
    d.dP_dT_V = 1.0 / gap;
    d.dS_dV_T = 1.0 / gap;
    d.dP_dV_T = dP_dV_T(params, T, state.V);
    d.dT_dS_V = T / c;
    // T(S, V) = exp(S/c) (V - b)^(-1/c)
    d.dT_dV_S = -T / (c * gap);
    d.dP_dS_V = T / (c * gap);
    d.dP_dV_S = d.dP_dV_T - T / (c * gap * gap);
    return d;
}

double chemical_potential(const ThermoState& state) {
    return state.U + state.P * state.V - state.T * state.S;
}

double chemical_potential_normal_form(const ThermoState& state) {
    return -(state.T * state.S - state.P * state.V - state.U);
}

}  // namespace gibbsgeo
