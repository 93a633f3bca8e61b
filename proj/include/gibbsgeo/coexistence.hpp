#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gibbsgeo/eos.hpp"

namespace gibbsgeo {

/// Paired liquid/vapor states at one temperature with exact first derivatives
/// of the branches: P' by Clausius-Clapeyron, mu' by Gibbs-Duhem and V'_A by
/// implicit differentiation of the equal-pressure condition.
struct CoexistencePoint {
    double T = 0.0;
    double P_sat = 0.0;
    double mu_sat = 0.0;
    ThermoState liquid;
    ThermoState vapor;
    double Vprime_L = 0.0;
    double Vprime_G = 0.0;
    double Sprime_L = 0.0;
    double Sprime_G = 0.0;
    double Pprime = 0.0;
    double muprime = 0.0;
    int iterations = 0;
};

enum class Branch { liquid, vapor };

const ThermoState& state_of(const CoexistencePoint& p, Branch branch);
double vprime_of(const CoexistencePoint& p, Branch branch);
double sprime_of(const CoexistencePoint& p, Branch branch);

struct SolverOptions {
    double T_min = 0.5;
    double residual_tol = 1e-12;
    int max_iterations = 60;
};

struct SpinodalVolumes {
    double liquid = 0.0;  // in (1/3, 1)
    double vapor = 0.0;   // in (1, inf)
};

/// Roots of (dP/dV)_T = 0 at 0 < T < 1.
SpinodalVolumes spinodal(const EosParams& params, double T);

/// Equal T, P, mu between the branches. An optional (V_L, V_G) warm start skips
/// the bracketed initialisation; a failed warm start falls back to it.
CoexistencePoint solve_coexistence(const EosParams& params, double T,
                                   const SolverOptions& opts = {},
                                   std::optional<std::pair<double, double>> guess = std::nullopt);

enum class SecondDerivativeMethod {
    grid,   // 5-point stencil over the scan grid
    local,  // 5-point stencil of extra solves at T +- h, T +- 2h
};

struct ScanOptions {
    SolverOptions solver;
    SecondDerivativeMethod second_derivative = SecondDerivativeMethod::grid;
    double local_step = 1e-3;
};

struct SaturationCurve {
    EosParams params;
    std::vector<CoexistencePoint> points;
    std::vector<double> Psecond;
    std::vector<double> musecond;

    std::size_t size() const { return points.size(); }
    /// Index of the node at temperature T (relative match 1e-12); throws std::out_of_range.
    std::size_t index_of(double T) const;
};

/// Solves every node with warm starts and attaches P'' and mu''. Needs >= 5 nodes.
/// Solver failures are rethrown as ConvergenceError naming the node index.
SaturationCurve saturation_scan(const EosParams& params, std::span<const double> T_grid,
                                const ScanOptions& opts = {});

struct CentralDifferences {
    double dPsat = 0.0;     // d P_sat / dT from saturation pressures
    double Psecond = 0.0;   // d P' / dT
    double musecond = 0.0;  // d mu' / dT
    double step = 0.0;
};

/// Fourth-order central differences at T from solves at T +- h, T +- 2h.
/// The step is shrunk to keep T + 2h below the critical temperature.
CentralDifferences local_differences(const EosParams& params, double T, double h,
                                     const SolverOptions& opts = {});

struct ClausiusClapeyronResidual {
    double construction = 0.0;       // |P' - dS/dV| / |P'|
    double finite_difference = 0.0;  // |dP_sat/dT (differenced) - dS/dV| / |P'|
};

ClausiusClapeyronResidual clausius_clapeyron_residual(const EosParams& params,
                                                      const CoexistencePoint& point,
                                                      double h = 1e-3,
                                                      const SolverOptions& opts = {});

/// Finite-difference weights for the derivative of order `order` at x0 over nodes (Fornberg).
std::vector<double> fd_weights(double x0, std::span<const double> nodes, int order);

// Scaled identity residuals at a converged point.
double orthogonality_residual(const CoexistencePoint& p);  // (T,-P,-1).(dS,dV,dU)
double gibbs_duhem_residual(const CoexistencePoint& p);    // mu' + S_A - V_A P', worst branch
double energy_slope_residual(const CoexistencePoint& p);   // -P + T P' - dU/dV

/// mu'' - V_A P'' against -(dS/dT)_V + (dP/dV)_T V'_A^2 with the curve's
/// numerical second derivatives, relative, worst branch.
double second_derivative_residual(const SaturationCurve& curve, std::size_t index);

}  // namespace gibbsgeo
