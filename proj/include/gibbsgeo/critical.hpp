#pragma once

// Power-law behaviour of coexistence quantities as tau = 1 - T -> 0.

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gibbsgeo/coexistence.hpp"
#include "gibbsgeo/geometry.hpp"

namespace gibbsgeo {

struct ScalingSeries {
    std::string label;
    std::vector<double> tau;
    std::vector<double> values;
};

struct FitWindow {
    double lo = 1e-4;
    double hi = 1e-2;

    bool operator==(const FitWindow&) const = default;
};

struct ExponentEstimate {
    double exponent = 0.0;
    double std_error = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    FitWindow window;
    std::size_t points = 0;
};

/// Least squares of log|q| on log tau over the window. With a correction
/// exponent theta the model is log|q| = a + x log tau + b tau^theta, the
/// leading correction to scaling; the slope x is still the reported exponent.
/// Throws FitError for fewer than 5 points, a zero value or a sign change.
ExponentEstimate fit_power_law(const ScalingSeries& series, FitWindow window,
                               std::optional<double> correction_exponent = std::nullopt);

/// Log-spaced tau values from hi down to lo.
std::vector<double> log_tau_grid(double lo, double hi, std::size_t count);

struct AngleRecord {
    double T = 0.0;
    double tau = 0.0;
    double phi_A_liquid = 0.0;
    double phi_A_vapor = 0.0;
    double phi_R = 0.0;  // at the vapor point
    double phi_R_liquid = 0.0;
    double lambda1 = 0.0;  // vapor point
    double lambda2 = 0.0;
    double lambda1_liquid = 0.0;
    double lambda2_liquid = 0.0;
    double product_residual = 0.0;  // |tan phi_R tan phi_A + l1/l2| / (l1/l2), vapor
    double product_residual_liquid = 0.0;
    double small_angle_residual = 0.0;  // same with the angles in place of their tangents
};

/// Twelve partial derivatives among S, V, T, P.
struct NamedValue {
    const char* label;
    double value;
};
std::array<NamedValue, 12> partial_derivative_table(const DerivativeBundle& d);

/// Labels of partial_derivative_table, in order.
const std::array<const char*, 12>& partial_derivative_labels();

/// Mean-field exponent predicted for each entry of partial_derivative_table
/// given (alpha, gamma): {-g, -a, 0, 0, -a, -a, -g, -g, 0, 0, -g, -a}.
std::array<double, 12> predicted_partial_exponents(double alpha, double gamma);

/// True for the entries whose predicted exponent is -alpha.
std::array<bool, 12> alpha_class_partials();

struct ScalingSweep {
    std::vector<double> tau;  // nodes that solved, in processing order (decreasing)
    std::map<std::string, ScalingSeries> series;
    std::vector<AngleRecord> angles;
    std::vector<std::string> failures;

    const ScalingSeries& at(const std::string& label) const;
};

/// Solves coexistence at T = 1 - tau for every node, nearest-to-critical last,
/// and records the Proposition-1 partials, branch derivatives, curvatures and
/// angles at the vapor point (liquid counterparts carry an _L suffix). A
/// failed node is recorded and ends the sweep.
ScalingSweep scaling_sweep(const EosParams& params, std::span<const double> tau_grid,
                           const SolverOptions& opts = {});

struct AnalysisOptions {
    FitWindow window;
    std::optional<double> correction_exponent = 0.5;
    double finite_slope = 0.02;       // |slope| at or below this reads as a finite quantity
    double table_tolerance = 0.03;
    double chain_tolerance = 0.05;
};

struct CriticalExponents {
    ExponentEstimate alpha;  // -(slope of (dS/dT)_V)
    ExponentEstimate beta;   // slope of V_G - V_L
    ExponentEstimate gamma;  // -(slope of (dV/dP)_T)
};

CriticalExponents critical_exponents(const ScalingSweep& sweep, const AnalysisOptions& opts = {});

struct TableRow {
    std::string label;
    ExponentEstimate estimate;
    double predicted = 0.0;
    bool finite = false;  // |slope| <= finite_slope
    bool pass = false;
};

/// Fits the twelve partials and compares with mean-field (alpha, gamma) = (0, 1).
/// Alpha-class rows pass only when classified finite.
std::vector<TableRow> proposition1_table(const ScalingSweep& sweep, const AnalysisOptions& opts = {});
std::vector<TableRow> proposition1_table(const EosParams& params, std::span<const double> tau_grid,
                                         const AnalysisOptions& opts = {});

struct ChainRuleCheck {
    std::string relation;
    std::array<std::string, 3> terms;  // two dominant terms, then the subdominant one
    std::array<double, 3> exponents{};
    double expected_shift = 0.0;  // gamma - alpha
    bool pass = false;
};

/// Two dominant terms of a chain-rule identity share an exponent and the
/// third exceeds it by gamma - alpha.
std::vector<ChainRuleCheck> chain_rule_checks(const ScalingSweep& sweep, const AnalysisOptions& opts = {});

struct CurvatureExponents {
    ExponentEstimate lambda1;
    ExponentEstimate lambda2;
    ExponentEstimate gaussian;
    ExponentEstimate twice_mean;
};

CurvatureExponents curvature_exponents(const ScalingSweep& sweep, const AnalysisOptions& opts = {});
CurvatureExponents curvature_exponents(const EosParams& params, std::span<const double> tau_grid,
                                       const AnalysisOptions& opts = {});

struct AngleExponents {
    ExponentEstimate phi_A;  // vapor branch
    ExponentEstimate phi_R;
    ExponentEstimate phi_A_liquid;
    ExponentEstimate phi_R_liquid;
    double worst_product_residual = 0.0;  // both branches
    double worst_small_angle_residual = 0.0;
    bool signs_opposed = false;  // sign(phi_R) = -sign(phi_A) at every node and branch
};

AngleExponents angle_exponents(const ScalingSweep& sweep, const AnalysisOptions& opts = {});
AngleExponents angle_exponents(const EosParams& params, std::span<const double> tau_grid,
                               const AnalysisOptions& opts = {});

struct RushbrookeReport {
    double delta = 0.0;  // alpha + 2 beta + gamma - 2
    double std_error = 0.0;
    bool inequality_holds = false;  // delta >= -3 std_error
    // gamma + beta - 1 >= (gamma - alpha)/2 >= 1 - alpha - beta
    std::array<double, 3> chain{};
    bool chain_ordered = false;  // each step holds within 3 std_error
};

RushbrookeReport rushbrooke_check(const ExponentEstimate& alpha, const ExponentEstimate& beta,
                                  const ExponentEstimate& gamma);

/// S'_A and V'_A share the exponent beta - 1 (vapor branch).
struct BranchDerivativeCheck {
    ExponentEstimate Vprime;
    ExponentEstimate Sprime;
    ExponentEstimate Pprime;
    bool pass = false;
};
BranchDerivativeCheck branch_derivative_check(const ScalingSweep& sweep, const AnalysisOptions& opts = {});

/// Exponents of the two bracket terms of the tangent identity coefficient,
/// expected 1 - alpha - beta and gamma + beta - 1.
struct BracketCheck {
    ExponentEstimate first;
    ExponentEstimate second;
    double expected_first = 0.0;
    double expected_second = 0.0;
    bool same_sign = false;
    bool pass = false;
};
BracketCheck bracket_check(const ScalingSweep& sweep, const AnalysisOptions& opts = {});

}  // namespace gibbsgeo
