#pragma once

// Differential geometry of the energy surface E = U(S, V) embedded in
// (S, V, E) space. Tangent-plane quantities are expressed as coefficients
// in the basis (e_S, e_V).

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "gibbsgeo/eos.hpp"

namespace gibbsgeo {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;

struct TangentBasis {
    Vec3 e_S;  // (1, 0, T)
    Vec3 e_V;  // (0, 1, -P)

    /// Embeds tangent coefficients (s', v') as s' e_S + v' e_V.
    Vec3 embed(const Vec2& coeffs) const { return coeffs[0] * e_S + coeffs[1] * e_V; }
};

struct NormalVector {
    Vec3 g;  // unit, parallel to (T, -P, -1)
};

struct FundamentalForms {
    Mat2 A;  // first form, positive definite
    Mat2 B;  // second form, symmetric
};

struct CurvatureSpectrum {
    double lambda1 = 0.0;  // minimal curvature
    double lambda2 = 0.0;  // maximal curvature
    Vec2 d1 = Vec2::Zero();
    Vec2 d2 = Vec2::Zero();
    bool umbilic = false;
};

TangentBasis tangent_basis(const ThermoState& state);
NormalVector unit_normal(const ThermoState& state);

/// First and second fundamental forms. Throws std::logic_error if the
/// bundle violates the Maxwell relation beyond 1e-12 (relative).
FundamentalForms fundamental_forms(const ThermoState& state, const DerivativeBundle& d);

/// Generalized eigenproblem B d = lambda A d in closed form.
///
/// Directions are A-orthonormal. d1 has a non-negative e_V coefficient
/// (ties broken by a non-negative e_S coefficient) and d2 is oriented
/// so that det[d1 d2] < 0. When |lambda2 - lambda1| < 1e-13 |lambda2| the
/// spectrum is flagged umbilic and d1 is taken along e_S.
CurvatureSpectrum principal_curvatures(const FundamentalForms& forms);

/// K = lambda1 lambda2 from thermodynamic quantities.
double gaussian_curvature(const ThermoState& state, const DerivativeBundle& d);

/// H = (lambda1 + lambda2) / 2 from thermodynamic quantities.
double mean_curvature(const ThermoState& state, const DerivativeBundle& d);

/// Euler's formula: lambda1 cos^2 phi + lambda2 sin^2 phi.
double directional_curvature(const CurvatureSpectrum& spec, double phi);

/// Signed angle in (-pi, pi] between a tangent direction and d1.
///
/// The direction is first A-normalized and oriented so its e_V coefficient is
/// non-negative (e_S coefficient non-negative on ties), so a line and its
/// reverse give the same angle. Throws std::invalid_argument for a zero vector.
double angle_of(const Vec2& tangent_coeffs, const CurvatureSpectrum& spec, const Mat2& A);

/// Unit tangent d1 cos phi + d2 sin phi.
Vec2 direction_at(const CurvatureSpectrum& spec, double phi);

/// a^T B b.
double conjugacy_form(const Vec2& dir_a, const Vec2& dir_b, const Mat2& B);

}  // namespace gibbsgeo
