#pragma once

// The rolling tangent plane of the coexistence region, its ruling lines and
// the edge of regression those lines are tangent to.

#include <vector>

#include "gibbsgeo/coexistence.hpp"
#include "gibbsgeo/geometry.hpp"

namespace gibbsgeo {

/// Plane n . (S, V, E) + offset = 0.
struct Plane {
    Vec3 normal = Vec3::Zero();
    double offset = 0.0;

    double residual(const Vec3& x) const { return normal.dot(x) + offset; }
};

/// -T S + P(T) V + E - mu(T) = 0
struct TangentPlane {
    double T = 0.0;
    Plane plane;
};

struct RulingLine {
    Vec3 anchor = Vec3::Zero();     // on the edge of regression
    Vec3 direction = Vec3::Zero();  // (P', 1, -P + T P')
};

struct EdgePoint {
    double T = 0.0;
    double S = 0.0;
    double V = 0.0;
    double E = 0.0;

    Vec3 position() const { return {S, V, E}; }
};

inline constexpr double default_psecond_floor = 1e-10;

Vec3 position_of(const ThermoState& s);

TangentPlane tangent_plane(const SaturationCurve& curve, double T);

/// -S + P'(T) V - mu'(T) = 0, the T-derivative of the tangent plane.
Plane derivative_plane(const CoexistencePoint& point);

/// P''(T) V - mu''(T) = 0.
Plane second_derivative_plane(const SaturationCurve& curve, std::size_t index);

Vec3 ruling_direction(const CoexistencePoint& point);

/// Throws SingularError when |P''| is below the floor.
EdgePoint edge_point(const SaturationCurve& curve, double T,
                     double psecond_floor = default_psecond_floor);

RulingLine ruling_line(const SaturationCurve& curve, double T,
                       double psecond_floor = default_psecond_floor);

/// (-mu', 0, -T mu' + mu) + V_A (P', 1, -P + T P').
Vec3 reconstruct_branch(const SaturationCurve& curve, double T, Branch branch);

/// Max-norm difference between (S'_A/V'_A, 1, U'_A/V'_A) and
/// k (1, 0, T) + (P', 1, -P + T P') with k = (dS/dT)_V / V'_A - (dP/dV)_T V'_A.
double tangent_identity_residual(const SaturationCurve& curve, double T, Branch branch);

/// The two terms of k above: (dS/dT)_V / V'_A and -(dP/dV)_T V'_A.
std::pair<double, double> tangent_identity_terms(const EosParams& params,
                                                 const CoexistencePoint& point, Branch branch);

/// |(e - x_L) x (x_G - x_L)| / (|e - x_L| |x_G - x_L|).
double collinearity_residual(const SaturationCurve& curve, double T,
                             double psecond_floor = default_psecond_floor);

/// Largest |plane residual| of the edge point over the three planes.
double edge_plane_residual(const SaturationCurve& curve, double T,
                           double psecond_floor = default_psecond_floor);

/// Angle (radians, in [0, pi/2]) between the grid-differenced edge tangent
/// and the ruling direction at every node. Nodes whose 5-point stencil
/// touches a singular edge point get NaN.
std::vector<double> edge_tangent_angles(const SaturationCurve& curve,
                                        double psecond_floor = default_psecond_floor);

/// Angle between two lines (direction sign ignored).
double line_angle(const Vec3& a, const Vec3& b);

}  // namespace gibbsgeo
