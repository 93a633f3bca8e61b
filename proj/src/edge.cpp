#include "gibbsgeo/edge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "gibbsgeo/error.hpp"

namespace gibbsgeo {

Vec3 position_of(const ThermoState& s) { return {s.S, s.V, s.U}; }

TangentPlane tangent_plane(const SaturationCurve& curve, double T) {
    const CoexistencePoint& p = curve.points.at(curve.index_of(T));
    TangentPlane tp;
    tp.T = p.T;
    tp.plane.normal = Vec3(-p.T, p.P_sat, 1.0);
    tp.plane.offset = -p.mu_sat;
    return tp;
}

Plane derivative_plane(const CoexistencePoint& point) {
    return Plane{Vec3(-1.0, point.Pprime, 0.0), -point.muprime};
}

Plane second_derivative_plane(const SaturationCurve& curve, std::size_t index) {
    return Plane{Vec3(0.0, curve.Psecond.at(index), 0.0), -curve.musecond.at(index)};
}

Vec3 ruling_direction(const CoexistencePoint& point) {
    return {point.Pprime, 1.0, -point.P_sat + point.T * point.Pprime};
}

EdgePoint edge_point(const SaturationCurve& curve, double T, double psecond_floor) {
    const std::size_t i = curve.index_of(T);
    const CoexistencePoint& p = curve.points[i];
    const double p2 = curve.Psecond[i];
    const double m2 = curve.musecond[i];
    if (!(std::abs(p2) > psecond_floor)) {
        throw SingularError(fmt::format("edge of regression is singular at T={} (P''={:.3e})", p.T, p2));
    }
    const double ratio = m2 / p2;
    EdgePoint e;
    e.T = p.T;
    e.S = ratio * p.Pprime - p.muprime;
    e.V = ratio;
    e.E = (p.T * p.Pprime - p.P_sat) * ratio - p.T * p.muprime + p.mu_sat;
    return e;
}

RulingLine ruling_line(const SaturationCurve& curve, double T, double psecond_floor) {
    const CoexistencePoint& p = curve.points.at(curve.index_of(T));
    return RulingLine{edge_point(curve, T, psecond_floor).position(), ruling_direction(p)};
}

Vec3 reconstruct_branch(const SaturationCurve& curve, double T, Branch branch) {
    const CoexistencePoint& p = curve.points.at(curve.index_of(T));
    const Vec3 base(-p.muprime, 0.0, -p.T * p.muprime + p.mu_sat);
    return base + state_of(p, branch).V * ruling_direction(p);
}

std::pair<double, double> tangent_identity_terms(const EosParams& params,
                                                 const CoexistencePoint& point, Branch branch) {
    const ThermoState& s = state_of(point, branch);
    const double vp = vprime_of(point, branch);
    if (vp == 0.0) {
        throw SingularError(fmt::format("V'_A vanishes at T={}", point.T));
    }
    return {dS_dT_V(params, s.T, s.V) / vp, -dP_dV_T(params, s.T, s.V) * vp};
}

double tangent_identity_residual(const SaturationCurve& curve, double T, Branch branch) {
    const CoexistencePoint& p = curve.points.at(curve.index_of(T));
    const auto [first, second] = tangent_identity_terms(curve.params, p, branch);
    const double vp = vprime_of(p, branch);
    const double sp = sprime_of(p, branch);
    // U'_A = T S'_A - P V'_A along the branch.
    const Vec3 lhs(sp / vp, 1.0, p.T * sp / vp - p.P_sat);
    const Vec3 rhs = (first + second) * Vec3(1.0, 0.0, p.T) + ruling_direction(p);
    return (lhs - rhs).cwiseAbs().maxCoeff();
}

double collinearity_residual(const SaturationCurve& curve, double T, double psecond_floor) {
    const CoexistencePoint& p = curve.points.at(curve.index_of(T));
    const Vec3 e = edge_point(curve, T, psecond_floor).position();
    const Vec3 l = position_of(p.liquid);
    const Vec3 g = position_of(p.vapor);
    const Vec3 a = e - l;
    const Vec3 b = g - l;
    return a.cross(b).norm() / (a.norm() * b.norm());
}

double edge_plane_residual(const SaturationCurve& curve, double T, double psecond_floor) {
    const std::size_t i = curve.index_of(T);
    const Vec3 e = edge_point(curve, T, psecond_floor).position();
    const double r1 = tangent_plane(curve, T).plane.residual(e);
    const double r2 = derivative_plane(curve.points[i]).residual(e);
    const double r3 = second_derivative_plane(curve, i).residual(e);
    return std::max({std::abs(r1), std::abs(r2), std::abs(r3)});
}

double line_angle(const Vec3& a, const Vec3& b) {
    const double angle = std::atan2(a.cross(b).norm(), a.dot(b));
    return std::min(angle, M_PI - angle);
}

std::vector<double> edge_tangent_angles(const SaturationCurve& curve, double psecond_floor) {
    const std::size_t n = curve.size();
    std::vector<double> temps(n);
    std::vector<Vec3> edge(n);
    std::vector<bool> ok(n, true);
    for (std::size_t i = 0; i < n; ++i) {
        temps[i] = curve.points[i].T;
        try {
            edge[i] = edge_point(curve, temps[i], psecond_floor).position();
        } catch (const SingularError&) {
            ok[i] = false;
        }
    }

    std::vector<double> angles(n, std::numeric_limits<double>::quiet_NaN());
    if (n < 5) {
        return angles;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t first = std::min(i >= 2 ? i - 2 : 0, n - 5);
        if (!std::all_of(ok.begin() + first, ok.begin() + first + 5, [](bool b) { return b; })) {
            continue;
        }
        const std::vector<double> w =
            fd_weights(temps[i], std::span<const double>(temps).subspan(first, 5), 1);
        Vec3 tangent = Vec3::Zero();
        for (std::size_t k = 0; k < 5; ++k) {
            tangent += w[k] * edge[first + k];
        }
        angles[i] = line_angle(tangent, ruling_direction(curve.points[i]));
    }
    return angles;
}

}  // namespace gibbsgeo
