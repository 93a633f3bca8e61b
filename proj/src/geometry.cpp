#include "gibbsgeo/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace gibbsgeo {

namespace {

// a*b - c*d with one rounding error (Kahan).
double diff_of_products(double a, double b, double c, double d) {
    const double cd = c * d;
    const double err = std::fma(-c, d, cd);
    const double dop = std::fma(a, b, -cd);
    return dop + err;
}

double metric_factor(const ThermoState& s) { return 1.0 + s.T * s.T + s.P * s.P; }

// Unit eigenvector of the symmetric 2x2 matrix m for eigenvalue lambda.
Vec2 symmetric_eigenvector(const Mat2& m, double lambda) {
    const Vec2 a(m(0, 1), lambda - m(0, 0));
    const Vec2 b(lambda - m(1, 1), m(0, 1));
    const Vec2& v = a.squaredNorm() >= b.squaredNorm() ? a : b;
    return v.normalized();
}

}  // namespace

TangentBasis tangent_basis(const ThermoState& state) {
    return TangentBasis{Vec3(1.0, 0.0, state.T), Vec3(0.0, 1.0, -state.P)};
}

NormalVector unit_normal(const ThermoState& state) {
    return NormalVector{Vec3(state.T, -state.P, -1.0) / std::sqrt(metric_factor(state))};
}

FundamentalForms fundamental_forms(const ThermoState& state, const DerivativeBundle& d) {
    const double T = state.T;
    const double P = state.P;

    const double scale = std::max({std::abs(d.dT_dV_S), std::abs(d.dP_dS_V), 1.0});
    if (std::abs(d.dT_dV_S + d.dP_dS_V) > 1e-12 * scale) {
        throw std::logic_error(fmt::format(
            "Maxwell relation violated: (dT/dV)_S={} but -(dP/dS)_V={}", d.dT_dV_S, -d.dP_dS_V));
    }

    FundamentalForms f;
    f.A << 1.0 + T * T, -T * P, -T * P, 1.0 + P * P;

    const double inv_w = 1.0 / std::sqrt(metric_factor(state));
    const double off = 0.5 * (d.dT_dV_S - d.dP_dS_V);
    f.B << d.dT_dS_V, off, off, -d.dP_dV_S;
    f.B *= inv_w;
    return f;
}

CurvatureSpectrum principal_curvatures(const FundamentalForms& forms) {
    const Mat2& A = forms.A;
    const Mat2& B = forms.B;
    if (!(A(0, 0) > 0.0) || !(A.determinant() > 0.0)) {
        throw std::invalid_argument("first fundamental form is not positive definite");
    }

    // Reduce to the symmetric problem M y = lambda y with A = L L^T, M = L^-1 B L^-T.
    const double l11 = std::sqrt(A(0, 0));
    const double l21 = A(0, 1) / l11;
    const double det_a = diff_of_products(A(0, 0), A(1, 1), A(0, 1), A(1, 0));
    const double l22 = std::sqrt(det_a / A(0, 0));

    Mat2 l_inv;
    l_inv << 1.0 / l11, 0.0, -l21 / (l11 * l22), 1.0 / l22;
    Mat2 m = l_inv * B * l_inv.transpose();
    m(1, 0) = m(0, 1);

    const double det_m = diff_of_products(B(0, 0), B(1, 1), B(0, 1), B(1, 0)) / det_a;
    const double mean = 0.5 * (m(0, 0) + m(1, 1));
    const double half_gap = std::hypot(0.5 * (m(0, 0) - m(1, 1)), m(0, 1));

    CurvatureSpectrum spec;
    // The root of larger magnitude comes from the sum; the other from det/root.
    if (mean >= 0.0) {
        spec.lambda2 = mean + half_gap;
        spec.lambda1 = spec.lambda2 != 0.0 ? det_m / spec.lambda2 : 0.0;
    } else {
        spec.lambda1 = mean - half_gap;
        spec.lambda2 = det_m / spec.lambda1;
    }

    Vec2 y1;
    if (std::abs(spec.lambda2 - spec.lambda1) < 1e-13 * std::abs(spec.lambda2) || half_gap == 0.0) {
        spec.umbilic = true;
        y1 = Vec2(1.0, 0.0);
    } else {
        // Eigenvector of the better-separated eigenvalue is computed first.
        if (std::abs(spec.lambda1) <= std::abs(spec.lambda2)) {
            y1 = symmetric_eigenvector(m, spec.lambda1);
        } else {
            const Vec2 y2 = symmetric_eigenvector(m, spec.lambda2);
            y1 = Vec2(y2[1], -y2[0]);
        }
    }

    const Mat2 l_inv_t = l_inv.transpose();
    Vec2 d1 = l_inv_t * y1;
    if (d1[1] < 0.0 || (d1[1] == 0.0 && d1[0] < 0.0)) {
        d1 = -d1;
    }
    // A-orthogonal complement: (A d1)^T w = 0.
    const Vec2 ad1 = A * d1;
    Vec2 d2(ad1[1], -ad1[0]);
    d2 /= std::sqrt(d2.dot(A * d2));

    spec.d1 = d1;
    spec.d2 = d2;
    return spec;
}

double gaussian_curvature(const ThermoState& state, const DerivativeBundle& d) {
    const double w2 = metric_factor(state);
    return (-d.dP_dV_T / d.dS_dT_V) / (w2 * w2);
}

double mean_curvature(const ThermoState& state, const DerivativeBundle& d) {
    const double T = state.T;
    const double P = state.P;
    const double w2 = metric_factor(state);
    const double bracket = (1.0 + P * P) * d.dT_dS_V + 2.0 * T * P * d.dT_dV_S -
                           (1.0 + T * T) * d.dP_dV_S;
    return 0.5 * bracket / (w2 * std::sqrt(w2));
}

double directional_curvature(const CurvatureSpectrum& spec, double phi) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    return spec.lambda1 * c * c + spec.lambda2 * s * s;
}

double angle_of(const Vec2& tangent_coeffs, const CurvatureSpectrum& spec, const Mat2& A) {
    const double norm2 = tangent_coeffs.dot(A * tangent_coeffs);
    if (!(norm2 > 0.0)) {
        throw std::invalid_argument("angle_of: zero tangent vector");
    }
    Vec2 u = tangent_coeffs / std::sqrt(norm2);
    if (u[1] < 0.0 || (u[1] == 0.0 && u[0] < 0.0)) {
        u = -u;
    }
    const Vec2 au = A * u;
    return std::atan2(spec.d2.dot(au), spec.d1.dot(au));
}

Vec2 direction_at(const CurvatureSpectrum& spec, double phi) {
    return spec.d1 * std::cos(phi) + spec.d2 * std::sin(phi);
}

double conjugacy_form(const Vec2& dir_a, const Vec2& dir_b, const Mat2& B) {
    return dir_a.dot(B * dir_b);
}

}  // namespace gibbsgeo
