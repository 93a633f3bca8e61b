#include <cmath>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "gibbsgeo/coexistence.hpp"
#include "gibbsgeo/geometry.hpp"
#include "oracle.hpp"

using namespace gibbsgeo;

namespace {

struct Local {
    ThermoState s;
    DerivativeBundle d;
    FundamentalForms forms;
    CurvatureSpectrum spec;
};

Local at(double T, double V) {
    const EosParams p;
    Local l;
    l.s = state_from_TV(p, T, V);
    l.d = derivative_bundle(p, l.s);
    l.forms = fundamental_forms(l.s, l.d);
    l.spec = principal_curvatures(l.forms);
    return l;
}

// Random state strictly inside the mechanically stable region.
Local random_stable() {
    for (;;) {
        const double T = oracle::uniform(0.5, 2.0);
        const double V = oracle::log_uniform(0.4, 20.0);
        if (oracle::derivative([T](double v) { return oracle::vdw_pressure(T, v); }, V, 1e-5) < -1e-3) {
            return at(T, V);
        }
    }
}

// Principal curvatures of X(T, V) = (S, V, U) in the (T, V) chart, from
// hand-derived partials of S and U and a generic generalized eigensolver.
struct ChartCurvature {
    double k1, k2;
    Vec3 dir1, dir2;
};

ChartCurvature chart_curvatures(double T, double V, double c = 1.5) {
    const double w = V - 1.0 / 3.0;
    const Vec3 XT(c / T, 0.0, c);
    const Vec3 XV(1.0 / w, 1.0, 9.0 / (8.0 * V * V));
    const Vec3 XTT(-c / (T * T), 0.0, 0.0);
    const Vec3 XTV(0.0, 0.0, 0.0);
    const Vec3 XVV(-1.0 / (w * w), 0.0, -9.0 / (4.0 * V * V * V));
    Vec3 n = XT.cross(XV).normalized();
    if (n[2] < 0) n = -n;  // upward, so a convex graph has positive curvatures
    Eigen::Matrix2d G, L;
    G << XT.dot(XT), XT.dot(XV), XT.dot(XV), XV.dot(XV);
    L << XTT.dot(n), XTV.dot(n), XTV.dot(n), XVV.dot(n);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(L, G);
    const Eigen::Vector2d a = es.eigenvectors().col(0);
    const Eigen::Vector2d b = es.eigenvectors().col(1);
    return {es.eigenvalues()[0], es.eigenvalues()[1], a[0] * XT + a[1] * XV, b[0] * XT + b[1] * XV};
}

double line_sine(const Vec3& a, const Vec3& b) { return a.cross(b).norm() / (a.norm() * b.norm()); }

}  // namespace

TEST(Geometry, BasisAndNormal) {
    const Local crit = at(1.0, 1.0);
    const TangentBasis b = tangent_basis(crit.s);
    EXPECT_NEAR((b.e_S - Vec3(1, 0, 1)).norm(), 0.0, 1e-15);
    EXPECT_NEAR((b.e_V - Vec3(0, 1, -3.0 / 8.0)).norm(), 0.0, 1e-15);
    for (int i = 0; i < 100; ++i) {
        const Local l = random_stable();
        const TangentBasis tb = tangent_basis(l.s);
        const Vec3 g = unit_normal(l.s).g;
        EXPECT_LE(std::abs(g.dot(tb.e_S)), 1e-14 * tb.e_S.norm());
        EXPECT_LE(std::abs(g.dot(tb.e_V)), 1e-14 * tb.e_V.norm());
        EXPECT_NEAR(g.norm(), 1.0, 1e-14);
        // a curve tangent (s', v', T s' - P v') decomposes exactly
        const double sp = oracle::uniform(-1, 1), vp = oracle::uniform(-1, 1);
        const Vec3 tangent(sp, vp, l.s.T * sp - l.s.P * vp);
        EXPECT_LE((tb.embed(Vec2(sp, vp)) - tangent).norm(), 1e-15 * (1.0 + tangent.norm()));
        EXPECT_NEAR(l.forms.A.determinant(), 1.0 + l.s.T * l.s.T + l.s.P * l.s.P,
                    1e-13 * l.forms.A.determinant());
    }
}

TEST(Geometry, CurvaturesMatchIndependentChart) {
    for (int i = 0; i < 300; ++i) {
        const double T = oracle::uniform(0.5, 2.0);
        const double V = oracle::log_uniform(0.4, 20.0);
        if (!mechanically_stable(EosParams{}, T, V)) continue;
        const Local l = at(T, V);
        const ChartCurvature ref = chart_curvatures(T, V);
        const double scale = std::max(std::abs(ref.k1), std::abs(ref.k2));
        EXPECT_LE(std::abs(l.spec.lambda1 - ref.k1), 1e-10 * scale) << "T=" << T << " V=" << V;
        EXPECT_LE(std::abs(l.spec.lambda2 - ref.k2), 1e-10 * scale);
        const TangentBasis tb = tangent_basis(l.s);
        if (ref.k2 - ref.k1 > 1e-6 * scale) {
            EXPECT_LE(line_sine(tb.embed(l.spec.d1), ref.dir1), 1e-8);
            EXPECT_LE(line_sine(tb.embed(l.spec.d2), ref.dir2), 1e-8);
        }
    }
}

TEST(Geometry, EigenResidualAndOrthonormality) {
    for (int i = 0; i < 1000; ++i) {
        const Local l = random_stable();
        const Mat2& A = l.forms.A;
        const Mat2& B = l.forms.B;
        const double nb = B.norm();
        EXPECT_LE((B * l.spec.d1 - l.spec.lambda1 * A * l.spec.d1).norm(), 1e-12 * nb);
        EXPECT_LE((B * l.spec.d2 - l.spec.lambda2 * A * l.spec.d2).norm(), 1e-12 * nb);
        EXPECT_NEAR(l.spec.d1.dot(A * l.spec.d1), 1.0, 1e-13);
        EXPECT_NEAR(l.spec.d2.dot(A * l.spec.d2), 1.0, 1e-13);
        EXPECT_LE(std::abs(l.spec.d1.dot(A * l.spec.d2)), 1e-13);
        EXPECT_LE(std::abs(conjugacy_form(l.spec.d1, l.spec.d2, B)), 1e-12 * nb);
        EXPECT_GE(l.spec.d1[1], 0.0);
        EXPECT_LT(l.spec.d1[0] * l.spec.d2[1] - l.spec.d1[1] * l.spec.d2[0], 0.0);
        EXPECT_LE(std::abs(B(0, 1) - B(1, 0)), 1e-12 * nb);
    }
}

TEST(Geometry, GaussAndMeanCrossPaths) {
    for (int i = 0; i < 1000; ++i) {
        const Local l = random_stable();
        const double K = gaussian_curvature(l.s, l.d);
        const double H = mean_curvature(l.s, l.d);
        const double prod = l.spec.lambda1 * l.spec.lambda2;
        const double sum = l.spec.lambda1 + l.spec.lambda2;
        EXPECT_LE(std::abs(prod - K), 1e-10 * K);
        EXPECT_LE(std::abs(sum - 2.0 * H), 1e-10 * 2.0 * H);
        const double detratio = l.forms.B.determinant() / l.forms.A.determinant();
        EXPECT_LE(std::abs(prod - detratio), 1e-12 * std::abs(detratio) + 1e-14 * sum * sum);
        const double trace = (l.forms.A.inverse() * l.forms.B).trace();
        EXPECT_LE(std::abs(sum - trace), 1e-12 * std::abs(trace));
        EXPECT_GT(K, 0.0);
        EXPECT_GT(H, 0.0);
    }
    const Local l = at(0.9, 3.0);
    EXPECT_LE(std::abs(gaussian_curvature(l.s, l.d) - l.spec.lambda1 * l.spec.lambda2),
              1e-10 * gaussian_curvature(l.s, l.d));
}

TEST(Geometry, CriticalPointIsParabolic) {
    const Local l = at(1.0, 1.0);
    EXPECT_LE(std::abs(gaussian_curvature(l.s, l.d)), 1e-15);
    EXPECT_LE(std::abs(l.forms.B.determinant()), 1e-15);
    EXPECT_LE(std::abs(l.spec.lambda1), 1e-15);
    EXPECT_GT(l.spec.lambda2, 0.0);
}

TEST(Geometry, UmbilicForms) {
    FundamentalForms f;
    f.A << 2.0, 0.3, 0.3, 1.5;
    for (double kappa : {-2.0, 0.0, 0.7}) {
        f.B = kappa * f.A;
        const CurvatureSpectrum s = principal_curvatures(f);
        EXPECT_NEAR(s.lambda1, kappa, 1e-14);
        EXPECT_NEAR(s.lambda2, kappa, 1e-14);
        EXPECT_TRUE(s.umbilic);
    }
}

TEST(Geometry, EulerFormula) {
    for (int i = 0; i < 50; ++i) {
        const Local l = random_stable();
        EXPECT_DOUBLE_EQ(directional_curvature(l.spec, 0.0), l.spec.lambda1);
        EXPECT_NEAR(directional_curvature(l.spec, M_PI / 2), l.spec.lambda2, 1e-15 * l.spec.lambda2);
        for (int k = 0; k < 100; ++k) {
            const double phi = oracle::uniform(-M_PI, M_PI);
            const Vec2 u = direction_at(l.spec, phi);
            EXPECT_LE(std::abs(u.dot(l.forms.B * u) - directional_curvature(l.spec, phi)), 1e-12 * l.forms.B.norm());
        }
    }
}

TEST(Geometry, AngleInversion) {
    const Local l = at(0.9, 3.0);
    EXPECT_NEAR(angle_of(l.spec.d1, l.spec, l.forms.A), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(angle_of(l.spec.d2, l.spec, l.forms.A)), M_PI / 2, 1e-12);
    EXPECT_NEAR(angle_of(-l.spec.d1, l.spec, l.forms.A), 0.0, 1e-12);
    for (int k = 0; k < 200; ++k) {
        const Vec2 u(oracle::uniform(-1, 1), oracle::uniform(-1, 1));
        const double phi = angle_of(u, l.spec, l.forms.A);
        EXPECT_NEAR(phi, angle_of(-3.0 * u, l.spec, l.forms.A), 1e-14);
        const Vec2 back = direction_at(l.spec, phi);
        const Vec2 un = u / std::sqrt(u.dot(l.forms.A * u));
        EXPECT_LE(std::min((back - un).norm(), (back + un).norm()), 1e-12);
    }
    EXPECT_THROW(angle_of(Vec2::Zero(), l.spec, l.forms.A), std::invalid_argument);
}

TEST(Geometry, NearCriticalMeanCurvatureIsMaximal) {
    const EosParams p;
    const CoexistencePoint c = solve_coexistence(p, 1.0 - 1e-3);
    const DerivativeBundle d = derivative_bundle(p, c.vapor);
    const CurvatureSpectrum spec = principal_curvatures(fundamental_forms(c.vapor, d));
    EXPECT_LE(spec.lambda1, 1e-2 * spec.lambda2);
    EXPECT_LE(std::abs(2.0 * mean_curvature(c.vapor, d) - spec.lambda2), 1e-2 * spec.lambda2);
}
