#include "gibbsgeo/coexistence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "gibbsgeo/error.hpp"

namespace gibbsgeo {

namespace {

constexpr double b = vdw::covolume;

double bracket_root(auto&& f, double lo, double hi, const char* what) {
    boost::uintmax_t max_iter = 200;
    const auto [r_lo, r_hi] = boost::math::tools::toms748_solve(
        f, lo, hi, boost::math::tools::eps_tolerance<double>(52), max_iter);
    if (max_iter >= 200) {
        throw ConvergenceError(fmt::format("{}: bracketed root search did not converge", what));
    }
    return 0.5 * (r_lo + r_hi);
}

// Pressure and chemical-potential differences between liquid and vapor
// volumes at fixed T, written with the common factor (V_G - V_L) pulled
// out so no O(1) terms cancel.
struct Mismatch {
    double dP;   // P(V_L) - P(V_G)
    double dmu;  // mu(V_L) - mu(V_G)
};

Mismatch mismatch(double T, double VL, double VG) {
    const double dV = VG - VL;
    const double xl = VL - b;
    const double xg = VG - b;
    const double dP = dV * (T / (xl * xg) - vdw::attraction * (VL + VG) / (VL * VL * VG * VG));
    const double dmu = dV * (-2.0 * vdw::attraction / (VL * VG) + T * b / (xl * xg)) -
                       T * std::log1p(-dV / xg);
    return {dP, dmu};
}

void check_subcritical(double T) {
    if (!(T > 0.0)) {
        throw DomainError(fmt::format("temperature must be positive, got T={}", T));
    }
    if (!(T < vdw::critical_temperature)) {
        throw DomainError(fmt::format("no coexistence at or above the critical temperature, T={}", T));
    }
}

// Volume on the requested branch of the isotherm where P(T, V) = p.
double volume_at_pressure(const EosParams& params, double T, double p, const SpinodalVolumes& sp,
                          bool vapor) {
    auto f = [&](double V) { return pressure(params, T, V) - p; };
    if (vapor) {
        return bracket_root(f, sp.vapor, b + T / p + 1.0, "vapor volume");
    }
    // P > p for V - b < T / (p + 81/8) since (9/8)/V^2 < 81/8 above the covolume.
    const double lo = b + T / (p + 81.0 / 8.0 + 1.0);
    return bracket_root(f, lo, sp.liquid, "liquid volume");
}

// Equal-area initialisation: solve mu_L(p) = mu_G(p) for the pressure.
std::pair<double, double> cold_start(const EosParams& params, double T) {
    const SpinodalVolumes sp = spinodal(params, T);
    // Liquid roots exist above the local minimum of the isotherm, vapor roots below its local maximum.
    const double p_hi = pressure(params, T, sp.vapor);
    const double p_lo = std::max(pressure(params, T, sp.liquid), 1e-10 * p_hi);

    auto g = [&](double p) {
        const double VL = volume_at_pressure(params, T, p, sp, false);
        const double VG = volume_at_pressure(params, T, p, sp, true);
        return chemical_potential(params, T, VL) - chemical_potential(params, T, VG);
    };
    // Shrink the endpoints inward by a hair so both branch volumes stay off the spinodal.
    const double span = p_hi - p_lo;
    const double lo = p_lo + 1e-12 * span;
    const double hi = p_hi - 1e-12 * span;
    const double p = bracket_root(g, lo, hi, "equal-area pressure");
    return {volume_at_pressure(params, T, p, sp, false), volume_at_pressure(params, T, p, sp, true)};
}

struct NewtonResult {
    double VL;
    double VG;
    int iterations;
    bool converged;
    double residual;
};

NewtonResult newton_polish(const EosParams& params, double T, double VL, double VG,
                           const SolverOptions& opts) {
    auto norm = [](const Mismatch& m) { return std::max(std::abs(m.dP), std::abs(m.dmu)); };
    Mismatch m = mismatch(T, VL, VG);
    double res = norm(m);
    int extra = 0;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        const double aL = dP_dV_T(params, T, VL);
        const double aG = dP_dV_T(params, T, VG);
        // d(mu)/dV at fixed T is V (dP/dV)_T.
        const double j11 = aL, j12 = -aG, j21 = VL * aL, j22 = -VG * aG;
        const double det = j11 * j22 - j12 * j21;
        if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
            return {VL, VG, it, false, res};
        }
        double sL = -(j22 * m.dP - j12 * m.dmu) / det;
        double sG = -(-j21 * m.dP + j11 * m.dmu) / det;

        // Damp until the iterate stays ordered and above the covolume.
        double step = 1.0;
        double nVL = VL + sL, nVG = VG + sG;
        while (!(nVL > b && nVG > nVL) && step > 1e-6) {
            step *= 0.5;
            nVL = VL + step * sL;
            nVG = VG + step * sG;
        }
        if (!(nVL > b && nVG > nVL)) {
            return {VL, VG, it, false, res};
        }
        const Mismatch nm = mismatch(T, nVL, nVG);
        const double nres = norm(nm);
        const bool tiny_step = std::abs(nVL - VL) <= 4e-16 * VL && std::abs(nVG - VG) <= 4e-16 * VG;
        VL = nVL;
        VG = nVG;
        m = nm;
        res = nres;
        if (res <= opts.residual_tol) {
            // A couple of extra iterations settle the last bits.
            if (tiny_step || ++extra > 2) {
                return {VL, VG, it, true, res};
            }
        }
    }
    return {VL, VG, opts.max_iterations, res <= opts.residual_tol, res};
}

CoexistencePoint assemble(const EosParams& params, double T, double VL, double VG, int iterations) {
    CoexistencePoint p;
    p.T = T;
    p.liquid = state_from_TV(params, T, VL);
    p.vapor = state_from_TV(params, T, VG);
    p.P_sat = p.vapor.P;
    p.mu_sat = p.vapor.mu;
    p.Pprime = (p.vapor.S - p.liquid.S) / (p.vapor.V - p.liquid.V);

    const double cT = params.c / T;
    p.Vprime_L = (p.Pprime - dP_dT_V(params, T, VL)) / dP_dV_T(params, T, VL);
    p.Vprime_G = (p.Pprime - dP_dT_V(params, T, VG)) / dP_dV_T(params, T, VG);
    p.Sprime_L = cT + p.Vprime_L / (VL - b);
    p.Sprime_G = cT + p.Vprime_G / (VG - b);
    p.muprime = -p.vapor.S + p.vapor.V * p.Pprime;
    p.iterations = iterations;
    return p;
}

}  // namespace

const ThermoState& state_of(const CoexistencePoint& p, Branch branch) {
    return branch == Branch::vapor ? p.vapor : p.liquid;
}

double vprime_of(const CoexistencePoint& p, Branch branch) {
    return branch == Branch::vapor ? p.Vprime_G : p.Vprime_L;
}

double sprime_of(const CoexistencePoint& p, Branch branch) {
    return branch == Branch::vapor ? p.Sprime_G : p.Sprime_L;
}

SpinodalVolumes spinodal(const EosParams& params, double T) {
    params.validate();
    check_subcritical(T);
    // (dP/dV)_T = 0  <=>  4 T V^3 = 9 (V - b)^2
    auto f = [T](double V) {
        const double x = V - b;
        return 4.0 * T * V * V * V - 9.0 * x * x;
    };
    SpinodalVolumes sp;
    sp.liquid = bracket_root(f, b, 1.0, "liquid spinodal");
    sp.vapor = bracket_root(f, 1.0, 9.0 / (4.0 * T), "vapor spinodal");
    return sp;
}

CoexistencePoint solve_coexistence(const EosParams& params, double T, const SolverOptions& opts,
                                   std::optional<std::pair<double, double>> guess) {
    params.validate();
    check_subcritical(T);
    if (T < opts.T_min) {
        throw DomainError(fmt::format("T={} is below the configured T_min={}", T, opts.T_min));
    }

    if (guess && guess->first > b && guess->second > guess->first) {
        const NewtonResult r = newton_polish(params, T, guess->first, guess->second, opts);
        if (r.converged && r.VL < 1.0 && r.VG > 1.0) {
            return assemble(params, T, r.VL, r.VG, r.iterations);
        }
    }

    const auto [VL0, VG0] = cold_start(params, T);
    const NewtonResult r = newton_polish(params, T, VL0, VG0, opts);
    if (!r.converged) {
        throw ConvergenceError(fmt::format(
            "coexistence at T={} did not converge after {} iterations (residual {:.3e}, V_L={}, V_G={})",
            T, r.iterations, r.residual, r.VL, r.VG));
    }
    return assemble(params, T, r.VL, r.VG, r.iterations);
}

std::size_t SaturationCurve::index_of(double T) const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (std::abs(points[i].T - T) <= 1e-12 * std::max(1.0, std::abs(T))) {
            return i;
        }
    }
    throw std::out_of_range(fmt::format("T={} is not a node of the saturation curve", T));
}

std::vector<double> fd_weights(double x0, std::span<const double> nodes, int order) {
    // Fornberg (1988), Math. Comp. 51, 699.
    const int n = static_cast<int>(nodes.size()) - 1;
    if (n < order) {
        throw std::invalid_argument("fd_weights: too few nodes for the requested order");
    }
    std::vector<std::vector<double>> c(n + 1, std::vector<double>(order + 1, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) {
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n + 1);
    for (int i = 0; i <= n; ++i) {
        w[i] = c[i][order];
    }
    return w;
}

SaturationCurve saturation_scan(const EosParams& params, std::span<const double> T_grid,
                                const ScanOptions& opts) {
    const std::size_t n = T_grid.size();
    if (n < 5) {
        throw std::invalid_argument("saturation_scan needs at least 5 grid nodes");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(T_grid[i] > T_grid[i - 1])) {
            throw std::invalid_argument("saturation_scan: temperature grid must be strictly increasing");
        }
    }
    if (!(T_grid.back() < 1.0)) {
        throw DomainError("saturation_scan: grid must stay below the critical temperature");
    }

    SaturationCurve curve;
    curve.params = params;
    curve.points.reserve(n);
    std::optional<std::pair<double, double>> guess;
    for (std::size_t i = 0; i < n; ++i) {
        const double T = T_grid[i];
        try {
            curve.points.push_back(solve_coexistence(params, T, opts.solver, guess));
        } catch (const std::exception& e) {
            throw ConvergenceError(fmt::format("saturation_scan node {} (T={}): {}", i, T, e.what()));
        }
        // Next guess: the branches open like (1 - T)^(1/2) around V = 1.
        const auto& p = curve.points.back();
        if (i + 1 < n) {
            const double ratio = std::sqrt((1.0 - T_grid[i + 1]) / (1.0 - T));
            guess = std::make_pair(1.0 + (p.liquid.V - 1.0) * ratio, 1.0 + (p.vapor.V - 1.0) * ratio);
        }
    }

    curve.Psecond.resize(n);
    curve.musecond.resize(n);
    if (opts.second_derivative == SecondDerivativeMethod::local) {
        for (std::size_t i = 0; i < n; ++i) {
            const CentralDifferences d = local_differences(params, T_grid[i], opts.local_step, opts.solver);
            curve.Psecond[i] = d.Psecond;
            curve.musecond[i] = d.musecond;
        }
        return curve;
    }

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t first = std::min(i >= 2 ? i - 2 : 0, n - 5);
        const auto nodes = T_grid.subspan(first, 5);
        const std::vector<double> w = fd_weights(T_grid[i], nodes, 1);
        double p2 = 0.0, m2 = 0.0;
        for (std::size_t k = 0; k < 5; ++k) {
            p2 += w[k] * curve.points[first + k].Pprime;
            m2 += w[k] * curve.points[first + k].muprime;
        }
        curve.Psecond[i] = p2;
        curve.musecond[i] = m2;
    }
    return curve;
}

CentralDifferences local_differences(const EosParams& params, double T, double h,
                                     const SolverOptions& opts) {
    check_subcritical(T);
    CentralDifferences out;
    out.step = std::min(h, 0.25 * (1.0 - T));
    const double s = out.step;
    SolverOptions relaxed = opts;
    relaxed.T_min = std::min(opts.T_min, T - 2.0 * s);

    const CoexistencePoint m2 = solve_coexistence(params, T - 2.0 * s, relaxed);
    const CoexistencePoint m1 = solve_coexistence(params, T - s, relaxed);
    const CoexistencePoint p1 = solve_coexistence(params, T + s, relaxed);
    const CoexistencePoint p2 = solve_coexistence(params, T + 2.0 * s, relaxed);

    auto d1 = [s](double fm2, double fm1, double fp1, double fp2) {
        return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * s);
    };
    out.dPsat = d1(m2.P_sat, m1.P_sat, p1.P_sat, p2.P_sat);
    out.Psecond = d1(m2.Pprime, m1.Pprime, p1.Pprime, p2.Pprime);
    out.musecond = d1(m2.muprime, m1.muprime, p1.muprime, p2.muprime);
    return out;
}

ClausiusClapeyronResidual clausius_clapeyron_residual(const EosParams& params,
                                                      const CoexistencePoint& point, double h,
                                                      const SolverOptions& opts) {
    const double slope = (point.vapor.S - point.liquid.S) / (point.vapor.V - point.liquid.V);
    ClausiusClapeyronResidual r;
    r.construction = std::abs(point.Pprime - slope) / std::abs(point.Pprime);
    const CentralDifferences d = local_differences(params, point.T, h, opts);
    r.finite_difference = std::abs(d.dPsat - slope) / std::abs(point.Pprime);
    return r;
}

double orthogonality_residual(const CoexistencePoint& p) {
    const double dS = p.vapor.S - p.liquid.S;
    const double dV = p.vapor.V - p.liquid.V;
    const double dU = p.vapor.U - p.liquid.U;
    const double T = p.T;
    const double P = p.P_sat;
    return std::abs(T * dS - P * dV - dU) / (std::abs(T * dS) + std::abs(P * dV) + std::abs(dU));
}

double gibbs_duhem_residual(const CoexistencePoint& p) {
    double worst = 0.0;
    for (const ThermoState* s : {&p.liquid, &p.vapor}) {
        const double scale = std::abs(s->S) + std::abs(s->V * p.Pprime) + std::abs(p.muprime);
        worst = std::max(worst, std::abs(p.muprime + s->S - s->V * p.Pprime) / scale);
    }
    return worst;
}

double energy_slope_residual(const CoexistencePoint& p) {
    const double lhs = -p.P_sat + p.T * p.Pprime;
    const double rhs = (p.vapor.U - p.liquid.U) / (p.vapor.V - p.liquid.V);
    return std::abs(lhs - rhs) / (std::abs(p.P_sat) + std::abs(p.T * p.Pprime));
}

double second_derivative_residual(const SaturationCurve& curve, std::size_t index) {
    const CoexistencePoint& p = curve.points.at(index);
    const double p2 = curve.Psecond.at(index);
    const double m2 = curve.musecond.at(index);
    double worst = 0.0;
    for (const Branch b : {Branch::liquid, Branch::vapor}) {
        const ThermoState& s = state_of(p, b);
        const double vp = vprime_of(p, b);
        const double rhs = -dS_dT_V(curve.params, s.T, s.V) + dP_dV_T(curve.params, s.T, s.V) * vp * vp;
        worst = std::max(worst, std::abs(m2 - s.V * p2 - rhs) / std::abs(rhs));
    }
    return worst;
}

}  // namespace gibbsgeo
