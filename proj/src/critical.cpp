#include "gibbsgeo/critical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "gibbsgeo/error.hpp"

namespace gibbsgeo {

namespace {

constexpr std::array<const char*, 12> kPartialLabels = {
    "dS_dT_P", "dS_dT_V", "dP_dT_V", "dS_dV_T", "dS_dP_V", "dV_dT_S",
    "dV_dT_P", "dS_dP_T", "dS_dV_P", "dP_dT_S", "dV_dP_T", "dV_dP_S"};

std::string suffixed(const std::string& label, Branch branch) {
    return branch == Branch::vapor ? label : label + "_L";
}

struct Recorder {
    std::map<std::string, ScalingSeries>& series;
    double tau;

    void operator()(const std::string& label, double value) const {
        ScalingSeries& s = series[label];
        s.label = label;
        s.tau.push_back(tau);
        s.values.push_back(value);
    }
};

ExponentEstimate fit(const ScalingSweep& sweep, const std::string& label, const AnalysisOptions& opts) {
    return fit_power_law(sweep.at(label), opts.window, opts.correction_exponent);
}

ExponentEstimate negated(ExponentEstimate e) {
    e.exponent = -e.exponent;
    e.intercept = -e.intercept;
    return e;
}

}  // namespace

ExponentEstimate fit_power_law(const ScalingSeries& series, FitWindow window,
                               std::optional<double> correction_exponent) {
    if (series.tau.size() != series.values.size()) {
        throw FitError(fmt::format("series '{}': tau and values differ in length", series.label));
    }
    if (!(window.lo > 0.0) || !(window.hi > window.lo)) {
        throw FitError(fmt::format("invalid fit window [{}, {}]", window.lo, window.hi));
    }
    const double slack = 1e-12;
    std::vector<double> x, y, corr;
    int sign = 0;
    double lo_seen = window.hi, hi_seen = window.lo;
    for (std::size_t i = 0; i < series.tau.size(); ++i) {
        const double t = series.tau[i];
        if (t < window.lo * (1.0 - slack) || t > window.hi * (1.0 + slack)) {
            continue;
        }
        const double q = series.values[i];
        if (q == 0.0 || !std::isfinite(q)) {
            throw FitError(fmt::format("series '{}': zero or non-finite value at tau={}", series.label, t));
        }
        const int s = q > 0.0 ? 1 : -1;
        if (sign != 0 && s != sign) {
            throw FitError(fmt::format("series '{}': sign change inside the fit window", series.label));
        }
        sign = s;
        x.push_back(std::log(t));
        y.push_back(std::log(std::abs(q)));
        if (correction_exponent) {
            corr.push_back(std::pow(t, *correction_exponent));
        }
        lo_seen = std::min(lo_seen, t);
        hi_seen = std::max(hi_seen, t);
    }
    const std::size_t n = x.size();
    if (n < 5) {
        throw FitError(fmt::format("series '{}': {} points in window, need at least 5", series.label, n));
    }

    const int p = correction_exponent ? 3 : 2;
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd Y(n);
    for (std::size_t i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = x[i];
        if (correction_exponent) {
            X(i, 2) = corr[i];
        }
        Y(i) = y[i];
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    const Eigen::VectorXd coef = qr.solve(Y);
    const Eigen::VectorXd resid = Y - X * coef;
    const double rss = resid.squaredNorm();
    const double mean = Y.mean();
    const double tss = (Y.array() - mean).square().sum();

    const Eigen::MatrixXd xtx_inv = (X.transpose() * X).inverse();
    const double sigma2 = n > static_cast<std::size_t>(p) ? rss / static_cast<double>(n - p) : 0.0;

    ExponentEstimate est;
    est.intercept = coef(0);
    est.exponent = coef(1);
    est.std_error = std::sqrt(std::max(0.0, sigma2 * xtx_inv(1, 1)));
    est.r_squared = tss > 0.0 ? 1.0 - rss / tss : 1.0;
    est.window = {lo_seen, hi_seen};
    est.points = n;
    return est;
}

std::vector<double> log_tau_grid(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2) {
        throw std::invalid_argument("log_tau_grid: need 0 < lo < hi and at least 2 nodes");
    }
    std::vector<double> grid(count);
    const double step = std::log(lo / hi) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        grid[i] = hi * std::exp(step * static_cast<double>(i));
    }
    grid.front() = hi;
    grid.back() = lo;
    return grid;
}

const std::array<const char*, 12>& partial_derivative_labels() { return kPartialLabels; }

std::array<NamedValue, 12> partial_derivative_table(const DerivativeBundle& d) {
    const double sT = d.dS_dT_V;
    const double pT = d.dP_dT_V;
    const double pV = d.dP_dV_T;
    const double sV = d.dS_dV_T;

    const double dS_dT_P = sT - pT * pT / pV;
    const double dV_dT_P = -pT / pV;
    const double dV_dT_S = -sT / sV;
    return {{
        {kPartialLabels[0], dS_dT_P},
        {kPartialLabels[1], sT},
        {kPartialLabels[2], pT},
        {kPartialLabels[3], sV},
        {kPartialLabels[4], sT / pT},
        {kPartialLabels[5], dV_dT_S},
        {kPartialLabels[6], dV_dT_P},
        {kPartialLabels[7], sV / pV},
        {kPartialLabels[8], dS_dT_P / dV_dT_P},
        {kPartialLabels[9], pT + pV * dV_dT_S},
        {kPartialLabels[10], 1.0 / pV},
        {kPartialLabels[11], 1.0 / d.dP_dV_S},
    }};
}

std::array<double, 12> predicted_partial_exponents(double alpha, double gamma) {
    return {-gamma, -alpha, 0.0, 0.0, -alpha, -alpha, -gamma, -gamma, 0.0, 0.0, -gamma, -alpha};
}

std::array<bool, 12> alpha_class_partials() {
    return {false, true, false, false, true, true, false, false, false, false, false, true};
}

const ScalingSeries& ScalingSweep::at(const std::string& label) const {
    const auto it = series.find(label);
    if (it == series.end()) {
        throw std::out_of_range(fmt::format("no scaling series labelled '{}'", label));
    }
    return it->second;
}

ScalingSweep scaling_sweep(const EosParams& params, std::span<const double> tau_grid,
                           const SolverOptions& opts) {
    std::vector<double> taus(tau_grid.begin(), tau_grid.end());
    if (taus.empty()) {
        throw std::invalid_argument("scaling_sweep: empty tau grid");
    }
    for (double t : taus) {
        if (!(t >= 1e-5 * (1.0 - 1e-12) && t <= 1e-1 * (1.0 + 1e-12))) {
            throw DomainError(fmt::format("tau={} outside the supported range [1e-5, 1e-1]", t));
        }
    }
    std::sort(taus.begin(), taus.end(), std::greater<>());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

    ScalingSweep sweep;
    SolverOptions solver = opts;
    solver.T_min = std::min(opts.T_min, 1.0 - taus.front());

    std::optional<std::pair<double, double>> guess;
    double prev_tau = 0.0;
    for (double tau : taus) {
        const double T = 1.0 - tau;
        CoexistencePoint cp;
        try {
            if (guess) {
                const double ratio = std::sqrt(tau / prev_tau);
                guess = std::make_pair(1.0 + (guess->first - 1.0) * ratio, 1.0 + (guess->second - 1.0) * ratio);
            }
            cp = solve_coexistence(params, T, solver, guess);
        } catch (const std::exception& e) {
            sweep.failures.push_back(fmt::format("tau={}: {}", tau, e.what()));
            break;
        }
        guess = std::make_pair(cp.liquid.V, cp.vapor.V);
        prev_tau = tau;
        sweep.tau.push_back(tau);

        const Recorder rec{sweep.series, tau};
        rec("V_gap", cp.vapor.V - cp.liquid.V);
        rec("Pprime", cp.Pprime);

        AngleRecord ar;
        ar.T = T;
        ar.tau = tau;
        for (Branch branch : {Branch::liquid, Branch::vapor}) {
            const ThermoState& s = state_of(cp, branch);
            const DerivativeBundle d = derivative_bundle(params, s);
            for (const NamedValue& nv : partial_derivative_table(d)) {
                rec(suffixed(nv.label, branch), nv.value);
            }
            const double vp = vprime_of(cp, branch);
            const double sp = sprime_of(cp, branch);
            rec(suffixed("Vprime", branch), vp);
            rec(suffixed("Sprime", branch), sp);
            rec(suffixed("dP_dV_T*Vprime", branch), d.dP_dV_T * vp);
            rec(suffixed("dS_dV_T*Vprime", branch), d.dS_dV_T * vp);

            // Chain-rule triples.
            const auto tab = partial_derivative_table(d);
            const double dS_dT_P = tab[0].value, dS_dV_P = tab[8].value, dV_dP_S = tab[11].value;
            const double dP_dS_T = d.dP_dV_T / d.dS_dV_T;
            const double dV_dS_T = 1.0 / d.dS_dV_T;
            rec(suffixed("dP_dS_T*dS_dT_V", branch), dP_dS_T * d.dS_dT_V);
            rec(suffixed("dV_dS_T", branch), dV_dS_T);
            rec(suffixed("dV_dS_P", branch), 1.0 / dS_dV_P);
            rec(suffixed("dV_dP_S*dP_dS_T", branch), dV_dP_S * dP_dS_T);
            rec(suffixed("dV_dS_T*dS_dT_P", branch), dV_dS_T * dS_dT_P);

            rec(suffixed("bracket_first", branch), d.dS_dT_V / vp);
            rec(suffixed("bracket_second", branch), -d.dP_dV_T * vp);

            const FundamentalForms forms = fundamental_forms(s, d);
            const CurvatureSpectrum spec = principal_curvatures(forms);
            rec(suffixed("lambda1", branch), spec.lambda1);
            rec(suffixed("lambda2", branch), spec.lambda2);
            rec(suffixed("K", branch), gaussian_curvature(s, d));
            rec(suffixed("twoH", branch), 2.0 * mean_curvature(s, d));

            const double phi_A = angle_of(Vec2(sp, vp), spec, forms.A);
            const double phi_R = angle_of(Vec2(cp.Pprime, 1.0), spec, forms.A);
            rec(suffixed("phi_A", branch), phi_A);
            rec(suffixed("phi_R", branch), phi_R);

            const double ratio = spec.lambda1 / spec.lambda2;
            const double product = std::abs(std::tan(phi_R) * std::tan(phi_A) + ratio) / ratio;
            if (branch == Branch::vapor) {
                ar.phi_A_vapor = phi_A;
                ar.phi_R = phi_R;
                ar.lambda1 = spec.lambda1;
                ar.lambda2 = spec.lambda2;
                ar.product_residual = product;
                ar.small_angle_residual = std::abs(phi_R * phi_A + ratio) / ratio;
            } else {
                ar.phi_A_liquid = phi_A;
                ar.phi_R_liquid = phi_R;
                ar.lambda1_liquid = spec.lambda1;
                ar.lambda2_liquid = spec.lambda2;
                ar.product_residual_liquid = product;
            }
        }
        sweep.angles.push_back(ar);
    }
    return sweep;
}

CriticalExponents critical_exponents(const ScalingSweep& sweep, const AnalysisOptions& opts) {
    CriticalExponents ce;
    ce.alpha = negated(fit(sweep, "dS_dT_V", opts));
    ce.beta = fit(sweep, "V_gap", opts);
    ce.gamma = negated(fit(sweep, "dV_dP_T", opts));
    return ce;
}

std::vector<TableRow> proposition1_table(const ScalingSweep& sweep, const AnalysisOptions& opts) {
    // Mean-field targets.
    const auto predicted = predicted_partial_exponents(0.0, 1.0);
    const auto alpha_class = alpha_class_partials();
    std::vector<TableRow> rows;
    for (std::size_t i = 0; i < kPartialLabels.size(); ++i) {
        TableRow row;
        row.label = kPartialLabels[i];
        row.estimate = fit(sweep, row.label, opts);
        row.predicted = predicted[i];
        row.finite = std::abs(row.estimate.exponent) <= opts.finite_slope;
        const bool close = std::abs(row.estimate.exponent - row.predicted) <= opts.table_tolerance;
        row.pass = alpha_class[i] ? (close && row.finite) : close;
        rows.push_back(row);
    }
    return rows;
}

std::vector<TableRow> proposition1_table(const EosParams& params, std::span<const double> tau_grid,
                                         const AnalysisOptions& opts) {
    return proposition1_table(scaling_sweep(params, tau_grid), opts);
}

std::vector<ChainRuleCheck> chain_rule_checks(const ScalingSweep& sweep, const AnalysisOptions& opts) {
    const CriticalExponents ce = critical_exponents(sweep, opts);
    const double shift = ce.gamma.exponent - ce.alpha.exponent;

    std::vector<ChainRuleCheck> checks = {
        {"(dP/dT)_V = (dP/dT)_S + (dP/dS)_T (dS/dT)_V", {"dP_dT_V", "dP_dT_S", "dP_dS_T*dS_dT_V"}},
        {"(dV/dS)_T = (dV/dS)_P + (dV/dP)_S (dP/dS)_T", {"dV_dS_T", "dV_dS_P", "dV_dP_S*dP_dS_T"}},
        {"(dV/dT)_P = (dV/dT)_S + (dV/dS)_T (dS/dT)_P", {"dV_dT_P", "dV_dS_T*dS_dT_P", "dV_dT_S"}},
    };
    for (ChainRuleCheck& c : checks) {
        for (std::size_t k = 0; k < 3; ++k) {
            c.exponents[k] = fit(sweep, c.terms[k], opts).exponent;
        }
        c.expected_shift = shift;
        const double dominant = 0.5 * (c.exponents[0] + c.exponents[1]);
        c.pass = std::abs(c.exponents[0] - c.exponents[1]) <= opts.table_tolerance &&
                 std::abs(c.exponents[2] - dominant - shift) <= opts.chain_tolerance;
    }
    return checks;
}

CurvatureExponents curvature_exponents(const ScalingSweep& sweep, const AnalysisOptions& opts) {
    CurvatureExponents ce;
    ce.lambda1 = fit(sweep, "lambda1", opts);
    ce.lambda2 = fit(sweep, "lambda2", opts);
    ce.gaussian = fit(sweep, "K", opts);
    ce.twice_mean = fit(sweep, "twoH", opts);
    return ce;
}

CurvatureExponents curvature_exponents(const EosParams& params, std::span<const double> tau_grid,
                                       const AnalysisOptions& opts) {
    return curvature_exponents(scaling_sweep(params, tau_grid), opts);
}

AngleExponents angle_exponents(const ScalingSweep& sweep, const AnalysisOptions& opts) {
    AngleExponents ae;
    ae.phi_A = fit(sweep, "phi_A", opts);
    ae.phi_R = fit(sweep, "phi_R", opts);
    ae.phi_A_liquid = fit(sweep, "phi_A_L", opts);
    ae.phi_R_liquid = fit(sweep, "phi_R_L", opts);
    ae.signs_opposed = !sweep.angles.empty();
    for (const AngleRecord& r : sweep.angles) {
        ae.worst_product_residual =
            std::max({ae.worst_product_residual, r.product_residual, r.product_residual_liquid});
        ae.worst_small_angle_residual = std::max(ae.worst_small_angle_residual, r.small_angle_residual);
        const bool vapor_ok = r.phi_R * r.phi_A_vapor < 0.0;
        const bool liquid_ok = r.phi_R_liquid * r.phi_A_liquid < 0.0;
        ae.signs_opposed = ae.signs_opposed && vapor_ok && liquid_ok;
    }
    return ae;
}

AngleExponents angle_exponents(const EosParams& params, std::span<const double> tau_grid,
                               const AnalysisOptions& opts) {
    return angle_exponents(scaling_sweep(params, tau_grid), opts);
}

RushbrookeReport rushbrooke_check(const ExponentEstimate& alpha, const ExponentEstimate& beta,
                                  const ExponentEstimate& gamma) {
    const double a = alpha.exponent, b = beta.exponent, g = gamma.exponent;
    RushbrookeReport r;
    r.delta = a + 2.0 * b + g - 2.0;
    r.std_error = std::sqrt(alpha.std_error * alpha.std_error + 4.0 * beta.std_error * beta.std_error +
                            gamma.std_error * gamma.std_error);
    r.inequality_holds = r.delta >= -3.0 * r.std_error;
    r.chain = {g + b - 1.0, 0.5 * (g - a), 1.0 - a - b};
    const double slack = 3.0 * r.std_error + 1e-12;
    r.chain_ordered = r.chain[0] >= r.chain[1] - slack && r.chain[1] >= r.chain[2] - slack;
    return r;
}

BranchDerivativeCheck branch_derivative_check(const ScalingSweep& sweep, const AnalysisOptions& opts) {
    BranchDerivativeCheck c;
    c.Vprime = fit(sweep, "Vprime", opts);
    c.Sprime = fit(sweep, "Sprime", opts);
    c.Pprime = fit(sweep, "Pprime", opts);
    c.pass = std::abs(c.Sprime.exponent - c.Vprime.exponent) <= opts.table_tolerance;
    return c;
}

BracketCheck bracket_check(const ScalingSweep& sweep, const AnalysisOptions& opts) {
    const CriticalExponents ce = critical_exponents(sweep, opts);
    BracketCheck c;
    c.first = fit(sweep, "bracket_first", opts);
    c.second = fit(sweep, "bracket_second", opts);
    c.expected_first = 1.0 - ce.alpha.exponent - ce.beta.exponent;
    c.expected_second = ce.gamma.exponent + ce.beta.exponent - 1.0;

    const ScalingSeries& f = sweep.at("bracket_first");
    const ScalingSeries& s = sweep.at("bracket_second");
    c.same_sign = !f.values.empty();
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        c.same_sign = c.same_sign && (f.values[i] * s.values[i] > 0.0);
    }
    c.pass = c.same_sign && std::abs(c.first.exponent - c.expected_first) <= opts.chain_tolerance &&
             std::abs(c.second.exponent - c.expected_second) <= opts.chain_tolerance;
    return c;
}

}  // namespace gibbsgeo
