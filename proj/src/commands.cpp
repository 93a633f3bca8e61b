#include "gibbsgeo/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <random>

#include <fmt/format.h>

#include "gibbsgeo/coexistence.hpp"
#include "gibbsgeo/critical.hpp"
#include "gibbsgeo/edge.hpp"
#include "gibbsgeo/error.hpp"
#include "gibbsgeo/geometry.hpp"

namespace gibbsgeo {

Command command_from_string(std::string_view name) {
    if (name == "coexist") return Command::coexist;
    if (name == "geometry") return Command::geometry;
    if (name == "edge") return Command::edge;
    if (name == "exponents") return Command::exponents;
    if (name == "all") return Command::all;
    throw ConfigError(fmt::format("unknown command '{}'", name));
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Pipeline {
public:
    Pipeline(const RunConfig& cfg, std::filesystem::path out) : cfg(cfg), out(std::move(out)) {}

    const RunConfig& cfg;
    std::filesystem::path out;
    std::vector<ResidualReport> reports;
    std::vector<std::string> messages;

    void check(std::string name, double location, double value, double tolerance) {
        reports.push_back(make_report(std::move(name), location, value, tolerance));
    }
    void flag(std::string name, double location, bool holds) {
        reports.push_back(make_flag(std::move(name), location, holds));
    }
    void failure(std::string name, double location, std::string_view why = {}) {
        if (!why.empty()) messages.push_back(fmt::format("{}: {}", name, why));
        check(std::move(name), location, kNaN, 0.0);
    }

    /// Null when the scan failed; the failure is reported once.
    const SaturationCurve* curve() {
        if (!scanned_) {
            scanned_ = true;
            const std::vector<double> grid = cfg.temperature.nodes();
            try {
                curve_ = saturation_scan(cfg.model, grid, cfg.scan_options());
            } catch (const std::exception& e) {
                failure("saturation_scan", kNaN, e.what());
            }
        }
        return curve_ ? &*curve_ : nullptr;
    }

private:
    bool scanned_ = false;
    std::optional<SaturationCurve> curve_;
};

// --- coexist ---------------------------------------------------------------

void run_coexist(Pipeline& p) {
    const RunConfig& cfg = p.cfg;
    const std::vector<double> grid = cfg.temperature.nodes();
    const SolverOptions solver = cfg.scan_options().solver;
    const SaturationCurve* curve = p.curve();

    // Without a full scan, solve what can be solved node by node.
    std::vector<std::optional<CoexistencePoint>> points(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (curve != nullptr) {
            points[i] = curve->points[i];
            continue;
        }
        try {
            points[i] = solve_coexistence(cfg.model, grid[i], solver);
        } catch (const std::exception& e) {
            p.messages.push_back(fmt::format("T={}: {}", grid[i], e.what()));
        }
    }

    CsvWriter csv(p.out / "saturation.csv",
                  {"T", "P_sat", "mu_sat", "V_L", "V_G", "S_L", "S_G", "U_L", "U_G", "Pprime", "muprime",
                   "Psecond", "musecond", "res_orthogonality", "res_gibbs_duhem", "res_clausius_clapeyron",
                   "res_energy_slope", "res_second_derivative", "status"});
    double previous_P = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double T = grid[i];
        if (!points[i]) {
            csv.cell(T);
            for (int k = 0; k < 17; ++k) csv.cell(kNaN);
            csv.cell("failed");
            csv.end_row();
            p.failure("coexistence_solve", T);
            continue;
        }
        const CoexistencePoint& c = *points[i];
        const double ortho = orthogonality_residual(c);
        const double gd = gibbs_duhem_residual(c);
        const double energy = energy_slope_residual(c);
        ClausiusClapeyronResidual cc{kNaN, kNaN};
        try {
            cc = clausius_clapeyron_residual(cfg.model, c, cfg.local_step, solver);
        } catch (const std::exception& e) {
            p.messages.push_back(fmt::format("T={}: {}", T, e.what()));
        }
        const double P2 = curve != nullptr ? curve->Psecond[i] : kNaN;
        const double m2 = curve != nullptr ? curve->musecond[i] : kNaN;
        const double second = curve != nullptr ? second_derivative_residual(*curve, i) : kNaN;

        csv.cell(T).cell(c.P_sat).cell(c.mu_sat).cell(c.liquid.V).cell(c.vapor.V).cell(c.liquid.S);
        csv.cell(c.vapor.S).cell(c.liquid.U).cell(c.vapor.U).cell(c.Pprime).cell(c.muprime).cell(P2).cell(m2);
        csv.cell(ortho).cell(gd).cell(cc.finite_difference).cell(energy).cell(second).cell("ok");
        csv.end_row();

        const auto scale_mu = [](const ThermoState& s) {
            return std::abs(s.U) + std::abs(s.P * s.V) + std::abs(s.T * s.S);
        };
        p.check("pressure_balance", T, (c.liquid.P - c.vapor.P) / c.P_sat, cfg.tol.identity);
        p.check("chemical_potential_balance", T,
                (c.liquid.mu - c.vapor.mu) / std::max(scale_mu(c.liquid), scale_mu(c.vapor)), cfg.tol.identity);
        p.check("orthogonality", T, ortho, cfg.tol.identity);
        p.check("gibbs_duhem", T, gd, cfg.tol.identity);
        p.check("clausius_clapeyron_construction", T, cc.construction, cfg.tol.identity);
        p.check("clausius_clapeyron_finite_difference", T, cc.finite_difference, cfg.tol.finite_difference);
        p.check("energy_slope", T, energy, cfg.tol.energy_slope);
        if (curve != nullptr) {
            p.check("second_derivative_identity", T, second, cfg.tol.second_derivative);
        }
        p.flag("saturation_pressure_increasing", T, c.P_sat > previous_P);
        previous_P = c.P_sat;
    }
}

// --- geometry --------------------------------------------------------------

struct Worst {
    double value = 0.0;
    double location = kNaN;

    void update(double v, double at) {
        if (!(std::abs(v) <= std::abs(value))) {
            value = v;
            location = at;
        }
    }
};

void random_state_checks(Pipeline& p) {
    const RunConfig& cfg = p.cfg;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> temp(0.5, 2.0);
    std::uniform_real_distribution<double> logv(std::log(0.4), std::log(20.0));
    std::uniform_real_distribution<double> angle(0.0, M_PI);

    Worst gauss, mean, euler, maxwell;
    std::size_t accepted = 0;
    while (accepted < cfg.random_states) {
        const double T = temp(rng);
        const double V = std::exp(logv(rng));
        const double phi = angle(rng);
        // strictly stable with a margin, away from the spinodal
        if (!(dP_dV_T(cfg.model, T, V) < -1e-3)) continue;
        ++accepted;

        const ThermoState s = state_from_TV(cfg.model, T, V);
        const DerivativeBundle d = derivative_bundle(cfg.model, s);
        const FundamentalForms forms = fundamental_forms(s, d);
        const CurvatureSpectrum spec = principal_curvatures(forms);
        const double K = gaussian_curvature(s, d);
        const double twoH = 2.0 * mean_curvature(s, d);
        gauss.update((spec.lambda1 * spec.lambda2 - K) / K, T);
        mean.update((spec.lambda1 + spec.lambda2 - twoH) / twoH, T);

        const Vec2 u = direction_at(spec, phi);
        const double normal = u.dot(forms.B * u) / u.dot(forms.A * u);
        const double scale = std::max(std::abs(spec.lambda1), std::abs(spec.lambda2));
        euler.update((normal - directional_curvature(spec, phi)) / scale, T);

        // B is symmetric exactly when (dT/dV)_S = -(dP/dS)_V
        maxwell.update((d.dT_dV_S + d.dP_dS_V) / std::max(std::abs(d.dT_dV_S), std::abs(d.dP_dS_V)), T);
    }
    p.check("random_states_gaussian_curvature", gauss.location, gauss.value, cfg.tol.geometry);
    p.check("random_states_mean_curvature", mean.location, mean.value, cfg.tol.geometry);
    p.check("random_states_euler_formula", euler.location, euler.value, cfg.tol.euler);
    p.check("random_states_second_form_symmetry", maxwell.location, maxwell.value, cfg.tol.euler);
}

void write_mesh(Pipeline& p, const SaturationCurve& curve) {
    const RunConfig& cfg = p.cfg;
    const MeshSpec& m = cfg.mesh;
    CsvWriter csv(p.out / "surface_mesh.csv", {"kind", "i", "j", "S", "V", "U", "stable"});
    for (std::size_t i = 0; i < m.T_count; ++i) {
        const double T = m.T_min + (m.T_max - m.T_min) * static_cast<double>(i) / static_cast<double>(m.T_count - 1);
        std::optional<std::pair<double, double>> dome;
        bool dome_known = true;
        if (T < vdw::critical_temperature) {
            try {
                const CoexistencePoint c = solve_coexistence(cfg.model, T, cfg.scan_options().solver);
                dome = std::make_pair(c.liquid.V, c.vapor.V);
            } catch (const std::exception& e) {
                dome_known = false;
                p.failure("mesh_coexistence_solve", T, e.what());
            }
        }
        for (std::size_t j = 0; j < m.V_count; ++j) {
            const double f = static_cast<double>(j) / static_cast<double>(m.V_count - 1);
            const double V = std::exp(std::log(m.V_min) + f * (std::log(m.V_max) - std::log(m.V_min)));
            const ThermoState s = state_from_TV(cfg.model, T, V);
            const bool outside = !dome || V <= dome->first || V >= dome->second;
            csv.cell("surface").cell(static_cast<long long>(i)).cell(static_cast<long long>(j));
            csv.cell(s.S).cell(s.V).cell(s.U);
            if (dome_known) {
                csv.cell(outside && mechanically_stable(cfg.model, T, V) ? "1" : "0");
            } else {
                csv.cell("nan");
            }
            csv.end_row();
        }
    }
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const CoexistencePoint& c = curve.points[i];
        for (const auto& [j, s] : {std::pair{0LL, &c.liquid}, std::pair{1LL, &c.vapor}}) {
            csv.cell("ruling").cell(static_cast<long long>(i)).cell(j);
            csv.cell(s->S).cell(s->V).cell(s->U).cell("1");
            csv.end_row();
        }
    }
}

void run_geometry(Pipeline& p) {
    const RunConfig& cfg = p.cfg;
    random_state_checks(p);
    const SaturationCurve* curve = p.curve();
    if (curve == nullptr) return;

    CsvWriter csv(p.out / "curvature.csv",
                  {"T", "lambda1", "lambda2", "K", "H", "phi_A_L", "phi_A_G", "phi_R", "conjugacy_residual"});
    for (const CoexistencePoint& c : curve->points) {
        const double T = c.T;
        double phi_A[2] = {kNaN, kNaN};
        double conjugacy = 0.0;
        CurvatureSpectrum vapor_spec;
        double K = kNaN;
        double H = kNaN;
        double phi_R = kNaN;
        for (const Branch b : {Branch::liquid, Branch::vapor}) {
            const bool vapor = b == Branch::vapor;
            const char* tag = vapor ? "vapor" : "liquid";
            const ThermoState& s = state_of(c, b);
            const DerivativeBundle d = derivative_bundle(cfg.model, s);
            const FundamentalForms forms = fundamental_forms(s, d);
            const CurvatureSpectrum spec = principal_curvatures(forms);
            const Vec2 uA(sprime_of(c, b), vprime_of(c, b));
            const Vec2 uR(c.Pprime, 1.0);

            const double conj = conjugacy_form(uR, uA, forms.B) / (forms.B.norm() * uR.norm() * uA.norm());
            conjugacy = std::max(conjugacy, std::abs(conj));
            const Vec2 w = forms.B * uA;
            const Vec2 n(1.0, -c.Pprime);
            const double parallel = (w[0] * n[1] - w[1] * n[0]) / (w.norm() * n.norm());

            const double k = gaussian_curvature(s, d);
            const double h = mean_curvature(s, d);
            const double pA = angle_of(uA, spec, forms.A);
            const double pR = angle_of(uR, spec, forms.A);
            const double ratio = spec.lambda1 / spec.lambda2;
            const double product = (std::tan(pR) * std::tan(pA) + ratio) / ratio;

            p.check(fmt::format("conjugacy_{}", tag), T, conj, cfg.tol.conjugacy);
            p.check(fmt::format("second_form_image_parallel_{}", tag), T, parallel, cfg.tol.conjugacy);
            p.check(fmt::format("gaussian_curvature_{}", tag), T, (spec.lambda1 * spec.lambda2 - k) / k,
                    cfg.tol.geometry);
            p.check(fmt::format("mean_curvature_{}", tag), T, (spec.lambda1 + spec.lambda2 - 2.0 * h) / (2.0 * h),
                    cfg.tol.geometry);
            p.check(fmt::format("product_law_{}", tag), T, product, cfg.tol.product_law);
            p.flag(fmt::format("angle_signs_opposed_{}", tag), T, pA * pR < 0.0);

            phi_A[vapor ? 1 : 0] = pA;
            if (vapor) {
                vapor_spec = spec;
                K = k;
                H = h;
                phi_R = pR;
            }
        }
        csv.cell(T).cell(vapor_spec.lambda1).cell(vapor_spec.lambda2).cell(K).cell(H);
        csv.cell(phi_A[0]).cell(phi_A[1]).cell(phi_R).cell(conjugacy);
        csv.end_row();
    }
    write_mesh(p, *curve);
}

// --- edge ------------------------------------------------------------------

void run_edge(Pipeline& p) {
    const RunConfig& cfg = p.cfg;
    const SaturationCurve* curve = p.curve();
    if (curve == nullptr) return;
    const std::vector<double> angles = edge_tangent_angles(*curve, cfg.psecond_floor);

    CsvWriter csv(p.out / "edge.csv",
                  {"T", "S_edge", "V_edge", "E_edge", "collinearity_residual", "reconstruction_residual_L",
                   "reconstruction_residual_G", "tangent_identity_residual_L", "tangent_identity_residual_G",
                   "plane_residual", "tangent_angle", "status"});
    for (std::size_t i = 0; i < curve->size(); ++i) {
        const CoexistencePoint& c = curve->points[i];
        const double T = c.T;
        EdgePoint e;
        try {
            e = edge_point(*curve, T, cfg.psecond_floor);
        } catch (const SingularError&) {
            // flagged in the table, not fatal
            csv.cell(T);
            for (int k = 0; k < 10; ++k) csv.cell(kNaN);
            csv.cell("singular");
            csv.end_row();
            continue;
        }
        const double collinear = collinearity_residual(*curve, T, cfg.psecond_floor);
        const double planes = edge_plane_residual(*curve, T, cfg.psecond_floor);
        double recon[2];
        double ident[2];
        for (const Branch b : {Branch::liquid, Branch::vapor}) {
            const int k = b == Branch::vapor ? 1 : 0;
            recon[k] = (reconstruct_branch(*curve, T, b) - position_of(state_of(c, b))).cwiseAbs().maxCoeff();
            ident[k] = tangent_identity_residual(*curve, T, b);
        }
        csv.cell(T).cell(e.S).cell(e.V).cell(e.E).cell(collinear).cell(recon[0]).cell(recon[1]);
        csv.cell(ident[0]).cell(ident[1]).cell(planes).cell(angles[i]).cell("ok");
        csv.end_row();

        p.check("edge_planes", T, planes, cfg.tol.edge);
        p.check("edge_collinearity", T, collinear, cfg.tol.collinearity);
        p.check("edge_reconstruction_liquid", T, recon[0], cfg.tol.edge);
        p.check("edge_reconstruction_vapor", T, recon[1], cfg.tol.edge);
        p.check("edge_tangent_identity_liquid", T, ident[0], cfg.tol.edge);
        p.check("edge_tangent_identity_vapor", T, ident[1], cfg.tol.edge);
        if (std::isfinite(angles[i])) {
            p.check("edge_tangent_parallel", T, angles[i], cfg.tol.tangent_angle);
        }
    }
}

// --- exponents -------------------------------------------------------------

struct ExponentRow {
    std::string label;
    double predicted;
    double tolerance;
    bool finite_class;  // passes only as a finite (zero-slope) quantity
};

void run_exponents(Pipeline& p) {
    const RunConfig& cfg = p.cfg;
    const AnalysisOptions aopt = cfg.analysis_options();
    const std::vector<double> taus = cfg.tau.nodes();
    const ScalingSweep sweep = scaling_sweep(cfg.model, taus, cfg.scan_options().solver);
    for (const std::string& why : sweep.failures) {
        p.failure("scaling_sweep", sweep.tau.size() < taus.size() ? taus[sweep.tau.size()] : kNaN, why);
    }

    std::vector<ExponentRow> rows;
    const auto predicted = predicted_partial_exponents(0.0, 1.0);
    const auto alpha_class = alpha_class_partials();
    const auto& labels = partial_derivative_labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        rows.push_back({labels[i], predicted[i], aopt.table_tolerance, alpha_class[i]});
    }
    rows.push_back({"V_gap", 0.5, 0.01, false});
    for (const char* suffix : {"", "_L"}) {
        const std::string s(suffix);
        rows.push_back({"Vprime" + s, -0.5, 0.03, false});
        rows.push_back({"Sprime" + s, -0.5, 0.03, false});
        rows.push_back({"lambda1" + s, 1.0, 0.02, false});
        rows.push_back({"lambda2" + s, 0.0, 0.02, false});
        rows.push_back({"K" + s, 1.0, 0.03, false});
        rows.push_back({"twoH" + s, 0.0, 0.03, false});
        rows.push_back({"phi_A" + s, 0.5, 0.03, false});
        rows.push_back({"phi_R" + s, 0.5, 0.03, false});
        rows.push_back({"bracket_first" + s, 0.5, 0.05, false});
        rows.push_back({"bracket_second" + s, 0.5, 0.05, false});
    }
    rows.push_back({"Pprime", 0.0, aopt.finite_slope, true});

    const double location = aopt.window.lo;
    CsvWriter csv(p.out / "exponents.csv", {"quantity", "exponent", "stderr", "r_squared", "predicted", "pass"});
    for (const ExponentRow& row : rows) {
        std::optional<ExponentEstimate> est;
        try {
            est = fit_power_law(sweep.at(row.label), aopt.window, aopt.correction_exponent);
        } catch (const std::exception& e) {
            p.messages.push_back(e.what());
        }
        bool pass = false;
        if (est) {
            const double dev = est->exponent - row.predicted;
            pass = std::abs(dev) <= row.tolerance &&
                   (!row.finite_class || std::abs(est->exponent) <= aopt.finite_slope);
            if (row.finite_class) {
                p.check("exponent_finite:" + row.label, location, est->exponent, aopt.finite_slope);
            } else {
                p.check("exponent:" + row.label, location, dev, row.tolerance);
            }
        } else {
            p.check("exponent_fit:" + row.label, location, kNaN, 0.0);
        }
        csv.cell(row.label).cell(est ? est->exponent : kNaN).cell(est ? est->std_error : kNaN);
        csv.cell(est ? est->r_squared : kNaN).cell(row.predicted).cell(pass ? "true" : "false");
        csv.end_row();
    }

    std::ofstream summary(p.out / "summary.txt", std::ios::binary | std::ios::trunc);
    const auto line = [&summary](std::string_view key, const std::string& value) {
        summary << key << " = " << value << '\n';
    };
    const auto pm = [](const ExponentEstimate& e) {
        return fmt::format("{} +- {}", format_real(e.exponent), format_real(e.std_error));
    };
    try {
        const CriticalExponents ce = critical_exponents(sweep, aopt);
        line("alpha", pm(ce.alpha));
        line("beta", pm(ce.beta));
        line("gamma", pm(ce.gamma));
        const RushbrookeReport rb = rushbrooke_check(ce.alpha, ce.beta, ce.gamma);
        line("rushbrooke_delta", fmt::format("{} +- {}", format_real(rb.delta), format_real(rb.std_error)));
        line("rushbrooke_inequality", rb.inequality_holds ? "holds" : "violated");
        line("rushbrooke_chain", fmt::format("{} >= {} >= {} ({})", format_real(rb.chain[0]),
                                             format_real(rb.chain[1]), format_real(rb.chain[2]),
                                             rb.chain_ordered ? "ordered" : "not ordered"));
        p.check("alpha_finite", location, ce.alpha.exponent, aopt.finite_slope);
        p.check("beta", location, ce.beta.exponent - 0.5, 0.01);
        p.check("gamma", location, ce.gamma.exponent - 1.0, 0.02);
        p.check("rushbrooke_delta", location, rb.delta, 0.05);
        p.flag("rushbrooke_inequality", location, rb.inequality_holds);
        p.flag("rushbrooke_chain", location, rb.chain_ordered);
    } catch (const std::exception& e) {
        line("alpha", "fit failed");
        p.failure("critical_exponents", location, e.what());
    }
    try {
        const AngleExponents ae = angle_exponents(sweep, aopt);
        line("product_law_worst_residual", format_real(ae.worst_product_residual));
        line("small_angle_worst_residual", format_real(ae.worst_small_angle_residual));
        line("angle_signs_opposed", ae.signs_opposed ? "true" : "false");
        p.check("product_law_sweep", location, ae.worst_product_residual, cfg.tol.product_law);
        p.flag("angle_signs_opposed_sweep", location, ae.signs_opposed);
    } catch (const std::exception& e) {
        line("product_law_worst_residual", "fit failed");
        p.failure("angle_exponents", location, e.what());
    }
    try {
        for (const ChainRuleCheck& chain : chain_rule_checks(sweep, aopt)) {
            line("chain_rule", fmt::format("{}: {} {} {} ({})", chain.relation, format_real(chain.exponents[0]),
                                           format_real(chain.exponents[1]), format_real(chain.exponents[2]),
                                           chain.pass ? "pass" : "fail"));
            p.flag("chain_rule:" + chain.terms[0], location, chain.pass);
        }
    } catch (const std::exception& e) {
        p.failure("chain_rule_checks", location, e.what());
    }
}

}  // namespace

RunResult run_command(Command command, const RunConfig& cfg) {
    cfg.validate();
    RunResult result;
    result.output_dir = cfg.resolved_output_dir();
    std::filesystem::create_directories(result.output_dir);

    Pipeline p(cfg, result.output_dir);
    const auto guarded = [&p](const char* name, void (*step)(Pipeline&)) {
        try {
            step(p);
        } catch (const std::exception& e) {
            p.failure(name, kNaN, e.what());
        }
    };
    if (command == Command::coexist || command == Command::all) guarded("coexist", run_coexist);
    if (command == Command::geometry || command == Command::all) guarded("geometry", run_geometry);
    if (command == Command::edge || command == Command::all) guarded("edge", run_edge);
    if (command == Command::exponents || command == Command::all) guarded("exponents", run_exponents);

    write_residuals(result.output_dir / "residuals.csv", p.reports);
    result.reports = std::move(p.reports);
    result.messages = std::move(p.messages);
    return result;
}

}  // namespace gibbsgeo
