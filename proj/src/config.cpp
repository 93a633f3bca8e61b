#include "gibbsgeo/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "gibbsgeo/error.hpp"

namespace gibbsgeo {

std::vector<double> TemperatureGridSpec::nodes() const {
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = min;
        return out;
    }
    const double last = static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        const double f = static_cast<double>(i) / last;
        if (spacing == GridSpacing::linear) {
            out[i] = min + f * (max - min);
        } else {
            // geometric in tau = 1 - T, dense near the critical end
            const double lt = std::log(1.0 - min) + f * (std::log(1.0 - max) - std::log(1.0 - min));
            out[i] = 1.0 - std::exp(lt);
        }
    }
    out.front() = min;
    out.back() = max;
    return out;
}

std::vector<double> TauGridSpec::nodes() const { return log_tau_grid(min, max, count); }

std::string_view to_string(GridSpacing spacing) {
    return spacing == GridSpacing::linear ? "linear" : "log-toward-critical";
}

std::string_view to_string(SecondDerivativeMethod method) {
    return method == SecondDerivativeMethod::local ? "local" : "grid";
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double parse_real(std::string_view key, std::string_view text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
        throw ConfigError(fmt::format("{}: '{}' is not a finite number", key, t));
    }
    return v;
}

template <class Int>
Int parse_int(std::string_view key, std::string_view text) {
    const std::string t = trim(text);
    Int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
        throw ConfigError(fmt::format("{}: '{}' is not a non-negative integer", key, t));
    }
    return v;
}

struct Field {
    std::string key;  // section.name
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, std::string_view)> set;
};

// `ref` is a generic lambda returning a reference to the member.
template <class Ref>
Field real(std::string key, Ref ref) {
    return {key, [ref](const RunConfig& c) { return fmt::format("{}", ref(c)); },
            [ref, key](RunConfig& c, std::string_view v) { ref(c) = parse_real(key, v); }};
}

template <class Ref>
Field count(std::string key, Ref ref) {
    return {key, [ref](const RunConfig& c) { return fmt::format("{}", ref(c)); },
            [ref, key](RunConfig& c, std::string_view v) {
                ref(c) = parse_int<std::remove_reference_t<decltype(ref(c))>>(key, v);
            }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        std::vector<Field> f;
        f.push_back({"model.eos", [](const RunConfig& c) { return std::string(to_string(c.model.model)); },
                     [](RunConfig& c, std::string_view v) {
                         try {
                             c.model.model = eos_model_from_string(trim(v));
                         } catch (const std::exception& e) {
                             throw ConfigError(fmt::format("model.eos: {}", e.what()));
                         }
                     }});
        f.push_back(real("model.c", [](auto& c) -> auto& { return c.model.c; }));

        f.push_back(real("temperature.min", [](auto& c) -> auto& { return c.temperature.min; }));
        f.push_back(real("temperature.max", [](auto& c) -> auto& { return c.temperature.max; }));
        f.push_back(count("temperature.count", [](auto& c) -> auto& { return c.temperature.count; }));
        f.push_back({"temperature.spacing",
                     [](const RunConfig& c) { return std::string(to_string(c.temperature.spacing)); },
                     [](RunConfig& c, std::string_view v) {
                         const std::string s = trim(v);
                         if (s == "linear") {
                             c.temperature.spacing = GridSpacing::linear;
                         } else if (s == "log-toward-critical") {
                             c.temperature.spacing = GridSpacing::log_toward_critical;
                         } else {
                             throw ConfigError(fmt::format(
                                 "temperature.spacing: '{}' (expected linear or log-toward-critical)", s));
                         }
                     }});
        f.push_back({"temperature.second_derivative",
                     [](const RunConfig& c) { return std::string(to_string(c.second_derivative)); },
                     [](RunConfig& c, std::string_view v) {
                         const std::string s = trim(v);
                         if (s == "local") {
                             c.second_derivative = SecondDerivativeMethod::local;
                         } else if (s == "grid") {
                             c.second_derivative = SecondDerivativeMethod::grid;
                         } else {
                             throw ConfigError(fmt::format(
                                 "temperature.second_derivative: '{}' (expected local or grid)", s));
                         }
                     }});
        f.push_back(real("temperature.local_step", [](auto& c) -> auto& { return c.local_step; }));
        f.push_back(real("temperature.solver_min", [](auto& c) -> auto& { return c.solver_T_min; }));

        f.push_back(real("tau.min", [](auto& c) -> auto& { return c.tau.min; }));
        f.push_back(real("tau.max", [](auto& c) -> auto& { return c.tau.max; }));
        f.push_back(count("tau.count", [](auto& c) -> auto& { return c.tau.count; }));

        f.push_back(real("fit.window_lo", [](auto& c) -> auto& { return c.fit_window.lo; }));
        f.push_back(real("fit.window_hi", [](auto& c) -> auto& { return c.fit_window.hi; }));
        f.push_back(real("fit.correction_exponent", [](auto& c) -> auto& { return c.correction_exponent; }));

        f.push_back(real("mesh.T_min", [](auto& c) -> auto& { return c.mesh.T_min; }));
        f.push_back(real("mesh.T_max", [](auto& c) -> auto& { return c.mesh.T_max; }));
        f.push_back(count("mesh.T_count", [](auto& c) -> auto& { return c.mesh.T_count; }));
        f.push_back(real("mesh.V_min", [](auto& c) -> auto& { return c.mesh.V_min; }));
        f.push_back(real("mesh.V_max", [](auto& c) -> auto& { return c.mesh.V_max; }));
        f.push_back(count("mesh.V_count", [](auto& c) -> auto& { return c.mesh.V_count; }));

        f.push_back(count("geometry.random_states", [](auto& c) -> auto& { return c.random_states; }));
        f.push_back(count("geometry.seed", [](auto& c) -> auto& { return c.seed; }));

        f.push_back(real("edge.psecond_floor", [](auto& c) -> auto& { return c.psecond_floor; }));

        f.push_back(real("tolerance.solver", [](auto& c) -> auto& { return c.tol.solver; }));
        f.push_back(real("tolerance.identity", [](auto& c) -> auto& { return c.tol.identity; }));
        f.push_back(real("tolerance.energy_slope", [](auto& c) -> auto& { return c.tol.energy_slope; }));
        f.push_back(real("tolerance.finite_difference", [](auto& c) -> auto& { return c.tol.finite_difference; }));
        f.push_back(real("tolerance.second_derivative", [](auto& c) -> auto& { return c.tol.second_derivative; }));
        f.push_back(real("tolerance.geometry", [](auto& c) -> auto& { return c.tol.geometry; }));
        f.push_back(real("tolerance.euler", [](auto& c) -> auto& { return c.tol.euler; }));
        f.push_back(real("tolerance.conjugacy", [](auto& c) -> auto& { return c.tol.conjugacy; }));
        f.push_back(real("tolerance.product_law", [](auto& c) -> auto& { return c.tol.product_law; }));
        f.push_back(real("tolerance.edge", [](auto& c) -> auto& { return c.tol.edge; }));
        f.push_back(real("tolerance.collinearity", [](auto& c) -> auto& { return c.tol.collinearity; }));
        f.push_back(real("tolerance.tangent_angle", [](auto& c) -> auto& { return c.tol.tangent_angle; }));

        f.push_back({"output.dir", [](const RunConfig& c) { return c.output_dir; },
                     [](RunConfig& c, std::string_view v) { c.output_dir = trim(v); }});
        return f;
    }();
    return table;
}

const Field& field(std::string_view key) {
    for (const Field& f : fields()) {
        if (f.key == key) return f;
    }
    throw ConfigError(fmt::format("unknown configuration key '{}'", key));
}

void require(bool ok, std::string_view what) {
    if (!ok) throw ConfigError(std::string(what));
}

}  // namespace

void RunConfig::validate() const {
    try {
        model.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    const auto& t = temperature;
    require(t.count >= 5, "temperature.count must be at least 5");
    require(t.max < 1.0, "temperature.max must be below the critical temperature 1");
    require(t.min < t.max, "temperature.min must be below temperature.max");
    require(solver_T_min > 0.0, "temperature.solver_min must be positive");
    require(t.min >= solver_T_min, "temperature.min is below temperature.solver_min");
    require(local_step > 0.0, "temperature.local_step must be positive");

    require(tau.count >= 5, "tau.count must be at least 5");
    require(tau.min >= 1e-5 && tau.max <= 0.1 && tau.min < tau.max,
            "tau grid must satisfy 1e-5 <= tau.min < tau.max <= 0.1");
    require(fit_window.lo > 0.0 && fit_window.lo < fit_window.hi, "fit window must satisfy 0 < lo < hi");
    require(correction_exponent >= 0.0, "fit.correction_exponent must be non-negative");

    require(mesh.T_count >= 2 && mesh.V_count >= 2, "mesh counts must be at least 2");
    require(mesh.T_min >= solver_T_min && mesh.T_min < mesh.T_max,
            "mesh temperatures must satisfy solver_min <= T_min < T_max");
    require(mesh.V_min > vdw::covolume && mesh.V_min < mesh.V_max,
            "mesh volumes must satisfy 1/3 < V_min < V_max");

    require(random_states >= 1, "geometry.random_states must be at least 1");
    require(psecond_floor > 0.0, "edge.psecond_floor must be positive");

    for (double v : {tol.solver, tol.identity, tol.energy_slope, tol.finite_difference, tol.second_derivative,
                     tol.geometry, tol.euler, tol.conjugacy, tol.product_law, tol.edge, tol.collinearity,
                     tol.tangent_angle}) {
        require(v > 0.0, "tolerances must be positive");
    }
    require(!output_dir.empty(), "output.dir must not be empty");
}

ScanOptions RunConfig::scan_options() const {
    ScanOptions o;
    o.solver.T_min = solver_T_min;
    o.solver.residual_tol = tol.solver;
    o.second_derivative = second_derivative;
    o.local_step = local_step;
    return o;
}

AnalysisOptions RunConfig::analysis_options() const {
    AnalysisOptions o;
    o.window = fit_window;
    if (correction_exponent > 0.0) {
        o.correction_exponent = correction_exponent;
    } else {
        o.correction_exponent.reset();
    }
    return o;
}

std::filesystem::path RunConfig::resolved_output_dir() const {
    if (const char* env = std::getenv("GIBBSGEO_OUT"); env != nullptr && *env != '\0') {
        return env;
    }
    return output_dir;
}

RunConfig parse_config(std::istream& in) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(e.what());
    }
    RunConfig cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            throw ConfigError(fmt::format("key '{}' outside any section", section));
        }
        for (const auto& [name, value] : body) {
            field(section + "." + name).set(cfg, value.data());
        }
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
    }
    return parse_config(in);
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError(fmt::format("override '{}' is not of the form section.key=value", assignment));
    }
    field(trim(assignment.substr(0, eq))).set(cfg, assignment.substr(eq + 1));
}

void write_config(std::ostream& out, const RunConfig& cfg) {
    std::string current;
    for (const Field& f : fields()) {
        const auto dot = f.key.find('.');
        const std::string section = f.key.substr(0, dot);
        if (section != current) {
            if (!current.empty()) out << '\n';
            out << '[' << section << "]\n";
            current = section;
        }
        out << f.key.substr(dot + 1) << " = " << f.get(cfg) << '\n';
    }
}

}  // namespace gibbsgeo
