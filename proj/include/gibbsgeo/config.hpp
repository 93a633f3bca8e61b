#pragma once

// Run configuration: an INI-style file with sections, overridable per key
// with "section.key=value".

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gibbsgeo/coexistence.hpp"
#include "gibbsgeo/critical.hpp"
#include "gibbsgeo/eos.hpp"

namespace gibbsgeo {

enum class GridSpacing { linear, log_toward_critical };

struct TemperatureGridSpec {
    double min = 0.5;
    double max = 0.99;
    std::size_t count = 50;
    GridSpacing spacing = GridSpacing::linear;

    std::vector<double> nodes() const;

    bool operator==(const TemperatureGridSpec&) const = default;
};

struct TauGridSpec {
    double min = 1e-4;
    double max = 1e-2;
    std::size_t count = 25;

    std::vector<double> nodes() const;

    bool operator==(const TauGridSpec&) const = default;
};

struct MeshSpec {
    double T_min = 0.6;
    double T_max = 1.4;
    std::size_t T_count = 17;
    double V_min = 0.45;
    double V_max = 10.0;
    std::size_t V_count = 40;  // log-spaced

    bool operator==(const MeshSpec&) const = default;
};

struct Tolerances {
    double solver = 1e-12;             // Newton residual
    double identity = 1e-11;           // solver-path coexistence identities
    double energy_slope = 1e-10;
    double finite_difference = 1e-8;   // differenced Clausius-Clapeyron
    double second_derivative = 1e-6;   // differentiated Gibbs-Duhem with numerical P'', mu''
    double geometry = 1e-10;           // K and 2H cross-paths
    double euler = 1e-12;
    double conjugacy = 1e-10;
    double product_law = 1e-8;
    double edge = 1e-9;                // plane residuals, reconstruction, tangent identity
    double collinearity = 1e-5;
    double tangent_angle = 1e-4;       // radians

    bool operator==(const Tolerances&) const = default;
};

struct RunConfig {
    EosParams model;
    TemperatureGridSpec temperature;
    double solver_T_min = 0.5;
    SecondDerivativeMethod second_derivative = SecondDerivativeMethod::local;
    double local_step = 1e-3;
    TauGridSpec tau;
    FitWindow fit_window;
    double correction_exponent = 0.5;  // 0 disables the correction term
    MeshSpec mesh;
    std::size_t random_states = 1000;
    unsigned long long seed = 20110101;
    double psecond_floor = 1e-10;
    Tolerances tol;
    std::string output_dir = "gibbsgeo_out";

    /// Throws ConfigError on inconsistent values.
    void validate() const;

    ScanOptions scan_options() const;
    AnalysisOptions analysis_options() const;

    /// Output directory after the GIBBSGEO_OUT override.
    std::filesystem::path resolved_output_dir() const;

    bool operator==(const RunConfig&) const = default;
};

std::string_view to_string(GridSpacing spacing);
std::string_view to_string(SecondDerivativeMethod method);

/// Parses INI text. Missing keys keep their defaults; unknown keys throw ConfigError.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

/// Applies "section.key=value".
void apply_override(RunConfig& cfg, std::string_view assignment);

/// Writes every key, so parse_config(write_config(cfg)) == cfg.
void write_config(std::ostream& out, const RunConfig& cfg);

}  // namespace gibbsgeo
