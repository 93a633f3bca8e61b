// gibbsgeo <subcommand> [--config <path>] [--set section.key=value]...
//
// Exit status is 0 exactly when every residual check passes, 1 when some
// check fails and 2 for usage or configuration errors.

#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "gibbsgeo/commands.hpp"
#include "gibbsgeo/config.hpp"
#include "gibbsgeo/error.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Gibbs energy surface of a van der Waals fluid: coexistence, curvature, edge of regression, exponents"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    bool print_config = false;
    const std::pair<const char*, const char*> commands[] = {
        {"coexist", "saturation curve and coexistence identities"},
        {"geometry", "curvatures, tie-line angles and surface mesh"},
        {"edge", "edge of regression of the coexistence ruled surface"},
        {"exponents", "near-critical power-law fits"},
        {"all", "every step in order"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
        sub->add_option("--set", overrides, "override one key, e.g. --set temperature.count=80");
        sub->add_flag("--print-config", print_config, "print the effective configuration and exit");
    }
    CLI11_PARSE(app, argc, argv);

    try {
        gibbsgeo::RunConfig cfg = config_path.empty() ? gibbsgeo::RunConfig{} : gibbsgeo::load_config(config_path);
        for (const std::string& o : overrides) gibbsgeo::apply_override(cfg, o);
        cfg.validate();
        if (print_config) {
            gibbsgeo::write_config(std::cout, cfg);
            return 0;
        }

        const auto command = gibbsgeo::command_from_string(app.get_subcommands().front()->get_name());
        const gibbsgeo::RunResult result = gibbsgeo::run_command(command, cfg);
        for (const std::string& m : result.messages) std::cerr << "error: " << m << '\n';

        std::size_t failed = 0;
        for (const auto& r : result.reports) {
            if (!r.pass) {
                ++failed;
                if (failed <= 20) {
                    std::cerr << fmt::format("FAIL {} at {}: {} (tolerance {})\n", r.check,
                                             gibbsgeo::format_real(r.location), gibbsgeo::format_real(r.value),
                                             gibbsgeo::format_real(r.tolerance));
                }
            }
        }
        std::cout << fmt::format("{}: {} checks, {} failed, output in {}\n",
                                 app.get_subcommands().front()->get_name(), result.reports.size(), failed,
                                 result.output_dir.string());
        return failed == 0 ? 0 : 1;
    } catch (const gibbsgeo::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    }
}
