// wqed <mode> --config <file> [--key value ...] --out <prefix>

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wqed/config.hpp"
#include "wqed/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Two qubits on a lossy waveguide: exact single-excitation dynamics"};
    std::string mode, config_path, out;
    app.add_option("mode", mode,
                   "spectrum | evolve | field | closure | markov-compare | oracle-compare")
        ->required();
    app.add_option("--config", config_path, "key = value file");
    app.add_option("--out", out, "output path prefix");
    app.allow_extras();
    app.footer(
        "Any config key can be overridden with --key value, e.g. --gamma_over_omega 0.5.\n"
        "WQED_THREADS caps the number of worker threads.");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        wqed::write_error_line(std::cerr, wqed::kExitInvalidConfig, "invalid_config", e.what());
        return wqed::kExitInvalidConfig;
    }

    wqed::RunConfig cfg;
    try {
        if (!config_path.empty()) wqed::apply_config_file(cfg, config_path);
        wqed::apply_overrides(cfg, app.remaining());
        cfg.mode = wqed::parse_mode(mode);
        if (!out.empty()) cfg.out = out;
    } catch (const std::exception& e) {
        wqed::write_error_line(std::cerr, wqed::kExitInvalidConfig, "invalid_config", e.what());
        return wqed::kExitInvalidConfig;
    }
    return wqed::run(cfg, std::cout, std::cerr);
}
