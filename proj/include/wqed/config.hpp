// config.hpp - run configuration for the wqed tool: flat key=value text,
// every key also settable as a --key value override.

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wqed/model.hpp"
#include "wqed/spectral.hpp"

namespace wqed {

enum class RunMode { Spectrum, Evolve, Field, Closure, MarkovCompare, OracleCompare };

const char* to_string(RunMode m);
/// Throws Error(InvalidArgument) for an unknown name.
RunMode parse_mode(const std::string& name);

struct RunConfig {
    RunMode mode = RunMode::Evolve;

    double gamma_over_omega = 0.01;
    double Gamma_over_gamma = 0.1;
    double d_over_lambda = 1.0;
    std::string initial = "qubit1";  // qubit1 | symmetric | antisymmetric

    // time grid in gamma*t, n_points equally spaced samples on [0, t_max]
    double t_max = 5.0;
    int n_points = 201;

    QuadratureSpec quadrature;

    // field snapshots; positions in x/lambda, unset limits follow the light cone
    std::optional<double> x_min;
    std::optional<double> x_max;
    int n_x = 801;
    std::vector<double> snapshot_times{1.0};
    ReservoirMode reservoir_mode = ReservoirMode::Balance;

    // spectrum: energies Omega +- span (2 gamma + Gamma)
    double spectrum_span = 10.0;
    int n_energies = 401;

    // lattice oracle
    int n_wg = 4000;

    std::string out = "wqed";

    /// Sets one key from its text value. Throws Error(InvalidArgument) for an
    /// unknown key or a malformed value.
    void set(const std::string& key, const std::string& value);
    /// Throws Error(InvalidArgument) when a value is out of range.
    void validate() const;

    SystemParams params() const;
    InitialState initial_state() const;
    std::vector<double> time_grid() const;
    /// Snapshot x grid: explicit limits, or the inter-qubit region plus the
    /// light cone of the latest snapshot time.
    std::vector<double> x_grid() const;

    /// Every key with its resolved value, in a fixed order.
    std::vector<std::pair<std::string, std::string>> resolved() const;
};

/// Parses key=value lines; '#' starts a comment, blank lines are skipped.
/// Keys not listed in RunConfig are rejected.
void apply_config_text(RunConfig& cfg, const std::string& text);
/// Reads a config file. Throws Error(InvalidArgument) if it cannot be read.
void apply_config_file(RunConfig& cfg, const std::string& path);
/// Applies "--key value" / "--key=value" pairs in order.
void apply_overrides(RunConfig& cfg, const std::vector<std::string>& args);

/// 17-significant-digit decimal, identical on every run.
std::string format_double(double x);

}  // namespace wqed
