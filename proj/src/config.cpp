#include "wqed/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "wqed/error.hpp"

namespace wqed {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        bad(key + ": not a number: '" + v + "'");
    return x;
}

int to_int(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    int x = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        bad(key + ": not an integer: '" + v + "'");
    return x;
}

bool to_bool(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    bad(key + ": not a boolean: '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
    if (out.empty()) bad(key + ": empty list");
    return out;
}

std::optional<double> to_limit(const std::string& key, const std::string& v) {
    if (trim(v) == "auto") return std::nullopt;
    return to_double(key, v);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"mode", [](RunConfig& c, auto&, auto& v) { c.mode = parse_mode(trim(v)); }},
        {"gamma_over_omega", [](RunConfig& c, auto& k, auto& v) { c.gamma_over_omega = to_double(k, v); }},
        {"Gamma_over_gamma", [](RunConfig& c, auto& k, auto& v) { c.Gamma_over_gamma = to_double(k, v); }},
        {"d_over_lambda", [](RunConfig& c, auto& k, auto& v) { c.d_over_lambda = to_double(k, v); }},
        {"initial", [](RunConfig& c, auto&, auto& v) { c.initial = trim(v); }},
        {"t_max", [](RunConfig& c, auto& k, auto& v) { c.t_max = to_double(k, v); }},
        {"n_points", [](RunConfig& c, auto& k, auto& v) { c.n_points = to_int(k, v); }},
        {"kappa", [](RunConfig& c, auto& k, auto& v) { c.quadrature.kappa = to_double(k, v); }},
        {"nodes_per_panel",
         [](RunConfig& c, auto& k, auto& v) { c.quadrature.nodes_per_panel = to_int(k, v); }},
        {"panel_layout",
         [](RunConfig& c, auto& k, auto& v) {
             const std::string t = trim(v);
             if (t == "graded") c.quadrature.layout = PanelLayout::PoleGraded;
             else if (t == "uniform") c.quadrature.layout = PanelLayout::Uniform;
             else bad(k + ": expected graded or uniform");
         }},
        {"min_nodes_per_period",
         [](RunConfig& c, auto& k, auto& v) { c.quadrature.min_nodes_per_period = to_double(k, v); }},
        {"refine_tol", [](RunConfig& c, auto& k, auto& v) { c.quadrature.refine_tol = to_double(k, v); }},
        {"max_refine_depth",
         [](RunConfig& c, auto& k, auto& v) { c.quadrature.max_refine_depth = to_int(k, v); }},
        {"truncation_tol",
         [](RunConfig& c, auto& k, auto& v) { c.quadrature.truncation_tol = to_double(k, v); }},
        {"check_convergence",
         [](RunConfig& c, auto& k, auto& v) { c.quadrature.check_convergence = to_bool(k, v); }},
        {"convergence_tol",
         [](RunConfig& c, auto& k, auto& v) { c.quadrature.convergence_tol = to_double(k, v); }},
        {"x_min", [](RunConfig& c, auto& k, auto& v) { c.x_min = to_limit(k, v); }},
        {"x_max", [](RunConfig& c, auto& k, auto& v) { c.x_max = to_limit(k, v); }},
        {"n_x", [](RunConfig& c, auto& k, auto& v) { c.n_x = to_int(k, v); }},
        {"snapshot_times", [](RunConfig& c, auto& k, auto& v) { c.snapshot_times = to_list(k, v); }},
        {"reservoir_mode",
         [](RunConfig& c, auto& k, auto& v) {
             const std::string t = trim(v);
             if (t == "balance") c.reservoir_mode = ReservoirMode::Balance;
             else if (t == "explicit") c.reservoir_mode = ReservoirMode::Explicit;
             else bad(k + ": expected balance or explicit");
         }},
        {"spectrum_span", [](RunConfig& c, auto& k, auto& v) { c.spectrum_span = to_double(k, v); }},
        {"n_energies", [](RunConfig& c, auto& k, auto& v) { c.n_energies = to_int(k, v); }},
        {"n_wg", [](RunConfig& c, auto& k, auto& v) { c.n_wg = to_int(k, v); }},
        {"out", [](RunConfig& c, auto&, auto& v) { c.out = trim(v); }},
    };
    return table;
}

}  // namespace

const char* to_string(RunMode m) {
    switch (m) {
        case RunMode::Spectrum: return "spectrum";
        case RunMode::Evolve: return "evolve";
        case RunMode::Field: return "field";
        case RunMode::Closure: return "closure";
        case RunMode::MarkovCompare: return "markov-compare";
        case RunMode::OracleCompare: return "oracle-compare";
    }
    return "?";
}

RunMode parse_mode(const std::string& name) {
    for (RunMode m : {RunMode::Spectrum, RunMode::Evolve, RunMode::Field, RunMode::Closure,
                      RunMode::MarkovCompare, RunMode::OracleCompare})
        if (name == to_string(m)) return m;
    bad("unknown mode '" + name + "'");
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    const auto it = setters().find(key);
    if (it == setters().end()) bad("unknown key '" + key + "'");
    it->second(*this, key, value);
}

void RunConfig::validate() const {
    auto positive = [](double x, const char* name) {
        if (!(x > 0.0) || !std::isfinite(x)) bad(std::string(name) + " must be positive");
    };
    positive(gamma_over_omega, "gamma_over_omega");
    positive(d_over_lambda, "d_over_lambda");
    if (!(Gamma_over_gamma >= 0.0) || !std::isfinite(Gamma_over_gamma))
        bad("Gamma_over_gamma must be >= 0");
    initial_state();
    positive(t_max, "t_max");
    if (n_points < 2) bad("n_points must be >= 2");
    quadrature.validate();
    if (n_x < 1) bad("n_x must be >= 1");
    if (x_min && x_max && !(*x_max >= *x_min)) bad("x_max must be >= x_min");
    for (double t : snapshot_times)
        if (!(t >= 0.0) || !std::isfinite(t)) bad("snapshot_times must be >= 0");
    positive(spectrum_span, "spectrum_span");
    if (n_energies < 2) bad("n_energies must be >= 2");
    if (n_wg < 2) bad("n_wg must be >= 2");
    if (out.empty()) bad("out prefix must not be empty");
    params().validate();
}

SystemParams RunConfig::params() const {
    return SystemParams::from_ratios(gamma_over_omega, Gamma_over_gamma, d_over_lambda);
}

InitialState RunConfig::initial_state() const {
    if (initial == "qubit1") return InitialState::qubit1();
    if (initial == "symmetric") return InitialState::symmetric();
    if (initial == "antisymmetric") return InitialState::antisymmetric();
    bad("initial must be qubit1, symmetric or antisymmetric");
}

std::vector<double> RunConfig::time_grid() const {
    std::vector<double> t(n_points);
    for (int i = 0; i < n_points; ++i) t[i] = t_max * i / (n_points - 1);
    return t;
}

std::vector<double> RunConfig::x_grid() const {
    const SystemParams p = params();
    const double latest = *std::max_element(snapshot_times.begin(), snapshot_times.end());
    const double reach = latest / p.gamma_wg * p.v_g / p.wavelength();
    const double half = 0.5 * d_over_lambda + 1.05 * reach + 0.5;
    const double lo = x_min.value_or(-half), hi = x_max.value_or(half);
    std::vector<double> x(n_x);
    for (int i = 0; i < n_x; ++i) x[i] = n_x == 1 ? lo : lo + (hi - lo) * i / (n_x - 1);
    return x;
}

std::vector<std::pair<std::string, std::string>> RunConfig::resolved() const {
    auto limit = [](const std::optional<double>& v) { return v ? format_double(*v) : "auto"; };
    std::string times;
    for (std::size_t i = 0; i < snapshot_times.size(); ++i)
        times += (i ? "," : "") + format_double(snapshot_times[i]);
    const QuadratureSpec& q = quadrature;
    return {
        {"mode", to_string(mode)},
        {"gamma_over_omega", format_double(gamma_over_omega)},
        {"Gamma_over_gamma", format_double(Gamma_over_gamma)},
        {"d_over_lambda", format_double(d_over_lambda)},
        {"initial", initial},
        {"t_max", format_double(t_max)},
        {"n_points", std::to_string(n_points)},
        {"kappa", format_double(q.kappa)},
        {"nodes_per_panel", std::to_string(q.nodes_per_panel)},
        {"panel_layout", q.layout == PanelLayout::PoleGraded ? "graded" : "uniform"},
        {"min_nodes_per_period", format_double(q.min_nodes_per_period)},
        {"refine_tol", format_double(q.refine_tol)},
        {"max_refine_depth", std::to_string(q.max_refine_depth)},
        {"truncation_tol", format_double(q.truncation_tol)},
        {"check_convergence", q.check_convergence ? "true" : "false"},
        {"convergence_tol", format_double(q.convergence_tol)},
        {"x_min", limit(x_min)},
        {"x_max", limit(x_max)},
        {"n_x", std::to_string(n_x)},
        {"snapshot_times", times},
        {"reservoir_mode", reservoir_mode == ReservoirMode::Balance ? "balance" : "explicit"},
        {"spectrum_span", format_double(spectrum_span)},
        {"n_energies", std::to_string(n_energies)},
        {"n_wg", std::to_string(n_wg)},
        {"out", out},
    };
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    int number = 0;
    while (std::getline(ss, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            bad("line " + std::to_string(number) + ": expected key = value");
        cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    }
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    apply_config_text(cfg, ss.str());
}

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--", 0) != 0 || a.size() < 3) bad("unexpected argument '" + a + "'");
        const auto eq = a.find('=');
        if (eq != std::string::npos) {
            cfg.set(a.substr(2, eq - 2), a.substr(eq + 1));
            continue;
        }
        if (i + 1 >= args.size()) bad("missing value for '" + a + "'");
        cfg.set(a.substr(2), args[++i]);
    }
}

}  // namespace wqed
