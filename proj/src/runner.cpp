#include "wqed/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "wqed/eigenstates.hpp"
#include "wqed/error.hpp"
#include "wqed/lattice.hpp"
#include "wqed/markov.hpp"
#include "wqed/spectral.hpp"

namespace wqed {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

struct Context {
    Context(const RunConfig& c) : cfg(c), quad(c.quadrature) {}

    const RunConfig& cfg;
    QuadratureSpec quad;
    bool converged = true;
    std::string convergence_message;
    json report = json::object();
    std::vector<std::string> files;
};

class CsvFile {
public:
    CsvFile(Context& ctx, const std::string& suffix, const std::vector<std::string>& columns)
        : path_(ctx.cfg.out + suffix), out_(path_, std::ios::binary) {
        if (!out_) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path_ + "'");
        out_ << "# wqed " << kVersion << '\n';
        for (const auto& [k, v] : ctx.cfg.resolved()) out_ << "# " << k << " = " << v << '\n';
        if (!ctx.converged) out_ << "# converged = false\n";
        for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
        out_ << '\n';
        ctx.files.push_back(path_);
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i)
            out_ << (i ? "," : "") << format_double(values[i]);
        out_ << '\n';
    }

    void close() {
        out_.close();
        if (!out_) throw Error(ErrorCode::InvalidArgument, "failed writing '" + path_ + "'");
    }

private:
    std::string path_;
    std::ofstream out_;
};

// Runs `body` with the configured quadrature; if the node-doubling check
// fails, reruns without it so that the base results can still be written.
template <class F>
auto with_convergence(Context& ctx, F body) {
    try {
        return body(ctx.quad);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NonConvergence || !ctx.quad.check_convergence) throw;
        ctx.converged = false;
        ctx.convergence_message = e.what();
        QuadratureSpec relaxed = ctx.quad;
        relaxed.check_convergence = false;
        return body(relaxed);
    }
}

json report_json(const QuadratureReport& r) {
    return json{{"nodes", {r.nodes[0], r.nodes[1]}},
                {"panels", {r.panels[0], r.panels[1]}},
                {"window_half_width", r.window_half_width},
                {"truncation_estimate", r.truncation_estimate},
                {"quadrature_error", r.quadrature_error}};
}

json closure_json(const ClosureReport& c) {
    return json{{"even", c.total[0]},
                {"odd", c.total[1]},
                {"continuum", {c.continuum[0], c.continuum[1]}},
                {"localized", {c.localized[0], c.localized[1]}},
                {"quadrature_error", {c.quadrature_error[0], c.quadrature_error[1]}},
                {"truncation_estimate", {c.truncation_estimate[0], c.truncation_estimate[1]}},
                {"nodes", {c.nodes[0], c.nodes[1]}},
                {"window_half_width", c.window_half_width}};
}

const std::vector<std::string> kTrajectoryColumns = {"gamma_t",   "rho_pp",    "rho_mm",
                                                     "re_rho_pm", "im_rho_pm", "concurrence"};

void write_trajectory(Context& ctx, const std::string& suffix, const QubitTrajectory& tr,
                      const QubitTrajectory* markov = nullptr) {
    std::vector<std::string> cols = kTrajectoryColumns;
    if (markov) cols.insert(cols.end(), {"markov_rho_pp", "markov_rho_mm", "markov_concurrence"});
    CsvFile f(ctx, suffix, cols);
    for (std::size_t i = 0; i < tr.size(); ++i) {
        std::vector<double> row = {tr.gamma_t[i],         tr.rho_pp[i],         tr.rho_mm[i],
                                   tr.rho_pm[i].real(),   tr.rho_pm[i].imag(),  tr.concurrence[i]};
        if (markov)
            row.insert(row.end(), {markov->rho_pp[i], markov->rho_mm[i], markov->concurrence[i]});
        f.row(row);
    }
    f.close();
}

QubitTrajectory spectral_trajectory(Context& ctx) {
    const SystemParams p = ctx.cfg.params();
    const std::vector<double> t = ctx.cfg.time_grid();
    QubitTrajectory tr = with_convergence(ctx, [&](const QuadratureSpec& q) {
        return trajectory(p, ctx.cfg.initial_state(), t, q);
    });
    if (tr.report) ctx.report["quadrature"] = report_json(*tr.report);
    return tr;
}

void run_evolve(Context& ctx) {
    write_trajectory(ctx, "_trajectory.csv", spectral_trajectory(ctx));
}

void run_markov(Context& ctx) {
    const SystemParams p = ctx.cfg.params();
    const QubitTrajectory tr = spectral_trajectory(ctx);
    const QubitTrajectory mk = markov_trajectory(p, tr.gamma_t, ctx.cfg.initial_state());
    write_trajectory(ctx, "_trajectory.csv", tr, &mk);
    const MarkovRates r = markov_rates(p);
    // rho_-- against (1/2) exp(-Gamma t), the subradiant decay at resonance
    double tracking = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const double ref = 0.5 * std::exp(-p.gamma_res / p.gamma_wg * tr.gamma_t[i]);
        tracking = std::max(tracking, std::abs(tr.rho_mm[i] - ref) / ref);
    }
    ctx.report["markov"] = json{{"Gamma_plus", r.Gamma_plus},
                                {"Gamma_minus", r.Gamma_minus},
                                {"g", r.g},
                                {"deviation", markov_deviation(tr, mk)},
                                {"rho_mm_vs_half_exp_Gamma_t", tracking}};
}

void run_oracle(Context& ctx) {
    const SystemParams p = ctx.cfg.params();
    const QubitTrajectory tr = spectral_trajectory(ctx);
    const LatticeSpec spec = LatticeSpec::for_times(p, ctx.cfg.t_max, ctx.cfg.n_wg);
    LatticeDiagnostics diag;
    const QubitTrajectory ex = evolve_exact(p, ctx.cfg.initial_state(), tr.gamma_t, spec, &diag);
    write_trajectory(ctx, "_trajectory.csv", tr);
    write_trajectory(ctx, "_oracle.csv", ex);
    double dev = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i)
        dev = std::max({dev, std::abs(tr.rho_pp[i] - ex.rho_pp[i]),
                        std::abs(tr.rho_mm[i] - ex.rho_mm[i]),
                        std::abs(tr.rho_pm[i] - ex.rho_pm[i])});
    ctx.report["oracle"] = json{{"n_wg", spec.n_wg},
                                {"window", {spec.window_lo, spec.window_hi}},
                                {"spacing", spec.spacing()},
                                {"recurrence_gamma_t", diag.recurrence_gamma_t},
                                {"unitarity_error", diag.unitarity_error},
                                {"max_deviation", dev}};
}

std::string time_tag(double gt) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", gt);
    return buf;
}

void run_field(Context& ctx) {
    const SystemParams p = ctx.cfg.params();
    const std::vector<double> x = ctx.cfg.x_grid();
    json snaps = json::array();
    for (double gt : ctx.cfg.snapshot_times) {
        const FieldSnapshot s = with_convergence(ctx, [&](const QuadratureSpec& q) {
            return field_snapshot(p, ctx.cfg.initial_state(), gt, x, q, ctx.cfg.reservoir_mode);
        });
        CsvFile f(ctx, "_field_gt" + time_tag(gt) + ".csv", {"x_over_lambda", "density"});
        for (std::size_t i = 0; i < x.size(); ++i) f.row({s.x_over_lambda[i], s.density[i]});
        f.close();
        snaps.push_back(json{{"gamma_t", gt},
                             {"file", ctx.files.back()},
                             {"rho_pp", s.qubit_even},
                             {"rho_mm", s.qubit_odd},
                             {"waveguide", s.waveguide_probability},
                             {"reservoir", s.reservoir_probability},
                             {"total", total_probability(s)},
                             {"quadrature", report_json(s.report)}});
    }
    ctx.report["snapshots"] = snaps;
}

// |alpha|^2 / (2 pi v_g) of one branch; at the bound-state energy of a
// lossless resonant sector the removable limit is taken from both sides.
double branch_density(const SystemParams& p, Subspace s, double eps, bool quasi) {
    auto eval = [&](double e) {
        const EigenCoeffs c =
            quasi ? quasi_localized_coeffs(p, s, e) : scattering_coeffs_lossy(p, s, e);
        return std::norm(c.alpha) / (2.0 * std::numbers::pi * p.v_g);
    };
    try {
        return eval(eps);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::LocalizedPole) throw;
        const double h = 1e-6 * p.gamma_wg;
        return 0.5 * (eval(eps - h) + eval(eps + h));
    }
}

void run_spectrum(Context& ctx) {
    const SystemParams p = ctx.cfg.params();
    const double half = ctx.cfg.spectrum_span * (2.0 * p.gamma_wg + p.gamma_res);
    const int n = ctx.cfg.n_energies;
    CsvFile f(ctx, "_spectrum.csv",
              {"energy_over_omega", "density_even", "density_odd", "scattering_even",
               "quasi_localized_even", "scattering_odd", "quasi_localized_odd"});
    for (int i = 0; i < n; ++i) {
        const double eps = p.omega - half + 2.0 * half * i / (n - 1);
        double br[4] = {};
        for (Subspace s : kSubspaces) {
            const int k = s == Subspace::Even ? 0 : 2;
            br[k] = branch_density(p, s, eps, false);
            br[k + 1] = p.lossless() ? 0.0 : branch_density(p, s, eps, true);
        }
        f.row({eps / p.omega, br[0] + br[1], br[2] + br[3], br[0], br[1], br[2], br[3]});
    }
    f.close();
    if (const auto order = resonance_order(p); order && p.lossless())
        ctx.report["localized_fraction"] = localized_fraction(p);
}

void run_mode(Context& ctx) {
    switch (ctx.cfg.mode) {
        case RunMode::Spectrum: run_spectrum(ctx); break;
        case RunMode::Evolve: run_evolve(ctx); break;
        case RunMode::Field: run_field(ctx); break;
        case RunMode::Closure: break;
        case RunMode::MarkovCompare: run_markov(ctx); break;
        case RunMode::OracleCompare: run_oracle(ctx); break;
    }
}

std::string error_kind(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidArgument: return "invalid_config";
        case ErrorCode::NonConvergence: return "non_convergence";
        default: return "computation_error";
    }
}

}  // namespace

void write_error_line(std::ostream& err, int exit_code, const std::string& kind,
                      const std::string& message) {
    err << json{{"error", kind}, {"exit_code", exit_code}, {"message", message}}.dump() << '\n';
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        write_error_line(err, kExitInvalidConfig, "invalid_config", e.what());
        return kExitInvalidConfig;
    }
    Context ctx(cfg);
    try {
        ctx.report["mode"] = to_string(cfg.mode);
        json config = json::object();
        for (const auto& [k, v] : cfg.resolved()) config[k] = v;
        ctx.report["config"] = config;
        const SystemParams p = cfg.params();
        ctx.report["params"] = json{{"omega", p.omega},  {"gamma", p.gamma_wg},
                                    {"Gamma", p.gamma_res}, {"d", p.d},
                                    {"v_g", p.v_g},       {"tau", p.delay()}};
        ctx.report["closure"] = closure_json(closure_check(p, ctx.quad));
        run_mode(ctx);
        ctx.report["converged"] = ctx.converged;
        if (!ctx.converged) ctx.report["convergence_message"] = ctx.convergence_message;
        ctx.files.push_back(cfg.out + "_report.json");
        ctx.report["files"] = ctx.files;
        std::ofstream rep(ctx.files.back(), std::ios::binary);
        if (!rep) throw Error(ErrorCode::InvalidArgument, "cannot write '" + ctx.files.back() + "'");
        rep << ctx.report.dump(2) << '\n';
        rep.close();
        if (!rep) throw Error(ErrorCode::InvalidArgument, "failed writing report");
        out << ctx.report.dump(2) << '\n';
    } catch (const Error& e) {
        const int code = e.code() == ErrorCode::InvalidArgument ? kExitInvalidConfig
                         : e.code() == ErrorCode::NonConvergence ? kExitNonConvergence
                                                                 : kExitFailure;
        write_error_line(err, code, error_kind(e.code()), e.what());
        return code;
    } catch (const std::exception& e) {
        write_error_line(err, kExitFailure, "internal_error", e.what());
        return kExitFailure;
    }
    if (!ctx.converged) {
        write_error_line(err, kExitNonConvergence, "non_convergence", ctx.convergence_message);
        return kExitNonConvergence;
    }
    return kExitOk;
}

}  // namespace wqed
