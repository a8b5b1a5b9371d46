#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "wqed/config.hpp"
#include "wqed/error.hpp"
#include "wqed/runner.hpp"

using namespace wqed;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("wqed_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

RunConfig quick(RunMode mode, const fs::path& prefix) {
    RunConfig c;
    c.mode = mode;
    c.t_max = 2.0;
    c.n_points = 21;
    c.n_x = 41;
    c.n_energies = 21;
    c.out = prefix.string();
    return c;
}

}  // namespace

TEST_CASE("config text and overrides") {
    RunConfig c;
    apply_config_text(c, "# comment\n\nmode = field\ngamma_over_omega=0.5\n d_over_lambda = 10 # trailing\n"
                         "snapshot_times = 0.5, 2,10\nreservoir_mode = explicit\npanel_layout = uniform\n");
    CHECK(c.mode == RunMode::Field);
    CHECK(c.gamma_over_omega == 0.5);
    CHECK(c.d_over_lambda == 10.0);
    CHECK(c.snapshot_times == std::vector<double>{0.5, 2.0, 10.0});
    CHECK(c.reservoir_mode == ReservoirMode::Explicit);
    CHECK(c.quadrature.layout == PanelLayout::Uniform);

    apply_overrides(c, {"--t_max", "7", "--n_points=11", "--x_min", "-3"});
    CHECK(c.t_max == 7.0);
    CHECK(c.n_points == 11);
    REQUIRE(c.x_min);
    CHECK(*c.x_min == -3.0);

    CHECK_THROWS_AS(apply_config_text(c, "no_such_key = 1\n"), Error);
    CHECK_THROWS_AS(apply_config_text(c, "t_max = abc\n"), Error);
    CHECK_THROWS_AS(apply_config_text(c, "t_max\n"), Error);
    CHECK_THROWS_AS(apply_overrides(c, {"--t_max"}), Error);
    CHECK_THROWS_AS(apply_overrides(c, {"t_max", "1"}), Error);
    CHECK_THROWS_AS(c.set("mode", "plot"), Error);
    CHECK_THROWS_AS(apply_config_file(c, "/nonexistent/wqed.cfg"), Error);
}

TEST_CASE("config defaults and grids") {
    RunConfig c;
    CHECK(c.Gamma_over_gamma == 0.1);
    const SystemParams p = c.params();
    CHECK(p.gamma_res == doctest::Approx(0.1 * p.gamma_wg));
    const std::vector<double> t = c.time_grid();
    REQUIRE(t.size() == 201);
    CHECK(t.front() == 0.0);
    CHECK(t.back() == 5.0);
    c.x_min = -2.0;
    c.x_max = 2.0;
    c.n_x = 5;
    CHECK(c.x_grid() == std::vector<double>{-2.0, -1.0, 0.0, 1.0, 2.0});

    RunConfig bad;
    bad.gamma_over_omega = -1.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = {};
    bad.n_points = 1;
    CHECK_THROWS_AS(bad.validate(), Error);

    CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("invalid configuration exits with 2") {
    RunConfig c;
    c.d_over_lambda = 0.0;
    std::ostringstream out, err;
    CHECK(run(c, out, err) == kExitInvalidConfig);
    const auto j = nlohmann::json::parse(err.str());
    CHECK(j["exit_code"] == 2);
    CHECK(j["error"] == "invalid_config");
    CHECK(out.str().empty());
}

TEST_CASE("non-convergence exits with 3 and flags the outputs") {
    const fs::path dir = scratch_dir("nonconv");
    RunConfig c = quick(RunMode::Evolve, dir / "run");
    c.quadrature.convergence_tol = 1e-15;
    std::ostringstream out, err;
    CHECK(run(c, out, err) == kExitNonConvergence);
    const std::string csv = slurp(dir / "run_trajectory.csv");
    CHECK(csv.find("# converged = false\n") != std::string::npos);
    const auto rep = nlohmann::json::parse(slurp(dir / "run_report.json"));
    CHECK(rep["converged"] == false);
    CHECK(nlohmann::json::parse(err.str())["exit_code"] == 3);
}

TEST_CASE("trajectory csv layout") {
    const fs::path dir = scratch_dir("layout");
    RunConfig c = quick(RunMode::MarkovCompare, dir / "m");
    std::ostringstream out, err;
    REQUIRE(run(c, out, err) == kExitOk);
    const std::vector<std::string> l = lines(slurp(dir / "m_trajectory.csv"));
    REQUIRE(l.size() > 2);
    CHECK(l[0].rfind("# wqed ", 0) == 0);
    std::size_t header = 0;
    while (header < l.size() && l[header][0] == '#') ++header;
    for (const auto& [k, v] : c.resolved())
        CHECK(std::find(l.begin(), l.begin() + header, "# " + k + " = " + v) != l.begin() + header);
    CHECK(l[header] ==
          "gamma_t,rho_pp,rho_mm,re_rho_pm,im_rho_pm,concurrence,markov_rho_pp,markov_rho_mm,markov_concurrence");
    CHECK(l.size() == header + 1 + 21);
    CHECK(l[header + 1].rfind("0,0.5", 0) == 0);

    const auto rep = nlohmann::json::parse(out.str());
    CHECK(rep["mode"] == "markov-compare");
    CHECK(rep["closure"].contains("even"));
}

TEST_CASE("identical configs give byte-identical files") {
    for (RunMode mode : {RunMode::Evolve, RunMode::Field, RunMode::Spectrum, RunMode::Closure}) {
        const fs::path a = scratch_dir("repro_a"), b = scratch_dir("repro_b");
        RunConfig ca = quick(mode, a / "r"), cb = quick(mode, b / "r");
        cb.out = ca.out;  // same resolved config, files moved after each run
        std::ostringstream o1, e1, o2, e2;
        REQUIRE(run(ca, o1, e1) == kExitOk);
        for (const auto& f : fs::directory_iterator(a)) fs::rename(f.path(), b / f.path().filename());
        REQUIRE(run(ca, o2, e2) == kExitOk);
        CHECK(o1.str() == o2.str());
        std::size_t n = 0;
        for (const auto& f : fs::directory_iterator(a)) {
            CHECK(slurp(f.path()) == slurp(b / f.path().filename()));
            ++n;
        }
        CHECK(n >= (mode == RunMode::Closure ? 1u : 2u));
    }
}

TEST_CASE("field and spectrum files") {
    const fs::path dir = scratch_dir("files");
    RunConfig c = quick(RunMode::Field, dir / "f");
    c.snapshot_times = {0.5, 2.0};
    std::ostringstream out, err;
    REQUIRE(run(c, out, err) == kExitOk);
    CHECK(fs::exists(dir / "f_field_gt0.5.csv"));
    CHECK(fs::exists(dir / "f_field_gt2.csv"));
    const auto rep = nlohmann::json::parse(out.str());
    REQUIRE(rep["snapshots"].size() == 2);

    c = quick(RunMode::Spectrum, dir / "s");
    REQUIRE(run(c, out, err) == kExitOk);
    const std::vector<std::string> l = lines(slurp(dir / "s_spectrum.csv"));
    std::size_t header = 0;
    while (l[header][0] == '#') ++header;
    CHECK(l[header].rfind("energy_over_omega,density_even,density_odd", 0) == 0);
    CHECK(l.size() == header + 1 + 21);
}
