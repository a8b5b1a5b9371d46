#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <vector>

#include "wqed/eigenstates.hpp"
#include "wqed/error.hpp"
#include "wqed/lattice.hpp"
#include "wqed/markov.hpp"
#include "wqed/model.hpp"
#include "wqed/spectral.hpp"

namespace py = pybind11;
using namespace wqed;

namespace {

template <class T>
py::array_t<T> array(const std::vector<T>& v) {
    return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

std::vector<double> times(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    return {a.data(), a.data() + a.size()};
}

py::dict trajectory_dict(const QubitTrajectory& t) {
    py::dict d;
    d["gamma_t"] = array(t.gamma_t);
    d["rho_pp"] = array(t.rho_pp);
    d["rho_mm"] = array(t.rho_mm);
    d["rho_pm"] = array(t.rho_pm);
    d["concurrence"] = array(t.concurrence);
    if (t.report) d["converged"] = t.report->converged;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Two qubits on a 1D waveguide with reservoir losses, single-excitation sector.";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

    py::enum_<Subspace>(m, "Subspace").value("Even", Subspace::Even).value("Odd", Subspace::Odd);

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init<>())
        .def_static("from_ratios", &SystemParams::from_ratios, py::arg("gamma_over_omega"),
                    py::arg("Gamma_over_gamma"), py::arg("d_over_lambda"), py::arg("omega") = 1.0,
                    py::arg("v_g") = 1.0)
        .def_readwrite("omega", &SystemParams::omega)
        .def_readwrite("gamma_wg", &SystemParams::gamma_wg)
        .def_readwrite("gamma_res", &SystemParams::gamma_res)
        .def_readwrite("d", &SystemParams::d)
        .def_readwrite("v_g", &SystemParams::v_g)
        .def_property_readonly("wavelength", &SystemParams::wavelength)
        .def_property_readonly("delay", &SystemParams::delay)
        .def("validate", &SystemParams::validate)
        .def("__repr__", &SystemParams::describe);

    py::class_<InitialState>(m, "InitialState")
        .def(py::init<cplx, cplx>(), py::arg("c1") = cplx(1.0), py::arg("c2") = cplx(0.0))
        .def_static("qubit1", &InitialState::qubit1)
        .def_static("symmetric", &InitialState::symmetric)
        .def_static("antisymmetric", &InitialState::antisymmetric)
        .def_readwrite("c1", &InitialState::c1)
        .def_readwrite("c2", &InitialState::c2);

    py::class_<QuadratureSpec>(m, "QuadratureSpec")
        .def(py::init<>())
        .def_readwrite("kappa", &QuadratureSpec::kappa)
        .def_readwrite("nodes_per_panel", &QuadratureSpec::nodes_per_panel)
        .def_readwrite("min_nodes_per_period", &QuadratureSpec::min_nodes_per_period)
        .def_readwrite("refine_tol", &QuadratureSpec::refine_tol)
        .def_readwrite("truncation_tol", &QuadratureSpec::truncation_tol)
        .def_readwrite("check_convergence", &QuadratureSpec::check_convergence)
        .def_readwrite("convergence_tol", &QuadratureSpec::convergence_tol);

    m.def("resonance_order", [](const SystemParams& p) { return resonance_order(p); });
    m.def("localized_fraction", &localized_fraction);
    m.def("purcell_factor", &purcell_factor);
    m.def("beta_factor", &beta_factor);

    m.def("transmission", [](const SystemParams& p, double eps) {
        const Transmission t = physical_transmission(p, eps);
        return py::make_tuple(t.t, t.r);
    }, "Transmission and reflection amplitudes of the lossless system.");

    m.def("closure_check", [](const SystemParams& p, const QuadratureSpec& q) {
        const ClosureReport r = closure_check(p, q);
        py::dict d;
        d["even"] = r.total[0];
        d["odd"] = r.total[1];
        d["continuum"] = py::make_tuple(r.continuum[0], r.continuum[1]);
        d["localized"] = py::make_tuple(r.localized[0], r.localized[1]);
        return d;
    }, py::arg("params"), py::arg("quad") = QuadratureSpec{});

    m.def("trajectory", [](const SystemParams& p, py::array_t<double, py::array::c_style | py::array::forcecast> gt,
                           const InitialState& init, const QuadratureSpec& q) {
        return trajectory_dict(trajectory(p, init, times(gt), q));
    }, py::arg("params"), py::arg("gamma_t"), py::arg("init") = InitialState{}, py::arg("quad") = QuadratureSpec{},
          "Exact qubit trajectory on a grid of gamma*t.");

    m.def("markov_trajectory", [](const SystemParams& p, py::array_t<double, py::array::c_style | py::array::forcecast> gt,
                                  const InitialState& init) {
        return trajectory_dict(markov_trajectory(p, times(gt), init));
    }, py::arg("params"), py::arg("gamma_t"), py::arg("init") = InitialState{});

    m.def("markov_deviation", [](const SystemParams& p, py::array_t<double, py::array::c_style | py::array::forcecast> gt) {
        const std::vector<double> t = times(gt);
        return markov_deviation(trajectory(p, InitialState{}, t), markov_trajectory(p, t));
    }, py::arg("params"), py::arg("gamma_t"), "Deviation of the exact from the Markovian trajectory, qubit 1 excited.");

    m.def("field_snapshot", [](const SystemParams& p, double gt,
                               py::array_t<double, py::array::c_style | py::array::forcecast> x,
                               const InitialState& init) {
        const FieldSnapshot f = field_snapshot(p, init, gt, times(x));
        py::dict d;
        d["x_over_lambda"] = array(f.x_over_lambda);
        d["density"] = array(f.density);
        d["interference"] = array(f.interference);
        d["qubit"] = f.qubit_even + f.qubit_odd;
        d["waveguide"] = f.waveguide_probability;
        d["reservoir"] = f.reservoir_probability;
        d["total"] = total_probability(f);
        return d;
    }, py::arg("params"), py::arg("gamma_t"), py::arg("x_over_lambda"), py::arg("init") = InitialState{});

    m.def("lattice_trajectory", [](const SystemParams& p, py::array_t<double, py::array::c_style | py::array::forcecast> gt,
                                   int n_wg) {
        const std::vector<double> t = times(gt);
        const double t_max = t.empty() ? 1.0 : std::max(t.back(), 1e-3);
        LatticeDiagnostics diag;
        py::dict d = trajectory_dict(evolve_exact(p, InitialState{}, t, LatticeSpec::for_times(p, t_max, n_wg), &diag));
        d["unitarity_error"] = diag.unitarity_error;
        d["recurrence_gamma_t"] = diag.recurrence_gamma_t;
        return d;
    }, py::arg("params"), py::arg("gamma_t"), py::arg("n_wg") = 4000,
          "Exact diagonalization of the discretized continuum, qubit 1 excited.");
}
