#include "ihox/coherent.hpp"
#include "ihox/dyson.hpp"
#include "ihox/fock.hpp"
#include "ihox/report.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace ihox;

namespace {

RunConfig make_config(int n_trunc, std::optional<int> sub_block, double hbar, double mass, double omega,
                      double alpha_re, double alpha_im, std::optional<double> t_max, std::optional<double> dt,
                      std::uint64_t seed, bool unsafe) {
    RunConfig c;
    c.n_trunc = n_trunc;
    c.sub_block = sub_block;
    c.hbar = hbar;
    c.mass = mass;
    c.omega = omega;
    c.alpha_re = alpha_re;
    c.alpha_im = alpha_im;
    c.t_max = t_max;
    c.dt = dt;
    c.seed = seed;
    c.unsafe = unsafe;
    return c;
}

}  // namespace

PYBIND11_MODULE(_ihox, m) {
    m.doc() = "Inverted harmonic oscillator via a non-unitary Dyson map";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DegenerateError>(m, "DegenerateError", base.ptr());
    py::register_exception<TruncationInadequate>(m, "TruncationInadequate", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

    py::class_<PhysicalParams>(m, "PhysicalParams")
        .def(py::init([](double hbar, double mass, double omega, int n_trunc) {
                 PhysicalParams p{hbar, mass, omega, n_trunc};
                 p.validate();
                 return p;
             }),
             py::arg("hbar") = 1.0, py::arg("mass") = 1.0, py::arg("omega") = 1.0, py::arg("n_trunc") = 128)
        .def_readonly("hbar", &PhysicalParams::hbar)
        .def_readonly("mass", &PhysicalParams::mass)
        .def_readonly("omega", &PhysicalParams::omega)
        .def_readonly("n_trunc", &PhysicalParams::n_trunc);

    m.def("ladder_matrices", [](const PhysicalParams& p) {
        auto [a, ad] = ladder_matrices(p);
        return py::make_tuple(a, ad);
    });
    m.def("quadrature_matrices", [](const PhysicalParams& p) {
        auto [x, q] = quadrature_matrices(p);
        return py::make_tuple(x, q);
    });
    m.def("harmonic_hamiltonian", &harmonic_hamiltonian);
    m.def("inverted_hamiltonian", &inverted_hamiltonian);
    m.def("matrix_exponential", [](const Mat& a) { return matrix_exponential(a); });
    m.def("block_residual", &block_residual, py::arg("m"), py::arg("reference"), py::arg("k"));

    py::class_<DisentangleParams>(m, "DisentangleParams")
        .def_readonly("epsilon", &DisentangleParams::epsilon)
        .def_readonly("mu_plus", &DisentangleParams::mu_plus)
        .def_readonly("mu_minus", &DisentangleParams::mu_minus)
        .def_readonly("theta", &DisentangleParams::theta)
        .def_readonly("chi", &DisentangleParams::chi)
        .def_readonly("v_plus", &DisentangleParams::v_plus)
        .def_readonly("v_zero", &DisentangleParams::v_zero)
        .def_readonly("v_minus", &DisentangleParams::v_minus)
        .def("consistency_residual", &DisentangleParams::consistency_residual);
    m.def("disentangle", &disentangle, py::arg("epsilon"), py::arg("mu_plus"), py::arg("mu_minus"));

    py::class_<DysonMap>(m, "DysonMap")
        .def_readonly("rho", &DysonMap::rho)
        .def_readonly("rho_inv", &DysonMap::rho_inv)
        .def_readonly("eta", &DysonMap::eta);
    m.def("build_inverted_dyson", &build_inverted_dyson);
    m.def("build_general_dyson", &build_general_dyson);
    m.def("single_generator_exponential", &single_generator_exponential);

    m.def(
        "resolve_similarity_sign",
        [](const PhysicalParams& p, const DysonMap& d, int k, double tol) {
            const SignResolution s = resolve_similarity_sign(p, d, k, tol);
            py::dict out;
            out["sigma"] = s.sigma;
            out["residual"] = s.residual;
            out["other_residual"] = s.other_residual;
            return out;
        },
        py::arg("params"), py::arg("dyson"), py::arg("k"), py::arg("tol") = 1e-8);
    m.def("transformed_ladder", [](const PhysicalParams& p, const DysonMap& d) {
        const LadderPair lp = transformed_ladder(p, d);
        return py::make_tuple(lp.A, lp.Abar);
    });

    m.def(
        "coherent_oscillator", [](const PhysicalParams& p, cplx alpha) { return coherent_oscillator(p, alpha).coeffs; },
        py::arg("params"), py::arg("alpha"));
    m.def(
        "coherent_inverted",
        [](const PhysicalParams& p, const DysonMap& d, cplx alpha) { return coherent_inverted(p, d, alpha).coeffs; },
        py::arg("params"), py::arg("dyson"), py::arg("alpha"));
    m.def(
        "evolve_closed_form",
        [](const PhysicalParams& p, const DysonMap& d, cplx alpha, double t) {
            return evolve_closed_form(p, d, coherent_inverted(p, d, alpha), t).coeffs;
        },
        py::arg("params"), py::arg("dyson"), py::arg("alpha"), py::arg("t"));
    m.def(
        "evolve_direct",
        [](const PhysicalParams& p, const DysonMap& d, cplx alpha, double t, int k) {
            return evolve_direct(p, d, coherent_inverted(p, d, alpha), t, k);
        },
        py::arg("params"), py::arg("dyson"), py::arg("alpha"), py::arg("t"), py::arg("k"));

    m.def(
        "verify",
        [](int n_trunc, std::optional<int> sub_block, double hbar, double mass, double omega, double alpha_re,
           double alpha_im, std::optional<double> t_max, std::optional<double> dt, std::uint64_t seed, bool unsafe) {
            const RunConfig c =
                make_config(n_trunc, sub_block, hbar, mass, omega, alpha_re, alpha_im, t_max, dt, seed, unsafe);
            std::string json;
            {
                py::gil_scoped_release release;
                json = report_json(run_verify(c));
            }
            return json;
        },
        "Runs every check and returns the JSON report.", py::arg("n_trunc") = 128, py::arg("sub_block") = py::none(),
        py::arg("hbar") = 1.0, py::arg("mass") = 1.0, py::arg("omega") = 1.0, py::arg("alpha_re") = 0.5,
        py::arg("alpha_im") = 0.0, py::arg("t_max") = py::none(), py::arg("dt") = py::none(),
        py::arg("seed") = RunConfig{}.seed, py::arg("unsafe") = false);

    m.def(
        "trajectory",
        [](int n_trunc, double hbar, double mass, double omega, cplx alpha, const std::vector<double>& times,
           std::optional<int> sub_block) {
            const PhysicalParams p{hbar, mass, omega, n_trunc};
            p.validate();
            const DysonMap d = build_inverted_dyson(p);
            const Trajectory tr = classical_trajectory(p, d, alpha, times, sub_block.value_or(n_trunc / 4));
            py::list rows;
            for (const auto& r : tr.rows) {
                py::dict row;
                row["t"] = r.t;
                row["X_closed"] = r.x_closed;
                row["X_matrix"] = r.x_matrix;
                row["P_closed"] = r.p_closed;
                row["P_matrix"] = r.p_matrix;
                row["dX"] = r.dX;
                row["dP"] = r.dP;
                row["product"] = r.product;
                rows.append(row);
            }
            return rows;
        },
        py::arg("n_trunc") = 64, py::arg("hbar") = 1.0, py::arg("mass") = 1.0, py::arg("omega") = 1.0,
        py::arg("alpha") = cplx(0.5, 0.0), py::arg("times") = std::vector<double>{0.0},
        py::arg("sub_block") = py::none());

    m.def(
        "demo_divergence",
        [](double box_l, int grid_n, double hbar, double mass, double omega) {
            py::list out;
            for (const auto& r : demo_divergence({hbar, mass, omega, 8}, box_l, grid_n))
                out.append(py::make_tuple(r.box, r.naive_norm, r.hermitian_norm));
            return out;
        },
        py::arg("box_l") = 8.0, py::arg("grid_n") = 1001, py::arg("hbar") = 1.0, py::arg("mass") = 1.0,
        py::arg("omega") = 1.0);
}
