#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "authbound/attack_solver.hpp"
#include "authbound/gaussian_info.hpp"
#include "authbound/io.hpp"
#include "authbound/oracle.hpp"
#include "authbound/rng.hpp"

namespace py = pybind11;
using namespace authbound;

namespace {

WishartField field_from_string(const std::string& s) {
  if (s == "real") return WishartField::Real;
  if (s == "complex") return WishartField::Complex;
  throw StructuralError("field must be 'real' or 'complex'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "optimal channel-forging attacks and error-region bounds";

  py::register_exception<StructuralError>(m, "StructuralError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::class_<JointChannelCovariance>(m, "JointChannelCovariance")
      .def_static("from_blocks", &JointChannelCovariance::from_blocks, py::arg("Kxx"),
                  py::arg("Kxy"), py::arg("Kxz"), py::arg("Kyy"), py::arg("Kyz"),
                  py::arg("Kzz"))
      .def_property_readonly("n", &JointChannelCovariance::n)
      .def_property_readonly("m", &JointChannelCovariance::m)
      .def_property_readonly("Kxx", &JointChannelCovariance::Kxx)
      .def_property_readonly("Kxy", &JointChannelCovariance::Kxy)
      .def_property_readonly("Kxz", &JointChannelCovariance::Kxz)
      .def_property_readonly("Kyy", &JointChannelCovariance::Kyy)
      .def_property_readonly("Kyz", &JointChannelCovariance::Kyz)
      .def_property_readonly("Kzz", &JointChannelCovariance::Kzz)
      .def("assembled", &JointChannelCovariance::assembled)
      .def("xy_joint", &JointChannelCovariance::xy_joint)
      .def("xz_corner", &JointChannelCovariance::xz_corner)
      .def("psd_tol", &JointChannelCovariance::psd_tol);

  py::class_<AttackParameters>(m, "AttackParameters")
      .def(py::init([](Matrix Z, Matrix C) {
             return AttackParameters{std::move(Z), std::move(C)};
           }),
           py::arg("Z"), py::arg("C"))
      .def_readonly("Z", &AttackParameters::Z)
      .def_readonly("C", &AttackParameters::C);

  py::class_<AttackSolution>(m, "AttackSolution")
      .def_readonly("params", &AttackSolution::params)
      .def_readonly("j_star", &AttackSolution::j_star)
      .def_readonly("d_star", &AttackSolution::d_star)
      .def_readonly("iterations", &AttackSolution::iterations)
      .def_readonly("converged_at", &AttackSolution::converged_at)
      .def_readonly("converged", &AttackSolution::converged)
      .def_readonly("stationarity_residual", &AttackSolution::stationarity_residual)
      .def_readonly("history", &AttackSolution::history)
      .def_readonly("regularized", &AttackSolution::regularized)
      .def_readonly("projected", &AttackSolution::projected)
      .def_readonly("projection_fallback", &AttackSolution::projection_fallback)
      .def_readonly("relaxed_cost", &AttackSolution::relaxed_cost)
      .def_readonly("eta", &AttackSolution::eta);

  py::class_<AttackStrategy>(m, "AttackStrategy")
      .def_readonly("gain", &AttackStrategy::gain)
      .def_readonly("cond_cov", &AttackStrategy::cond_cov);

  py::class_<PerturbationReport>(m, "PerturbationReport")
      .def_readonly("j_star", &PerturbationReport::j_star)
      .def_readonly("min_j_found", &PerturbationReport::min_j_found)
      .def_readonly("improved", &PerturbationReport::improved)
      .def_readonly("deltas", &PerturbationReport::deltas)
      .def_readonly("scale", &PerturbationReport::scale)
      .def_readonly("seed", &PerturbationReport::seed);

  m.def("build_identity_scenario", &build_identity_scenario, py::arg("n"),
        py::arg("rho"), py::arg("sigma"), py::arg("tau"));
  m.def(
      "sample_wishart_scenario",
      [](Eigen::Index n, std::uint64_t seed, const std::string& field) {
        const auto draw = sample_wishart_scenario(n, seed, field_from_string(field));
        return py::make_tuple(draw.cov, draw.attempts);
      },
      py::arg("n"), py::arg("seed"), py::arg("field") = "real",
      "returns (covariance, resample_attempts)");
  m.def(
      "validate",
      [](const JointChannelCovariance& K) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& v : validate(K).violations) out.emplace_back(v.what, v.magnitude);
        return out;
      },
      py::arg("cov"), "list of (violation, magnitude), empty when the model is valid");
  m.def("schur_A", &schur_A, py::arg("cov"));
  m.def("schur_B", &schur_B, py::arg("cov"));

  m.def("kl_gaussian", &kl_gaussian, py::arg("K0"), py::arg("K1"));
  m.def("binary_divergence", &binary_divergence, py::arg("phi"), py::arg("psi"));
  m.def("beta_lower_bound", &beta_lower_bound, py::arg("alpha"), py::arg("d_star"));
  m.def(
      "region_boundary",
      [](double d_star, const std::vector<double>& grid) {
        return region_boundary(d_star, grid).points;
      },
      py::arg("d_star"), py::arg("alpha_grid"),
      "list of (alpha, beta_low) pairs");

  m.def(
      "solve_relaxed",
      [](const JointChannelCovariance& K) {
        const auto r = solve_relaxed(K);
        return py::make_tuple(r.Z, r.X);
      },
      py::arg("cov"), "closed-form (Z, X) of the relaxed problem");
  m.def("is_feasible", &is_feasible, py::arg("cov"), py::arg("Z"), py::arg("X"));
  m.def(
      "project_to_feasible",
      [](const JointChannelCovariance& K, const Matrix& Z, const Matrix& X) {
        const auto p = project_to_feasible(K, Z, X);
        return py::make_tuple(p.params, p.clipped, p.fallback, p.epsilon);
      },
      py::arg("cov"), py::arg("Z"), py::arg("X"),
      "returns (params, clipped, fallback, epsilon)");

  const auto opts_from = [](int max_iter, double rel_tol) {
    SolveOptions o;
    o.max_iter = max_iter;
    o.rel_tol = rel_tol;
    return o;
  };
  m.def(
      "solve",
      [opts_from](const JointChannelCovariance& K, int max_iter, double rel_tol) {
        return solve(K, opts_from(max_iter, rel_tol));
      },
      py::arg("cov"), py::arg("max_iter") = 200, py::arg("rel_tol") = 1e-10);
  m.def(
      "iterate_fixed_point",
      [opts_from](const JointChannelCovariance& K, const AttackParameters& init,
                  int max_iter, double rel_tol) {
        return iterate_fixed_point(K, init, opts_from(max_iter, rel_tol));
      },
      py::arg("cov"), py::arg("init"), py::arg("max_iter") = 200,
      py::arg("rel_tol") = 1e-10);

  m.def("cost_J", &cost_J, py::arg("cov"), py::arg("params"));
  m.def("divergence_D", &divergence_D, py::arg("cov"), py::arg("params"));
  m.def("stationarity_residual", &stationarity_residual, py::arg("cov"),
        py::arg("params"));
  m.def("assemble_xv", &assemble_xv, py::arg("cov"), py::arg("params"));
  m.def("assemble_joint", &assemble_joint, py::arg("cov"), py::arg("params"));
  m.def("extract_strategy", &extract_strategy, py::arg("cov"), py::arg("params"));
  m.def("perturb_and_check", &perturb_and_check, py::arg("cov"), py::arg("solution"),
        py::arg("scale") = 0.01, py::arg("trials") = 1000, py::arg("seed") = 0);

  m.def(
      "brute_force_scalar",
      [](const JointChannelCovariance& K, double z_lo, double z_hi, double c_lo,
         double c_hi, double step) {
        const auto best = oracle::brute_force_scalar(K, {z_lo, z_hi, c_lo, c_hi, step});
        return py::make_tuple(best.z, best.c, best.j);
      },
      py::arg("cov"), py::arg("z_lo") = -3.0, py::arg("z_hi") = 3.0,
      py::arg("c_lo") = 0.0, py::arg("c_hi") = 3.0, py::arg("step") = 1e-3,
      "returns the grid minimizer (z, c, j)");
  m.def(
      "finite_difference_gradient",
      [](const JointChannelCovariance& K, const AttackParameters& p, double h_base) {
        const auto g = oracle::finite_difference_gradient(K, p, h_base);
        return py::make_tuple(g.labels, g.values, g.norm, g.relative_norm);
      },
      py::arg("cov"), py::arg("params"), py::arg("h_base") = 1e-6,
      "returns (labels, values, norm, relative_norm)");
  m.def("check_zero_block_inverse", &oracle::check_zero_block_inverse, py::arg("M"),
        py::arg("n"), py::arg("m"));

  m.def("derive_seed", &derive_seed, py::arg("base"), py::arg("stream"));

  m.attr("__version__") = "0.1.0";
}
