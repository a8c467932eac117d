#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "subdiff/run_config.hpp"
#include "subdiff/spectral.hpp"
#include "subdiff/stochastic.hpp"
#include "subdiff/verify.hpp"

namespace py = pybind11;

namespace {

subdiff::RngSpec make_rng(std::uint64_t seed, std::uint64_t stream) {
  return {seed, stream};
}

subdiff::PathConfig make_path_config(double dt, long long n_paths, bool bridge) {
  subdiff::PathConfig cfg;
  cfg.dt = dt;
  cfg.n_paths = n_paths;
  cfg.bridge_correction = bridge;
  return cfg;
}

subdiff::KillingMode parse_mode(const std::string& mode) {
  if (mode == "outer") return subdiff::KillingMode::OuterClock;
  if (mode == "timechanged") return subdiff::KillingMode::TimeChangedClock;
  throw std::invalid_argument("mode must be \"outer\" or \"timechanged\"");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  using namespace subdiff;
  m.doc() = "time-fractional diffusion on bounded domains";
  m.attr("__version__") = version_string();

  py::class_<Point>(m, "Point")
      .def(py::init<double, double>(), py::arg("x"), py::arg("y") = 0.0)
      .def_readwrite("x", &Point::x)
      .def_readwrite("y", &Point::y)
      .def("__repr__", [](const Point& p) {
        return "Point(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
      });

  py::class_<IntervalLaplacian>(m, "IntervalLaplacian")
      .def(py::init<double>(), py::arg("length"))
      .def_readonly("length", &IntervalLaplacian::length);
  py::class_<RectangleLaplacian>(m, "RectangleLaplacian")
      .def(py::init<double, double>(), py::arg("lx"), py::arg("ly"))
      .def_readonly("lx", &RectangleLaplacian::lx)
      .def_readonly("ly", &RectangleLaplacian::ly);
  py::class_<DivergenceForm1D>(m, "DivergenceForm1D");
  m.def(
      "divergence_form",
      [](double length, double a0, double a1, double lambda_ell,
         double lambda_cap, int grid_points) {
        return DivergenceForm1D{length, Coefficient::affine(a0, a1), lambda_ell,
                                lambda_cap, grid_points};
      },
      py::arg("length"), py::arg("a0"), py::arg("a1") = 0.0,
      py::arg("lambda_ell") = 0.25, py::arg("lambda_cap") = 4.0,
      py::arg("grid_points") = 512,
      "divergence-form operator (a u')' with affine a(x) = a0 + a1 x");

  py::class_<InitialData>(m, "InitialData")
      .def_readonly("name", &InitialData::name)
      .def("__call__",
           [](const InitialData& f, double x, double y) { return f({x, y}); },
           py::arg("x"), py::arg("y") = 0.0);
  m.def("mode_datum", &mode_datum, py::arg("model"), py::arg("mode_index"));
  m.def("poly_datum", &poly_datum, py::arg("op"));
  m.def("bump_datum", &bump_datum, py::arg("op"));
  m.def("sampled_datum", &sampled_datum, py::arg("xs"), py::arg("fs"));

  py::class_<Eigenmode>(m, "Eigenmode")
      .def_readonly("index", &Eigenmode::index)
      .def_readonly("eigenvalue", &Eigenmode::eigenvalue)
      .def_readonly("norm_check", &Eigenmode::norm_check);

  py::class_<SpectralModel>(m, "SpectralModel")
      .def_property_readonly("size", &SpectralModel::size)
      .def_property_readonly("dim", &SpectralModel::dim)
      .def("eigenvalue", &SpectralModel::eigenvalue, py::arg("n"))
      .def(
          "eigenfunction",
          [](const SpectralModel& mdl, int n, double x, double y) {
            return mdl.eigenfunction(n, {x, y});
          },
          py::arg("n"), py::arg("x"), py::arg("y") = 0.0)
      .def("mode", &SpectralModel::mode, py::arg("n"));

  m.def("eigenpairs", &eigenpairs, py::arg("op"), py::arg("n_modes"));

  py::class_<SpectralCoefficients>(m, "SpectralCoefficients")
      .def_readonly("values", &SpectralCoefficients::values)
      .def_readonly("l2_norm_sq", &SpectralCoefficients::l2_norm_sq);
  m.def("transform", &transform, py::arg("model"), py::arg("f"));

  py::class_<SolutionGrid>(m, "SolutionGrid")
      .def_readonly("times", &SolutionGrid::times)
      .def_readonly("values", &SolutionGrid::values)
      .def("at", &SolutionGrid::at, py::arg("time_index"), py::arg("point_index"));

  m.def(
      "solve_fractional",
      [](const SpectralModel& model, const SpectralCoefficients& coeffs,
         double beta, const std::vector<double>& times,
         const std::vector<Point>& points) {
        return solve_fractional(model, coeffs, FracOrder(beta), times, points);
      },
      py::arg("model"), py::arg("coeffs"), py::arg("beta"), py::arg("times"),
      py::arg("points"));
  m.def("solve_fourth_order", &solve_fourth_order, py::arg("model"),
        py::arg("coeffs"), py::arg("times"), py::arg("points"));
  m.def(
      "heat_kernel",
      [](const SpectralModel& model, double t, double x, double y, double x2,
         double y2, double t_floor) {
        return heat_kernel(model, t, {x, y}, {x2, y2}, t_floor);
      },
      py::arg("model"), py::arg("t"), py::arg("x"), py::arg("y"), py::arg("x2"),
      py::arg("y2"), py::arg("t_floor") = 1e-3);
  m.def("truncation_select", &truncation_select, py::arg("coeffs"), py::arg("eps"));
  py::class_<SmoothnessReport>(m, "SmoothnessReport")
      .def_readonly("k_hat", &SmoothnessReport::k_hat)
      .def_readonly("threshold", &SmoothnessReport::threshold)
      .def_readonly("meets_threshold", &SmoothnessReport::meets_threshold)
      .def_readonly("finite_expansion", &SmoothnessReport::finite_expansion);
  m.def("smoothness_diagnostic", &smoothness_diagnostic, py::arg("coeffs"),
        py::arg("model"));

  m.def(
      "mittag_leffler",
      [](double beta, double x) {
        const MlValue v = mittag_leffler(FracOrder(beta), x);
        return py::make_tuple(v.value, v.abs_error_bound);
      },
      py::arg("beta"), py::arg("x"), "E_beta(x) for x <= 0: (value, error bound)");
  m.def(
      "ml_time_derivative",
      [](double beta, double lam, double t) {
        return ml_time_derivative(FracOrder(beta), lam, t);
      },
      py::arg("beta"), py::arg("lam"), py::arg("t"));
  m.def(
      "stable_density",
      [](double beta, double x) { return stable_density(FracOrder(beta), x); },
      py::arg("beta"), py::arg("x"));
  m.def(
      "inverse_subordinator_density",
      [](double beta, double t, double x) {
        return inverse_subordinator_density(FracOrder(beta), t, x);
      },
      py::arg("beta"), py::arg("t"), py::arg("x"));
  m.def("half_bm_density", &half_bm_density, py::arg("t"), py::arg("l"));

  py::class_<McEstimate>(m, "McEstimate")
      .def_readonly("mean", &McEstimate::mean)
      .def_readonly("std_error", &McEstimate::std_error)
      .def_readonly("n_paths", &McEstimate::n_paths)
      .def_readonly("alive_fraction", &McEstimate::alive_fraction);

  m.def(
      "solve_mc",
      [](const OperatorSpec& op, const InitialData& f, double beta, double t,
         const Point& x0, double dt, long long n_paths, bool bridge,
         std::uint64_t seed, std::uint64_t stream, const std::string& mode) {
        return solve_mc(op, f, FracOrder(beta), t, x0,
                        make_path_config(dt, n_paths, bridge),
                        make_rng(seed, stream), parse_mode(mode));
      },
      py::arg("op"), py::arg("f"), py::arg("beta"), py::arg("t"), py::arg("x0"),
      py::arg("dt") = 1e-4, py::arg("n_paths") = 100000,
      py::arg("bridge_correction") = true, py::arg("seed") = 0,
      py::arg("stream") = 0, py::arg("mode") = "outer",
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "solve_ibm",
      [](const OperatorSpec& op, const InitialData& f, double t, const Point& x0,
         double dt, long long n_paths, bool bridge, std::uint64_t seed,
         std::uint64_t stream) {
        return solve_ibm(op, f, t, x0, make_path_config(dt, n_paths, bridge),
                         make_rng(seed, stream));
      },
      py::arg("op"), py::arg("f"), py::arg("t"), py::arg("x0"),
      py::arg("dt") = 1e-4, py::arg("n_paths") = 100000,
      py::arg("bridge_correction") = true, py::arg("seed") = 0,
      py::arg("stream") = 0, py::call_guard<py::gil_scoped_release>());
  m.def(
      "solve_ibm_twosided",
      [](const OperatorSpec& op, const InitialData& f, double t, const Point& x0,
         double dt, long long n_paths, bool bridge, std::uint64_t seed,
         std::uint64_t stream) {
        return solve_ibm_twosided(op, f, t, x0,
                                  make_path_config(dt, n_paths, bridge),
                                  make_rng(seed, stream));
      },
      py::arg("op"), py::arg("f"), py::arg("t"), py::arg("x0"),
      py::arg("dt") = 1e-4, py::arg("n_paths") = 100000,
      py::arg("bridge_correction") = true, py::arg("seed") = 0,
      py::arg("stream") = 0, py::call_guard<py::gil_scoped_release>());
  m.def(
      "sample_inverse_subordinator",
      [](double beta, double t, std::uint64_t seed, std::uint64_t path_index) {
        PathRng rng(make_rng(seed, 0), path_index);
        return sample_inverse_subordinator(FracOrder(beta), t, rng);
      },
      py::arg("beta"), py::arg("t"), py::arg("seed") = 0,
      py::arg("path_index") = 0);
  m.def(
      "ctrw_scaled_counts",
      [](double beta, double scale_c, double horizon_t, long long n_walkers,
         std::uint64_t seed) {
        return ctrw_scaled_counts(
            CtrwConfig{FracOrder(beta), scale_c, horizon_t, n_walkers},
            make_rng(seed, 0));
      },
      py::arg("beta"), py::arg("scale_c") = 1e4, py::arg("horizon_t") = 1.0,
      py::arg("n_walkers") = 100000, py::arg("seed") = 0,
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "caputo_l1",
      [](const std::vector<double>& samples, double dt, double beta) {
        return caputo_l1(samples, dt, FracOrder(beta));
      },
      py::arg("samples"), py::arg("dt"), py::arg("beta"));
  m.def(
      "subordination_identity",
      [](double beta, double lam, double t) {
        const SubordinationCheck c = subordination_identity(FracOrder(beta), lam, t);
        return py::make_tuple(c.lhs, c.rhs, c.quad_error);
      },
      py::arg("beta"), py::arg("lam"), py::arg("t"));
}
