#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cstdint>

#include "tomokl/geometry.hpp"
#include "tomokl/metrics.hpp"
#include "tomokl/noise.hpp"
#include "tomokl/optimizer.hpp"
#include "tomokl/phantom.hpp"
#include "tomokl/projector.hpp"
#include "tomokl/recon.hpp"

namespace py = pybind11;
using namespace tomokl;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Image2D to_image(const Array& a, double spacing) {
    if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
    const std::size_t rows = a.shape(0), cols = a.shape(1);
    std::vector<double> data(a.data(), a.data() + rows * cols);
    return Image2D(rows, cols, std::move(data), spacing);
}

Array to_array(const Image2D& img) {
    Array out({img.rows(), img.cols()});
    std::copy(img.data().begin(), img.data().end(), out.mutable_data());
    return out;
}

SolverConfig solver_config(double alpha, double lambda, std::size_t max_iters, double rel_tol, std::size_t levels) {
    SolverConfig cfg;
    cfg.alpha = alpha;
    cfg.lambda = lambda;
    cfg.max_iters = max_iters;
    cfg.rel_tol = rel_tol;
    cfg.levels = levels;
    cfg.record_trace = false;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_tomokl, m) {
    m.doc() = "Low-dose tomography denoising with KL-fidelity framelet and TV models";

    py::register_exception<UndefinedSnr>(m, "UndefinedSnr", PyExc_ValueError);

    py::class_<ParallelGeometry>(m, "ParallelGeometry")
        .def_static("uniform", &ParallelGeometry::uniform, py::arg("n_angles"), py::arg("n_detectors"),
                    py::arg("spacing"))
        .def_readwrite("angles", &ParallelGeometry::angles)
        .def_readwrite("n_detectors", &ParallelGeometry::n_detectors)
        .def_readwrite("detector_spacing", &ParallelGeometry::detector_spacing);

    py::class_<FanGeometry>(m, "FanGeometry")
        .def_static("uniform", &FanGeometry::uniform, py::arg("n_angles"), py::arg("n_detectors"), py::arg("spacing"),
                    py::arg("source_radius"))
        .def_readwrite("source_radius", &FanGeometry::source_radius)
        .def_readwrite("angles", &FanGeometry::angles)
        .def_readwrite("n_detectors", &FanGeometry::n_detectors)
        .def_readwrite("detector_spacing", &FanGeometry::detector_spacing);

    m.def("default_parallel_geometry", &default_parallel_geometry, py::arg("support_radius"),
          py::arg("n_angles") = 360, py::arg("n_detectors") = 509);
    m.def("default_fan_geometry", &default_fan_geometry, py::arg("support_radius"), py::arg("n_angles") = 360,
          py::arg("n_detectors") = 509, py::arg("source_radius") = 3.0);

    m.def(
        "shepp_logan",
        [](std::size_t size) { return to_array(rasterize(standard_shepp_logan(), size, size)); },
        py::arg("size") = 256, "Modified Shepp-Logan phantom rasterized on [-1, 1]^2.");

    m.def(
        "parallel_project",
        [](const Array& img, const ParallelGeometry& g, double spacing) {
            return to_array(parallel_project(to_image(img, spacing), g).data);
        },
        py::arg("image"), py::arg("geometry"), py::arg("spacing"));
    m.def(
        "fan_project",
        [](const Array& img, const FanGeometry& g, double spacing) {
            return to_array(fan_project(to_image(img, spacing), g).data);
        },
        py::arg("image"), py::arg("geometry"), py::arg("spacing"));

    m.def(
        "add_poisson",
        [](const Array& data, double dose, std::uint64_t seed) {
            return to_array(add_poisson(to_image(data, 1.0), NoiseSpec{dose, seed}));
        },
        py::arg("data"), py::arg("dose"), py::arg("seed") = 0);

    m.def(
        "denoise",
        [](const Array& f, const std::string& model, double weight, std::size_t max_iters, double rel_tol,
           std::size_t levels) {
            const Model mdl = parse_model(model);
            const SolverConfig cfg = mdl == Model::TV ? solver_config(weight, 0.0, max_iters, rel_tol, levels)
                                                      : solver_config(0.0, weight, max_iters, rel_tol, levels);
            DenoiseResult r;
            {
                py::gil_scoped_release release;
                r = denoise(to_image(f, 1.0), mdl, cfg);
            }
            py::dict report;
            report["iterations"] = r.report.iterations;
            report["converged"] = r.report.converged;
            report["final_rel_change"] = r.report.final_rel_change;
            report["initial_objective"] = r.report.initial_objective;
            report["final_objective"] = r.report.final_objective;
            return py::make_tuple(to_array(r.image), report);
        },
        py::arg("sinogram"), py::arg("model"), py::arg("weight"), py::arg("max_iters") = 2000,
        py::arg("rel_tol") = 5e-5, py::arg("levels") = 1,
        "Denoise count data with model 'tv', 'haar', 'linear' or 'cubic'. Returns (image, report).");

    m.def("kl_prox", &kl_prox, py::arg("z"), py::arg("f"), py::arg("beta"));

    m.def(
        "reconstruct_fan",
        [](const Array& sino, const FanGeometry& g, std::size_t size, const std::string& window) {
            FbpConfig cfg;
            cfg.window = parse_window(window);
            cfg.rows = cfg.cols = size;
            return to_array(reconstruct_fan(FanSinogram{g, to_image(sino, 1.0)}, cfg));
        },
        py::arg("sinogram"), py::arg("geometry"), py::arg("size") = 256, py::arg("window") = "ram-lak");

    m.def(
        "snr", [](const Array& u, const Array& ref) { return snr(to_image(u, 1.0), to_image(ref, 1.0)); },
        py::arg("u"), py::arg("reference"));
    m.def(
        "frobenius_error",
        [](const Array& u, const Array& ref) { return frobenius_error(to_image(u, 1.0), to_image(ref, 1.0)); },
        py::arg("u"), py::arg("reference"));

    m.def(
        "singular_direction_fraction",
        [](const std::string& surface, std::size_t samples, double tol, std::uint64_t seed, std::size_t grid) {
            SingularityOptions opts;
            opts.grid_u = opts.grid_v = grid;
            py::gil_scoped_release release;
            return singular_direction_fraction(shipped_surface(surface), samples, tol, seed, opts);
        },
        py::arg("surface"), py::arg("samples") = 20000, py::arg("tol") = 0.1, py::arg("seed") = 0,
        py::arg("grid") = 128);
}
