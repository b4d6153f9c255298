// Python bindings. Parameters cross the boundary as JSON text (the same
// schema as the "physics" config section); fields as C-ordered float64 arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "pfsim/config.hpp"
#include "pfsim/dataset.hpp"
#include "pfsim/energetics.hpp"
#include "pfsim/evolution.hpp"
#include "pfsim/residuals.hpp"
#include "pfsim/serialize.hpp"
#include "pfsim/spectral.hpp"

namespace py = pybind11;
using namespace pfsim;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

SimParams parse_params(const std::string& text) {
  return text.empty() ? SimParams{} : params_from_json(nlohmann::json::parse(text));
}

GridPtr grid_for(std::size_t nx, std::size_t ny, std::optional<double> lx, std::optional<double> ly) {
  return Grid2D::make(nx, ny, lx.value_or(static_cast<double>(nx)), ly.value_or(static_cast<double>(ny)));
}

Field2D to_field(const GridPtr& g, const double* data) {
  Field2D f(g);
  std::memcpy(f.storage().data(), data, g->size() * sizeof(double));
  return f;
}

Field2D field_from(const Array& a, std::optional<double> lx, std::optional<double> ly) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
  const auto g = grid_for(a.shape(0), a.shape(1), lx, ly);
  return to_field(g, a.data());
}

Array to_array(const Field2D& f) {
  Array out({f.grid().nx(), f.grid().ny()});
  std::memcpy(out.mutable_data(), f.storage().data(), f.size() * sizeof(double));
  return out;
}

// (3, T, nx, ny) <-> Trajectory
Trajectory traj_from(const Array& a, double dt, const SimParams& p, std::optional<double> lx,
                     std::optional<double> ly) {
  if (a.ndim() != 4 || a.shape(0) != 3) throw std::invalid_argument("expected an array of shape (3, T, nx, ny)");
  const std::size_t t = a.shape(1), nx = a.shape(2), ny = a.shape(3);
  const auto g = grid_for(nx, ny, lx, ly);
  Trajectory tr;
  tr.dt = dt;
  tr.params = p;
  const std::size_t plane = nx * ny;
  for (std::size_t f = 0; f < t; ++f) {
    FieldSet fs{to_field(g, a.data() + (0 * t + f) * plane), to_field(g, a.data() + (1 * t + f) * plane),
                to_field(g, a.data() + (2 * t + f) * plane), static_cast<double>(f) * dt};
    tr.frames.push_back(std::move(fs));
  }
  return tr;
}

void copy_traj(const Trajectory& tr, double* dst) {
  const std::size_t t = tr.size(), plane = tr.grid().size();
  for (int ch = 0; ch < 3; ++ch)
    for (std::size_t f = 0; f < t; ++f) {
      const auto& fr = tr.frames[f];
      const Field2D& src = ch == 0 ? fr.c : fr.eta(ch);
      std::memcpy(dst + (static_cast<std::size_t>(ch) * t + f) * plane, src.storage().data(), plane * sizeof(double));
    }
}

Array traj_to(const Trajectory& tr) {
  Array out({std::size_t{3}, tr.size(), tr.grid().nx(), tr.grid().ny()});
  copy_traj(tr, out.mutable_data());
  return out;
}

Axis axis_of(int a) {
  if (a == 0) return Axis::X;
  if (a == 1) return Axis::Y;
  throw std::invalid_argument("axis must be 0 or 1");
}

py::dict dataset_dict(const Dataset& d) {
  Array data({d.size(), std::size_t{3}, d.frames, d.grid->nx(), d.grid->ny()});
  const std::size_t block = 3 * d.frames * d.grid->size();
  for (std::size_t n = 0; n < d.size(); ++n) copy_traj(d.instances[n], data.mutable_data() + n * block);
  py::list meta;
  for (const auto& m : d.meta) meta.append(py::make_tuple(m.c0, m.seed));
  py::dict out;
  out["data"] = data;
  out["meta"] = meta;
  out["dt"] = d.dt;
  out["substeps"] = d.substeps;
  out["noise_amp"] = d.noise_amp;
  out["lx"] = d.grid->lx();
  out["ly"] = d.grid->ly();
  out["params"] = to_json(d.params).dump();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "pfsim phase-field core";

  py::register_exception<DatasetError>(m, "DatasetError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IntegrationBlowup>(m, "IntegrationBlowup", PyExc_ArithmeticError);
  py::register_exception<UndefinedMetric>(m, "UndefinedMetric", PyExc_ValueError);

  m.def("wave_vectors", &wave_vectors, py::arg("n"), py::arg("length"));

  m.def(
      "spectral_deriv",
      [](const Array& f, int axis, int order, std::optional<double> lx, std::optional<double> ly) {
        return to_array(spectral_deriv(field_from(f, lx, ly), axis_of(axis), order));
      },
      py::arg("f"), py::arg("axis"), py::arg("order"), py::arg("lx") = py::none(), py::arg("ly") = py::none());

  m.def(
      "fdm_deriv",
      [](const Array& f, int axis, int order, std::optional<double> lx, std::optional<double> ly) {
        return to_array(fdm_deriv(field_from(f, lx, ly), axis_of(axis), order));
      },
      py::arg("f"), py::arg("axis"), py::arg("order"), py::arg("lx") = py::none(), py::arg("ly") = py::none());

  m.def(
      "time_deriv",
      [](const Array& u, double dt, const std::string& backend, std::size_t pad) {
        if (u.ndim() != 1) throw std::invalid_argument("expected a 1-D series");
        const auto d = time_deriv(std::span<const double>(u.data(), u.shape(0)), dt, parse_backend(backend, pad));
        return Array(d.size(), d.data());
      },
      py::arg("u"), py::arg("dt"), py::arg("backend") = "pseudo", py::arg("pad") = DerivBackend::kDefaultPad);

  m.def(
      "elastic_kernel",
      [](double nx, double ny, const std::string& params) { return elastic_kernel({nx, ny}, parse_params(params).elastic); },
      py::arg("nx"), py::arg("ny"), py::arg("params") = "");

  m.def(
      "total_energy",
      [](const Array& state, const std::string& params, std::optional<double> lx, std::optional<double> ly) {
        if (state.ndim() != 3 || state.shape(0) != 3) throw std::invalid_argument("expected shape (3, nx, ny)");
        const auto g = grid_for(state.shape(1), state.shape(2), lx, ly);
        const std::size_t plane = g->size();
        const FieldSet fs{to_field(g, state.data()), to_field(g, state.data() + plane),
                          to_field(g, state.data() + 2 * plane), 0.0};
        return total_energy(fs, parse_params(params));
      },
      py::arg("state"), py::arg("params") = "", py::arg("lx") = py::none(), py::arg("ly") = py::none());

  m.def(
      "simulate",
      [](double c0, std::uint64_t seed, std::size_t nx, std::size_t ny, std::size_t frames, std::size_t substeps,
         double noise_amp, const std::string& params, std::optional<double> lx, std::optional<double> ly) {
        const auto p = parse_params(params);
        const auto g = grid_for(nx, ny, lx, ly);
        Trajectory tr;
        {
          py::gil_scoped_release release;
          tr = simulate(make_initial(c0, seed, g, noise_amp), p, frames, substeps);
        }
        return py::make_tuple(traj_to(tr), tr.dt);
      },
      py::arg("c0"), py::arg("seed"), py::arg("nx"), py::arg("ny"), py::arg("frames"), py::arg("substeps"),
      py::arg("noise_amp"), py::arg("params") = "", py::arg("lx") = py::none(), py::arg("ly") = py::none());

  m.def(
      "losses",
      [](const Array& pred, double dt, std::optional<Array> truth, const std::string& params,
         const std::string& weights, const std::string& backend, std::size_t pad, const std::string& spatial_form,
         std::optional<double> lx, std::optional<double> ly) {
        const auto p = parse_params(params);
        const auto w = weights.empty() ? LossWeights{} : weights_from_json(nlohmann::json::parse(weights));
        const auto pt = traj_from(pred, dt, p, lx, ly);
        std::optional<Trajectory> tt;
        if (truth) tt = traj_from(*truth, dt, p, lx, ly);
        std::optional<SpatialForm> form;
        if (!spatial_form.empty()) form = parse_spatial_form(spatial_form);
        LossReport rep;
        {
          py::gil_scoped_release release;
          rep = total_loss(pt, tt ? &*tt : nullptr, w, parse_backend(backend, pad), form);
        }
        return to_json(rep).dump();
      },
      py::arg("pred"), py::arg("dt"), py::arg("truth") = py::none(), py::arg("params") = "",
      py::arg("weights") = "", py::arg("backend") = "pseudo", py::arg("pad") = DerivBackend::kDefaultPad,
      py::arg("spatial_form") = "", py::arg("lx") = py::none(), py::arg("ly") = py::none());

  m.def(
      "run_config",
      [](const std::string& config, const std::string& command) {
        const RunConfig cfg = config_from_json(config.empty() ? nlohmann::json::object() : nlohmann::json::parse(config));
        py::gil_scoped_release release;
        if (command == "simulate") {
          auto tr = simulate(make_initial(cfg.c0, cfg.seed, cfg.grid(), cfg.noise_amp), cfg.params, cfg.frames,
                             cfg.substeps);
          write_dataset(single_instance(std::move(tr), {cfg.c0, cfg.seed}, cfg.substeps, cfg.noise_amp), cfg.out);
        } else if (command == "sweep") {
          write_dataset(run_sweep(cfg.sweep, cfg.params, cfg.grid(), cfg.sweep_options()), cfg.out);
        } else {
          throw std::invalid_argument("run_config: command must be 'simulate' or 'sweep'");
        }
        return cfg.out;
      },
      py::arg("config"), py::arg("command"));

  m.def(
      "read_dataset", [](const std::string& path) { return dataset_dict(load_any(path)); }, py::arg("path"));

  m.def(
      "export_npy", [](const std::string& src, const std::string& dst) { export_npy(load_any(src), dst); },
      py::arg("src"), py::arg("dst"));
}
