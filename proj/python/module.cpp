#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fsl/config.hpp"
#include "fsl/snapshot.hpp"
#include "fsl/spectral.hpp"

namespace py = pybind11;

namespace {

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

fsl::Field field_from(py::array_t<double, py::array::c_style | py::array::forcecast> values, double half_width) {
  if (values.ndim() != 1) throw fsl::Error("expected a one-dimensional array");
  const auto n = static_cast<std::size_t>(values.shape(0));
  fsl::Grid grid(1, half_width, n);
  return fsl::Field(grid, std::vector<double>(values.data(), values.data() + n));
}

py::array_t<double> to_array(const fsl::Field& f) {
  auto v = f.values();
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  if (f.grid().dim() == 2) {
    const auto n = static_cast<py::ssize_t>(f.grid().points());
    out.resize({n, n});
  }
  return out;
}

py::dict run_config(const std::string& text, const std::string& base_dir, const std::string& output) {
  auto config = fsl::parse_config(text, base_dir);
  if (!output.empty()) config.output = output;
  fsl::RunOutcome outcome;
  {
    py::gil_scoped_release release;
    outcome = fsl::execute(config);
  }
  py::dict d;
  d["directory"] = outcome.directory.string();
  d["reused"] = outcome.reused;
  d["exit_code"] = fsl::exit_code(outcome.report.verdict);
  d["report"] = to_python(outcome.report.to_json());
  return d;
}

py::object evaluate(const std::string& text, const std::string& base_dir) {
  auto config = fsl::parse_config(text, base_dir);
  fsl::ExperimentReport report;
  {
    py::gil_scoped_release release;
    report = fsl::run_experiment(config.experiment, config.params);
  }
  return to_python(report.to_json());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Numerical lab for the critical fractional conservation law with shock-like data";
  auto base = py::register_exception<fsl::Error>(m, "FslError", PyExc_RuntimeError);
  py::register_exception<fsl::ConfigError>(m, "ConfigError", base.ptr());

  m.def("list_experiments", [] {
    py::list out;
    for (const auto& info : fsl::experiment_registry()) {
      py::dict d;
      d["id"] = info.id;
      d["summary"] = info.summary;
      d["reference"] = info.reference;
      out.append(d);
    }
    return out;
  });
  m.def("describe", [](const std::string& id) {
    const auto& info = fsl::find_experiment(id);
    py::dict d;
    d["id"] = info.id;
    d["summary"] = info.summary;
    d["reference"] = info.reference;
    d["estimate"] = info.estimate;
    d["inputs"] = info.inputs;
    d["outputs"] = info.outputs;
    d["defaults"] = to_python(info.defaults.to_json());
    return d;
  }, py::arg("id"));
  m.def("resolved_config", [](const std::string& text, const std::string& base_dir) {
    return fsl::resolved_config(fsl::parse_config(text, base_dir));
  }, py::arg("text"), py::arg("base_dir") = ".");
  m.def("evaluate", &evaluate, py::arg("text"), py::arg("base_dir") = ".",
        "Run the experiment of a config text and return the report without writing files.");
  m.def("run", &run_config, py::arg("text"), py::arg("base_dir") = ".", py::arg("output") = "",
        "Run a config text into its content-addressed directory.");
  m.def("read_snapshot", [](const std::string& path) {
    auto f = fsl::read_snapshot(path);
    py::dict d;
    d["dim"] = f.grid().dim();
    d["points"] = f.grid().points();
    d["half_width"] = f.grid().half_width();
    d["time"] = f.time();
    d["has_background"] = f.has_background();
    d["values"] = to_array(f);
    return d;
  }, py::arg("path"));
  m.def("apply_lambda", [](py::array_t<double, py::array::c_style | py::array::forcecast> values, double half_width,
                           double order) { return to_array(fsl::apply_lambda(field_from(values, half_width), order)); },
        py::arg("values"), py::arg("half_width"), py::arg("order") = 1.0);
  m.def("heat_semigroup", [](py::array_t<double, py::array::c_style | py::array::forcecast> values, double half_width,
                             double t, double order) {
    return to_array(fsl::heat_semigroup(field_from(values, half_width), t, order));
  }, py::arg("values"), py::arg("half_width"), py::arg("t"), py::arg("order") = 1.0);
  m.def("worker_count", &fsl::worker_count);
}
