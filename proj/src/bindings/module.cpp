#include "allen_cahn/acceptance.hpp"
#include "allen_cahn/harness.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using ac::Json;

namespace {

// Reports cross the boundary as JSON text; the Python side parses them.
ac::ExperimentConfig config(const std::string& text) {
    ac::ExperimentConfig c = ac::config_from_json(text.empty() ? Json::object() : Json::parse(text));
    c.finalize();
    return c;
}

std::string solve(const std::string& cfg) {
    const ac::ExperimentConfig c = config(cfg);
    return ac::solve_report(ac::make_setup(c), c, c.eps).json.dump();
}

std::string sweep(const std::string& cfg) {
    const ac::SweepResult r = ac::run_sweep(config(cfg));
    Json j = r.json;
    j["csv"] = r.csv;
    return j.dump();
}

std::string criterion(int id) {
    const ac::CriterionResult r = ac::run_criterion(id);
    return Json{{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"line", ac::format_line(r)},
                {"data", r.data}}
        .dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    py::register_exception<ac::rejected>(m, "Rejected", PyExc_ValueError);
    m.attr("schema_version") = ac::kReportSchemaVersion;
    m.def("profile", [] { return ac::profile_report(ac::heteroclinic(ac::DoubleWell::quartic())).dump(); });
    m.def("geometry", [](const std::string& cfg, bool details) {
        return ac::geometry_report(ac::make_setup(config(cfg)), details).dump();
    });
    m.def("solve", &solve, py::call_guard<py::gil_scoped_release>());
    m.def("sweep", &sweep, py::call_guard<py::gil_scoped_release>());
    m.def("perturb", [](const std::string& cfg) { return ac::perturbed_metric_experiment(config(cfg)).json.dump(); },
          py::call_guard<py::gil_scoped_release>());
    m.def("criterion", &criterion, py::call_guard<py::gil_scoped_release>());
    m.def("normalize_config", [](const std::string& cfg) { return ac::config_to_json(config(cfg)).dump(); });
}
