#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hhg/beam.hpp"
#include "hhg/coherence.hpp"
#include "hhg/dipole_table.hpp"
#include "hhg/errors.hpp"
#include "hhg/freespace.hpp"
#include "hhg/runner.hpp"
#include "hhg/scenario.hpp"
#include "hhg/sfa.hpp"

namespace py = pybind11;
using namespace hhg;

namespace {

py::array_t<double> as_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::array_t<cplx> as_array(const std::vector<cplx>& v) { return py::array_t<cplx>(v.size(), v.data()); }

RadialField make_field(std::vector<double> r_um, std::vector<cplx> values, double wavelength_nm, double z_mm) {
  RadialField f;
  f.r_um = std::move(r_um);
  f.values = std::move(values);
  f.wavelength_nm = wavelength_nm;
  f.z_mm = z_mm;
  f.validate();
  return f;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "High-harmonic generation in a gas jet: single-atom response, propagation, coherence";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<RangeError>(m, "RangeError", base.ptr());
  py::register_exception<NumericalAccuracyError>(m, "NumericalAccuracyError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<NotFoundError>(m, "NotFoundError", base.ptr());
  py::register_exception<FitError>(m, "FitError", base.ptr());
  py::register_exception<BlowUpError>(m, "BlowUpError", base.ptr());

  py::class_<AtomModel>(m, "AtomModel")
      .def_readonly("id", &AtomModel::id)
      .def_readonly("ip", &AtomModel::ip)
      .def_readonly("n_el", &AtomModel::n_el)
      .def_property_readonly("ip_ev", &AtomModel::ip_ev)
      .def_static("neon", &AtomModel::neon)
      .def_static("helium", &AtomModel::helium)
      .def_static("argon", &AtomModel::argon)
      .def_static("preset", [](const std::string& id) { return AtomModel::preset(id); })
      .def("__repr__", [](const AtomModel& a) { return "<AtomModel " + a.id + ">"; });

  m.def("cutoff_coefficient", &cutoff_coefficient, py::arg("atom"), py::arg("order"), py::arg("wavelength_nm"),
        py::arg("intensity_wcm2"));

  // tables
  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<>())
      .def_readwrite("i_min", &GridSpec::i_min)
      .def_readwrite("i_max", &GridSpec::i_max)
      .def_readwrite("nodes", &GridSpec::nodes)
      .def_readwrite("log_spacing", &GridSpec::log_spacing);

  py::class_<TableSample>(m, "TableSample")
      .def_readonly("x_q", &TableSample::x_q)
      .def_readonly("amplitude", &TableSample::amplitude)
      .def_readonly("phase", &TableSample::phase)
      .def_readonly("gamma", &TableSample::gamma);

  py::class_<DipoleTable>(m, "DipoleTable")
      .def_readonly("order", &DipoleTable::order)
      .def_readonly("atom_id", &DipoleTable::atom_id)
      .def_readonly("wavelength_nm", &DipoleTable::wavelength_nm)
      .def_property_readonly("intensity", [](const DipoleTable& t) { return as_array(t.intensity); })
      .def_property_readonly("amplitude", [](const DipoleTable& t) { return as_array(t.amplitude); })
      .def_property_readonly("phase", [](const DipoleTable& t) { return as_array(t.phase); })
      .def_property_readonly("gamma", [](const DipoleTable& t) { return as_array(t.gamma); })
      .def("__len__", &DipoleTable::size)
      .def("query", [](const DipoleTable& t, double I) { return query(t, I); }, py::arg("intensity_wcm2"))
      .def("transition_intensity", [](const DipoleTable& t) { return transition_intensity(t); })
      .def("save", [](const DipoleTable& t, const std::filesystem::path& p) { save_table(t, p); })
      .def_static("load", &load_table);

  m.def(
      "build_table",
      [](const AtomModel& atom, double wavelength_nm, int order, const GridSpec& grid) {
        py::gil_scoped_release release;
        return build_table(atom, wavelength_nm, order, grid);
      },
      py::arg("atom"), py::arg("wavelength_nm") = 825.0, py::arg("order") = 45, py::arg("grid") = GridSpec{});

  // beams
  py::class_<FocusGeometry>(m, "FocusGeometry")
      .def(py::init<>())
      .def_readwrite("confocal_mm", &FocusGeometry::confocal_mm)
      .def_readwrite("wavelength_nm", &FocusGeometry::wavelength_nm)
      .def_readwrite("focus_z_mm", &FocusGeometry::focus_z_mm)
      .def_property_readonly("waist_um", &FocusGeometry::waist_um)
      .def_property_readonly("rayleigh_mm", &FocusGeometry::rayleigh_mm)
      .def("radius_um", &FocusGeometry::radius_um, py::arg("z_mm"))
      .def("gouy_phase", &FocusGeometry::gouy_phase, py::arg("z_mm"), py::arg("q") = 1)
      .def("curvature_coefficient", &FocusGeometry::curvature_coefficient, py::arg("z_mm"), py::arg("q") = 1);

  m.def("spherical_wave_coefficient", &spherical_wave_coefficient, py::arg("wavelength_nm"),
        py::arg("distance_mm"));

  py::class_<RadialField>(m, "RadialField")
      .def(py::init(&make_field), py::arg("r_um"), py::arg("values"), py::arg("wavelength_nm"),
           py::arg("z_mm") = 0.0)
      .def_property_readonly("r_um", [](const RadialField& f) { return as_array(f.r_um); })
      .def_property_readonly("values", [](const RadialField& f) { return as_array(f.values); })
      .def_readonly("z_mm", &RadialField::z_mm)
      .def_readonly("wavelength_nm", &RadialField::wavelength_nm)
      .def("power", &RadialField::power);

  m.def("uniform_radii", [](std::size_t n, double r_max) { return as_array(uniform_radii(n, r_max)); });
  m.def("fresnel_propagate",
        [](const RadialField& f, double dz_mm) { return fresnel_propagate(f, dz_mm); }, py::arg("field"),
        py::arg("dz_mm"));

  py::class_<FarFieldProfile>(m, "FarFieldProfile")
      .def_property_readonly("angle_mrad", [](const FarFieldProfile& p) { return as_array(p.angle_mrad); })
      .def_property_readonly("intensity", [](const FarFieldProfile& p) { return as_array(p.intensity); })
      .def_readonly("half_angle_mrad", &FarFieldProfile::half_angle_1e2_mrad)
      .def_readonly("outer_half_angle_mrad", &FarFieldProfile::outer_half_angle_1e2_mrad)
      .def_readonly("annular", &FarFieldProfile::annular);
  m.def("far_field", &far_field, py::arg("field"), py::arg("distance_mm"), py::arg("max_angle_mrad") = 40.0,
        py::arg("samples") = 801);

  m.def("fwhm", &fwhm, py::arg("x"), py::arg("y"));

  // scenarios and runs
  py::class_<Preset>(m, "Preset")
      .def_readonly("id", &Preset::id)
      .def_readonly("title", &Preset::title)
      .def_readonly("text", &Preset::text);
  m.def("presets", &presets, py::return_value_policy::reference);
  m.def("find_preset", &find_preset, py::return_value_policy::reference);

  py::class_<Scenario>(m, "Scenario")
      .def_static("parse", &parse_config, py::arg("text"))
      .def_static("reference", &reference_scenario)
      .def("set", [](Scenario& s, const std::string& k, const std::string& v) { set_value(s, k, v); })
      .def("case_names", &Scenario::case_names)
      .def("text", [](const Scenario& s) { return serialize(s); })
      .def("__eq__", [](const Scenario& a, const Scenario& b) { return a == b; });

  py::class_<ManifestFile>(m, "ManifestFile")
      .def_readonly("path", &ManifestFile::path)
      .def_readonly("sha256", &ManifestFile::sha256)
      .def_readonly("bytes", &ManifestFile::bytes);

  py::class_<RunManifest>(m, "RunManifest")
      .def_readonly("scenario_id", &RunManifest::scenario_id)
      .def_readonly("scenario_hash", &RunManifest::scenario_hash)
      .def_readonly("wall_time_s", &RunManifest::wall_time_s)
      .def_readonly("files", &RunManifest::files)
      .def_readonly("cache", &RunManifest::cache)
      .def_readonly("errors", &RunManifest::errors)
      .def("ok", &RunManifest::ok)
      .def("text", &RunManifest::text)
      .def_static("parse", &RunManifest::parse)
      .def("verify", [](const RunManifest& mf, const std::filesystem::path& dir) { return mf.verify(dir); });

  m.def(
      "run_scenario",
      [](const Scenario& s, const std::filesystem::path& out_dir, const std::filesystem::path& cache_dir,
         std::vector<std::string> stages, std::string only_case, std::size_t workers) {
        RunOptions o;
        o.out_dir = out_dir;
        o.cache_dir = cache_dir;
        o.stages = std::move(stages);
        o.only_case = std::move(only_case);
        o.workers = workers;
        py::gil_scoped_release release;
        return run_scenario(s, o);
      },
      py::arg("scenario"), py::arg("out_dir") = std::filesystem::path(), py::arg("cache_dir") = std::filesystem::path(),
      py::arg("stages") = std::vector<std::string>{}, py::arg("only_case") = "", py::arg("workers") = 1);

  m.def("sha256_hex", &sha256_hex);
  m.def("default_out_dir", &default_out_dir);
}
