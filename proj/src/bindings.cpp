#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "trapoptics/beam_relay.hpp"
#include "trapoptics/cli.hpp"
#include "trapoptics/detection.hpp"
#include "trapoptics/entanglement.hpp"
#include "trapoptics/gaussian_optics.hpp"
#include "trapoptics/layout_rules.hpp"
#include "trapoptics/microcavity.hpp"

namespace py = pybind11;
using namespace trapoptics;

// Everything crosses the boundary in SI units as plain floats.

namespace {

MeasurementScenario scenario(double flux, double t_m, double dark_flux, double temperature) {
    return MeasurementScenario{flux, dark_flux, Time(t_m), Temperature(temperature)};
}

BerModel model_of(const std::string& m) {
    if (m == "exact") return BerModel::Exact;
    if (m == "gaussian") return BerModel::Gaussian;
    throw py::value_error("model must be 'exact' or 'gaussian'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Optical subsystem design calculations for surface ion traps.";

    py::register_exception<LayoutParseError>(m, "LayoutParseError", PyExc_ValueError);

    // gaussian optics
    m.def("rayleigh_length", [](double w0, double lam) { return rayleigh_length(Length(w0), Length(lam)).value(); },
          py::arg("w0"), py::arg("wavelength"));
    m.def("optimal_waist", [](double L, double lam) { return optimal_waist(Length(L), Length(lam)).value(); },
          py::arg("chip_size"), py::arg("wavelength"));
    m.def(
        "beam_radius",
        [](double lam, double w0, double z0, double z) {
            return beam_radius(GaussianBeam(Length(lam), Length(w0), Position(z0)), Position(z)).value();
        },
        py::arg("wavelength"), py::arg("w0"), py::arg("z0"), py::arg("z"));
    m.def(
        "clipping_fraction",
        [](double lam, double w0, double z0, double L, double y) {
            return clipping_fraction(GaussianBeam(Length(lam), Length(w0), Position(z0)),
                                     ChipGeometry(Length(L), Length(y)));
        },
        py::arg("wavelength"), py::arg("w0"), py::arg("z0"), py::arg("chip_size"), py::arg("y_ion"));
    m.def(
        "max_feasible_chip_size",
        [](double y, double lam, double max_clip) {
            return max_feasible_chip_size(Length(y), Length(lam), max_clip).value();
        },
        py::arg("y_ion"), py::arg("wavelength"), py::arg("max_clip"));

    // relay
    m.def(
        "prism_zone_positions",
        [](double L, int n, double offset) { return prism_zone_positions(Length(L), n, offset); }, py::arg("chip_size"),
        py::arg("lenses_per_prism"), py::arg("offset_fraction"));
    m.def(
        "relay_zones",
        [](double L, int n, double offset, double r_red, double r_blue) {
            const auto zones = propagate_fields(prism_chain(Length(L), n, offset, r_red, r_blue));
            py::list out;
            for (const auto& z : zones) {
                py::dict d;
                d["zone"] = z.zone_index;
                d["position"] = z.position;
                d["e_r"] = z.E_r_local;
                d["e_b"] = z.E_b_local;
                d["product"] = z.product;
                d["deviation"] = z.product_deviation;
                out.append(d);
            }
            return out;
        },
        py::arg("chip_size"), py::arg("lenses_per_prism"), py::arg("offset_fraction"), py::arg("r_red"),
        py::arg("r_blue"));

    // detection
    py::class_<DetectorModel>(m, "Detector")
        .def_readonly("name", &DetectorModel::name)
        .def_readonly("eta", &DetectorModel::eta)
        .def_readonly("gain", &DetectorModel::gain_M)
        .def_readonly("enf", &DetectorModel::enf_F)
        .def_readonly("dark_cps", &DetectorModel::dark_rate)
        .def_property_readonly("cap_farad", [](const DetectorModel& d) { return d.capacitance_C.value(); })
        .def_property_readonly("pixel_latency_s", [](const DetectorModel& d) { return d.pixel_latency.value(); })
        .def("__repr__", [](const DetectorModel& d) { return "<Detector " + d.name + ">"; });

    m.def("detector_presets", &detector_presets, py::return_value_policy::copy);
    m.def("detector_preset", &detector_preset, py::arg("name"), py::return_value_policy::copy);
    m.def(
        "thermal_noise_electrons",
        [](double T, double C) { return thermal_noise_electrons(Temperature(T), Capacitance(C)); },
        py::arg("temperature"), py::arg("capacitance"));
    m.def(
        "snr",
        [](const std::string& preset, double flux, double t_m, double dark_flux, double temperature) {
            return snr(detector_preset(preset), scenario(flux, t_m, dark_flux, temperature));
        },
        py::arg("preset"), py::arg("flux"), py::arg("t_m"), py::arg("dark_flux") = 0.0, py::arg("temperature") = 300.0);
    m.def(
        "ber",
        [](const std::string& preset, double flux, double t_m, double dark_flux, double temperature,
           const std::string& model) {
            const auto r = ber_analytic(detector_preset(preset), scenario(flux, t_m, dark_flux, temperature),
                                        model_of(model));
            py::dict d;
            d["snr"] = r.snr;
            d["ber"] = r.ber;
            d["threshold_e"] = r.threshold;
            d["degenerate"] = r.degenerate;
            return d;
        },
        py::arg("preset"), py::arg("flux"), py::arg("t_m"), py::arg("dark_flux") = 0.0, py::arg("temperature") = 300.0,
        py::arg("model") = "exact");
    m.def(
        "ber_monte_carlo",
        [](const std::string& preset, double flux, double t_m, double threshold, std::uint64_t trials,
           std::uint64_t seed, double dark_flux, double temperature) {
            const auto r = ber_monte_carlo(detector_preset(preset), scenario(flux, t_m, dark_flux, temperature),
                                           threshold, trials, seed);
            return py::make_tuple(r.ber, r.ci_low, r.ci_high);
        },
        py::arg("preset"), py::arg("flux"), py::arg("t_m"), py::arg("threshold"), py::arg("trials"), py::arg("seed"),
        py::arg("dark_flux") = 0.0, py::arg("temperature") = 300.0);
    m.def(
        "min_integration_time",
        [](const std::string& preset, double flux, double target, double dark_flux, double temperature)
            -> std::optional<double> {
            const auto r = min_integration_time(detector_preset(preset), flux, dark_flux, Temperature(temperature),
                                                target);
            if (!r.reachable) return std::nullopt;
            return r.T_M.value();
        },
        py::arg("preset"), py::arg("flux"), py::arg("target"), py::arg("dark_flux") = 0.0,
        py::arg("temperature") = 300.0);

    // microcavity
    m.def("finesse", py::overload_cast<double, double>(&finesse), py::arg("R_m"), py::arg("R_f"));
    m.def(
        "scattering_loss", [](double sigma, double lam) { return scattering_loss(Length(sigma), Length(lam)); },
        py::arg("sigma"), py::arg("wavelength"));
    m.def("capture_fraction", &capture_fraction, py::arg("C1"));
    m.def(
        "coupling_report",
        [](double w0, double d, double R_m, double R_f, double lam, double linewidth, double z_ion) {
            const AtomicTransition t{Length(lam), Frequency(linewidth)};
            const auto design = CavityDesign::from_length(R_m, R_f, Length(0.0), Length(w0), Length(d), Length(lam));
            const auto r = coupling_report(t, design, Length(z_ion));
            py::dict out;
            out["finesse"] = r.finesse;
            out["kappa"] = r.kappa;
            out["gamma"] = r.gamma;
            out["g0"] = r.g0;
            out["C1"] = r.C1;
            out["C1_closed"] = r.C1_closed;
            out["f_cap"] = r.f_cap;
            out["g0_over_gamma"] = r.g0_over_gamma;
            out["g0_over_kappa"] = r.g0_over_kappa;
            out["strong_coupling"] = r.strong_coupling;
            return out;
        },
        py::arg("w0"), py::arg("d"), py::arg("R_m"), py::arg("R_f"), py::arg("wavelength") = 313e-9,
        py::arg("linewidth") = 20e6, py::arg("z_ion") = 0.0);
    m.def(
        "max_scatter_rate", [](double linewidth) {
            return max_scatter_rate(AtomicTransition(Length(313e-9), Frequency(linewidth)));
        },
        py::arg("linewidth"));

    // entanglement
    m.def(
        "scaled_success",
        [](double p, double fb, double fn) {
            const auto s = scaled_success(p, fb, fn);
            return py::make_tuple(s.p, s.factor, s.saturated);
        },
        py::arg("p_base"), py::arg("fcap_base"), py::arg("fcap_new"));
    m.def("event_rate", &event_rate, py::arg("p"), py::arg("attempt_rate"));
    m.def("mean_wait", &mean_wait, py::arg("p"), py::arg("attempt_rate"));

    // layout
    m.def("canonical_table_text", [] { return serialize_table(canonical_table()); });
    m.def(
        "validate_layout",
        [](const std::string& json_text, double tol) {
            std::vector<std::tuple<std::string, std::string, std::string>> out;
            for (const auto& v : validate(parse_layout(json_text), ValidationOptions{tol})) {
                out.emplace_back(v.rule, v.beam_id, v.message);
            }
            return out;
        },
        py::arg("json_text"), py::arg("angle_tol_deg") = 1.0);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
