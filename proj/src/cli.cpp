#include "trapoptics/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "trapoptics/beam_relay.hpp"
#include "trapoptics/entanglement.hpp"
#include "trapoptics/gaussian_optics.hpp"
#include "trapoptics/layout_rules.hpp"
#include "trapoptics/microcavity.hpp"

namespace trapoptics::cli {

namespace {

using ojson = nlohmann::ordered_json;

// Thrown for bad input that CLI11 cannot see (files, value ranges).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Csv {
public:
    Csv(std::ostream& os, std::string_view schema, const std::vector<std::string>& header) : os_(os) {
        os_ << "# schema=" << schema << "/1\n";
        row(header);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
        os_ << '\n';
    }

private:
    std::ostream& os_;
};

std::string num(double v) { return format_number(v); }

std::string flag(bool b) { return b ? "true" : "false"; }

void emit_json(std::ostream& os, const ojson& j) { os << j.dump(2) << '\n'; }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<double> log_points(double lo, double hi, int n) {
    if (!(lo > 0.0 && hi >= lo) || n < 1) throw UsageError("bad sweep range");
    if (n == 1 || hi == lo) return {lo};
    return log_grid(lo, hi, n);
}

// R_f label for column names: 0.999 -> 0p999.
std::string rf_label(double r) {
    std::string s = num(r);
    std::replace(s.begin(), s.end(), '.', 'p');
    return s;
}

struct Globals {
    std::string format;
    std::string out_path;
    std::uint64_t seed = 1;

    std::string fmt(std::string_view fallback) const { return format.empty() ? std::string(fallback) : format; }
};

// ---- beam -------------------------------------------------------------------

struct BeamOpts {
    double chip_mm = 10.0;
    double lambda_nm = 313.0;
    double y_ion_um = 50.0;
    std::optional<double> w0_um;
    double max_clip = 8e-4;
    double tip_um = 0.0;
    double diameter_um = 0.0;
    double index = 1.5;
    double fiber_na = 0.0;
};

int beam_waist(const BeamOpts& o, const Globals& g, std::ostream& os) {
    const Length L(o.chip_mm / 1e3), lambda(o.lambda_nm / 1e9);
    const ChipGeometry chip(L, Length(o.y_ion_um / 1e6));
    const Length w0 = optimal_waist(L, lambda);
    const GaussianBeam beam(lambda, w0, Position(L.value() / 2.0));
    const double w_edge = beam_radius(beam, Position(0.0)).value();
    const double clip = clipping_fraction(beam, chip);
    if (g.fmt("json") == "csv") {
        Csv csv(os, "beam_waist", {"chip_mm", "lambda_nm", "y_ion_um", "w0_um", "z_r_um", "w_edge_um", "clip_per_side"});
        csv.row({num(o.chip_mm), num(o.lambda_nm), num(o.y_ion_um), num(w0.value() * 1e6),
                 num(beam.rayleigh_length().value() * 1e6), num(w_edge * 1e6), num(clip)});
    } else {
        emit_json(os, ojson{{"chip_mm", o.chip_mm},
                            {"lambda_nm", o.lambda_nm},
                            {"y_ion_um", o.y_ion_um},
                            {"w0_um", w0.value() * 1e6},
                            {"z_r_um", beam.rayleigh_length().value() * 1e6},
                            {"w_edge_um", w_edge * 1e6},
                            {"clip_per_side", clip}});
    }
    return kExitOk;
}

int beam_clip(const BeamOpts& o, const Globals& g, std::ostream& os) {
    const Length L(o.chip_mm / 1e3), lambda(o.lambda_nm / 1e9), y(o.y_ion_um / 1e6);
    const ChipGeometry chip(L, y);
    const Length w0 = o.w0_um ? Length(*o.w0_um / 1e6) : optimal_waist(L, lambda);
    const GaussianBeam beam(lambda, w0, Position(L.value() / 2.0));
    const double clip = clipping_fraction(beam, chip);
    const double w_edge = beam_radius(beam, Position(0.0)).value();
    const double max_chip = max_feasible_chip_size(y, lambda, o.max_clip).value();
    const bool ok = clip <= o.max_clip;
    if (g.fmt("json") == "csv") {
        Csv csv(os, "beam_clip", {"chip_mm", "w0_um", "w_edge_um", "clip_per_side", "max_clip", "feasible", "max_chip_mm"});
        csv.row({num(o.chip_mm), num(w0.value() * 1e6), num(w_edge * 1e6), num(clip), num(o.max_clip), flag(ok),
                 num(max_chip * 1e3)});
    } else {
        emit_json(os, ojson{{"chip_mm", o.chip_mm},
                            {"w0_um", w0.value() * 1e6},
                            {"w_edge_um", w_edge * 1e6},
                            {"clip_per_side", clip},
                            {"max_clip", o.max_clip},
                            {"feasible", ok},
                            {"max_chip_mm", max_chip * 1e3}});
    }
    return ok ? kExitOk : kExitValidation;
}

int beam_fnum(const BeamOpts& o, const Globals& g, std::ostream& os) {
    const LensedFiber fiber(Length(o.tip_um / 1e6), Length(o.diameter_um / 1e6), o.index, o.fiber_na);
    const auto r = fiber_f_number(fiber);
    if (g.fmt("json") == "csv") {
        Csv csv(os, "beam_fnum", {"f_number", "na_lens", "na_total", "focal_length_um", "paraxial_valid"});
        csv.row({num(r.f_number), num(r.na_lens), num(r.na_total), num(r.focal_length.value() * 1e6),
                 flag(r.paraxial_valid)});
    } else {
        emit_json(os, ojson{{"f_number", r.f_number},
                            {"na_lens", r.na_lens},
                            {"na_total", r.na_total},
                            {"focal_length_um", r.focal_length.value() * 1e6},
                            {"paraxial_valid", r.paraxial_valid}});
    }
    return kExitOk;
}

// ---- relay ------------------------------------------------------------------

struct RelayOpts {
    std::string layout;
    RelaySpec spec;
    std::optional<double> r;
};

int relay_check(const RelayOpts& o, const Globals& g, std::ostream& os) {
    RelaySpec spec = o.spec;
    if (!o.layout.empty()) {
        const auto doc = parse_layout(read_file(o.layout));
        if (!doc.relay) throw UsageError(o.layout + " has no \"relay\" section");
        spec = *doc.relay;
    }
    if (o.r) spec.r_red = spec.r_blue = *o.r;
    const auto chain = prism_chain(Length(spec.chip_width_mm / 1e3), spec.lenses_per_prism, spec.offset_fraction,
                                   spec.r_red, spec.r_blue);
    const auto zones = propagate_fields(chain);
    const auto check = product_uniformity_check(zones, spec.tolerance);
    const double spread = field_spread(zones);
    if (g.fmt("json") == "csv") {
        Csv csv(os, "relay", {"zone", "position", "e_r", "e_b", "product", "deviation"});
        for (const auto& z : zones) {
            csv.row({std::to_string(z.zone_index), num(z.position), num(z.E_r_local), num(z.E_b_local), num(z.product),
                     num(z.product_deviation)});
        }
    } else {
        ojson rows = ojson::array();
        for (const auto& z : zones) {
            rows.push_back({{"zone", z.zone_index},
                            {"position", z.position},
                            {"e_r", z.E_r_local},
                            {"e_b", z.E_b_local},
                            {"product", z.product},
                            {"deviation", z.product_deviation}});
        }
        emit_json(os, ojson{{"zones", rows},
                            {"tolerance", spec.tolerance},
                            {"pass", check.pass},
                            {"worst_zone", check.worst_zone},
                            {"worst_deviation", check.worst_deviation},
                            {"field_spread", spread}});
    }
    return check.pass ? kExitOk : kExitValidation;
}

// ---- detect -----------------------------------------------------------------

struct DetectOpts {
    std::vector<std::string> presets{"all"};
    std::string presets_json;
    double flux = 1e6;
    double dark_flux = 0.0;
    double temp_k = 300.0;
    std::optional<double> tm_us;
    std::vector<double> tm_range;  // min_us max_us points
    std::string model = "exact";
    std::uint64_t mc_trials = 0;
    double target = 1e-3;
};

std::vector<DetectorModel> selected_detectors(const DetectOpts& o) {
    std::vector<DetectorModel> table = detector_presets();
    if (!o.presets_json.empty()) table = load_presets_json(read_file(o.presets_json), table);
    std::vector<DetectorModel> out;
    for (const auto& name : o.presets) {
        if (name == "all") {
            out.insert(out.end(), table.begin(), table.end());
            continue;
        }
        std::string key = name;
        std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::toupper(c); });
        const auto it = std::find_if(table.begin(), table.end(), [&](const DetectorModel& d) {
            std::string n = d.name;
            std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::toupper(c); });
            return n == key;
        });
        if (it == table.end()) throw UsageError("unknown detector preset \"" + name + "\"");
        out.push_back(*it);
    }
    return out;
}

std::vector<double> integration_times(const DetectOpts& o) {
    if (!o.tm_range.empty()) {
        if (o.tm_range.size() != 3) throw UsageError("--tm-range takes MIN_US MAX_US POINTS");
        const double pts = o.tm_range[2];
        if (pts != std::floor(pts) || pts < 1) throw UsageError("--tm-range POINTS must be a positive integer");
        auto t = log_points(o.tm_range[0] / 1e6, o.tm_range[1] / 1e6, static_cast<int>(pts));
        return t;
    }
    return {o.tm_us.value_or(50.0) / 1e6};
}

BerModel ber_model(const std::string& m) { return m == "gaussian" ? BerModel::Gaussian : BerModel::Exact; }

// snr and ber share one row layout so the plotting side reads a single schema.
int detect_rows(const DetectOpts& o, const Globals& g, std::ostream& os, bool with_ber) {
    const auto detectors = selected_detectors(o);
    const auto times = integration_times(o);
    const BerModel model = ber_model(o.model);
    const bool csv = g.fmt("json") == "csv";
    const bool mc = with_ber && o.mc_trials > 0;

    std::vector<std::string> header{"t_m_s", "detector", "snr", "ber", "threshold_e"};
    if (mc) header.insert(header.end(), {"mc_ber", "mc_ci_low", "mc_ci_high"});
    std::optional<Csv> table;
    if (csv) table.emplace(os, mc ? "detect_mc" : "detect", header);
    ojson rows = ojson::array();

    for (const auto& det : detectors) {
        for (double t : times) {
            const MeasurementScenario sc{o.flux, o.dark_flux, Time(t), Temperature(o.temp_k)};
            const auto r = ber_analytic(det, sc, model);
            std::optional<MonteCarloResult> m;
            if (mc) m = ber_monte_carlo(det, sc, r.threshold, o.mc_trials, g.seed);
            if (csv) {
                std::vector<std::string> cells{num(t), det.name, num(r.snr), num(r.ber), num(r.threshold)};
                if (m) cells.insert(cells.end(), {num(m->ber), num(m->ci_low), num(m->ci_high)});
                table->row(cells);
            } else {
                ojson row{{"t_m_s", t},
                          {"detector", det.name},
                          {"snr", r.snr},
                          {"ber", r.ber},
                          {"threshold_e", r.threshold},
                          {"signal_electrons", r.signal_electrons_S},
                          {"noise_electrons", r.noise_electrons_N}};
                if (m) {
                    row["mc_ber"] = m->ber;
                    row["mc_ci_low"] = m->ci_low;
                    row["mc_ci_high"] = m->ci_high;
                    row["mc_trials"] = m->trials;
                    row["seed"] = g.seed;
                }
                rows.push_back(row);
            }
        }
    }
    if (!csv) {
        emit_json(os, ojson{{"model", o.model}, {"flux", o.flux}, {"dark_flux", o.dark_flux}, {"rows", rows}});
    }
    return kExitOk;
}

int detect_mintime(const DetectOpts& o, const Globals& g, std::ostream& os) {
    if (!(o.target > 0.0 && o.target < 0.5)) throw UsageError("--target must lie in (0, 0.5)");
    const auto detectors = selected_detectors(o);
    const BerModel model = ber_model(o.model);
    const bool csv = g.fmt("json") == "csv";
    std::optional<Csv> table;
    if (csv) table.emplace(os, "mintime", std::vector<std::string>{"detector", "reachable", "t_m_s", "ber"});
    ojson rows = ojson::array();
    for (const auto& det : detectors) {
        const auto r = min_integration_time(det, o.flux, o.dark_flux, Temperature(o.temp_k), o.target, model);
        if (csv) {
            table->row({det.name, flag(r.reachable), r.reachable ? num(r.T_M.value()) : "", num(r.ber)});
        } else {
            rows.push_back({{"detector", det.name},
                            {"reachable", r.reachable},
                            {"t_m_s", r.reachable ? ojson(r.T_M.value()) : ojson(nullptr)},
                            {"ber", r.ber}});
        }
    }
    if (!csv) emit_json(os, ojson{{"target_ber", o.target}, {"flux", o.flux}, {"rows", rows}});
    return kExitOk;
}

// ---- cavity -----------------------------------------------------------------

struct CavityOpts {
    double w0_um = 1.5;
    double lambda_nm = 313.0;
    double linewidth_mhz = 20.0;
    double rm = 1.0;
    double rf = 0.99;
    std::optional<double> d_um;
    std::optional<double> roc_um;
    double d_over_zr = 1.0;
    double sigma_nm = 0.0;
    double z_ion_um = 0.0;
    std::vector<double> rf_list{0.99, 0.999, 0.9999};
    double grid_min = 0.1;
    double grid_max = 10.0;
    int points = 41;
};

AtomicTransition transition(const CavityOpts& o) {
    return AtomicTransition(Length(o.lambda_nm / 1e9), Frequency(o.linewidth_mhz * 1e6));
}

int cavity_report(const CavityOpts& o, const Globals& g, std::ostream& os, std::ostream& err) {
    const auto t = transition(o);
    const Length w0(o.w0_um / 1e6), lambda(o.lambda_nm / 1e9), sigma(o.sigma_nm / 1e9);
    const auto design = [&] {
        if (o.roc_um) return CavityDesign::from_curvature(o.rm, o.rf, sigma, w0, Length(*o.roc_um / 1e6), lambda);
        const double zr = rayleigh_length(w0, lambda).value();
        const Length d = o.d_um ? Length(*o.d_um / 1e6) : Length(o.d_over_zr * zr);
        return CavityDesign::from_length(o.rm, o.rf, sigma, w0, d, lambda);
    }();
    const auto r = coupling_report(t, design, Length(o.z_ion_um / 1e6));
    if (!r.mirror_ordering_ok) {
        err << "warning: 1 - R_m should be well below 1 - R_f so photons leave through the fibre mirror\n";
    }
    const double loss = scattering_loss(sigma, lambda);
    const std::vector<std::pair<std::string, double>> fields{
        {"d_um", design.d().value() * 1e6},
        {"roc_um", design.roc_R().value() * 1e6},
        {"z_r_um", design.rayleigh_length().value() * 1e6},
        {"finesse", r.finesse},
        {"kappa_rad_s", r.kappa},
        {"gamma_rad_s", r.gamma},
        {"g0_rad_s", r.g0},
        {"c1", r.C1},
        {"c1_closed", r.C1_closed},
        {"f_cap", r.f_cap},
        {"g0_over_gamma", r.g0_over_gamma},
        {"g0_over_kappa", r.g0_over_kappa},
        {"scattering_loss", loss},
        {"max_scatter_rate_hz", max_scatter_rate(t)},
    };
    if (g.fmt("json") == "csv") {
        std::vector<std::string> header, cells;
        for (const auto& [k, v] : fields) {
            header.push_back(k);
            cells.push_back(num(v));
        }
        header.insert(header.end(), {"strong_coupling", "mirror_ordering_ok"});
        cells.insert(cells.end(), {flag(r.strong_coupling), flag(r.mirror_ordering_ok)});
        Csv csv(os, "cavity_report", header);
        csv.row(cells);
    } else {
        ojson j;
        for (const auto& [k, v] : fields) j[k] = v;
        j["strong_coupling"] = r.strong_coupling;
        j["mirror_ordering_ok"] = r.mirror_ordering_ok;
        emit_json(os, j);
    }
    return kExitOk;
}

int cavity_fig7b(const CavityOpts& o, const Globals& g, std::ostream& os) {
    const auto t = transition(o);
    const auto grid = log_points(o.grid_min, o.grid_max, o.points);
    const auto rows = fig7b_sweep(t, Length(o.w0_um / 1e6), o.rf_list, grid);
    if (g.fmt("csv") == "csv") {
        std::vector<std::string> header{"d_over_zr", "g0_over_gamma"};
        for (double rf : o.rf_list) header.push_back("g0_over_kappa_Rf" + rf_label(rf));
        Csv csv(os, "fig7b", header);
        for (const auto& r : rows) {
            std::vector<std::string> cells{num(r.d_over_zr), num(r.g0_over_gamma)};
            for (double v : r.g0_over_kappa) cells.push_back(num(v));
            csv.row(cells);
        }
    } else {
        ojson out = ojson::array();
        for (const auto& r : rows) {
            ojson row{{"d_over_zr", r.d_over_zr}, {"g0_over_gamma", r.g0_over_gamma}, {"feasible", r.feasible}};
            for (std::size_t i = 0; i < o.rf_list.size(); ++i) {
                row["g0_over_kappa_Rf" + rf_label(o.rf_list[i])] = r.g0_over_kappa[i];
            }
            out.push_back(row);
        }
        emit_json(os, ojson{{"rows", out}});
    }
    return kExitOk;
}

// ---- layout -----------------------------------------------------------------

int layout_validate(const std::string& path, double tol, const Globals& g, std::ostream& os) {
    const auto doc = parse_layout(read_file(path));
    const auto violations = validate(doc, ValidationOptions{tol});
    const std::string f = g.fmt("text");
    if (f == "json") {
        ojson list = ojson::array();
        for (const auto& v : violations) list.push_back({{"rule", v.rule}, {"beam", v.beam_id}, {"message", v.message}});
        emit_json(os, ojson{{"file", path}, {"ok", violations.empty()}, {"violations", list}});
    } else if (f == "csv") {
        Csv csv(os, "layout", {"rule", "beam", "message"});
        for (const auto& v : violations) {
            std::string msg = v.message;
            std::replace(msg.begin(), msg.end(), ',', ';');
            csv.row({v.rule, v.beam_id, msg});
        }
    } else {
        for (const auto& v : violations) os << format_violation(v) << '\n';
    }
    return violations.empty() ? kExitOk : kExitValidation;
}

// ---- entangle ---------------------------------------------------------------

struct EntangleOpts {
    double p = 1e-8;
    std::optional<double> wait_min;
    std::optional<double> attempt_rate;
    double fcap_base = 0.004;
    std::optional<double> fcap_new;
    std::optional<double> c1;
};

void emit_entangle(const ojson& j, const Globals& g, std::ostream& os) {
    if (g.fmt("json") == "csv") {
        std::vector<std::string> header, cells;
        for (const auto& [k, v] : j.items()) {
            header.push_back(k);
            cells.push_back(v.is_boolean() ? flag(v.get<bool>()) : num(v.get<double>()));
        }
        Csv csv(os, "entangle", header);
        csv.row(cells);
    } else {
        emit_json(os, j);
    }
}

double attempt_rate_of(const EntangleOpts& o, double p_base) {
    if (o.attempt_rate) return *o.attempt_rate;
    return EntanglementBaseline::from_wait(p_base, o.wait_min.value_or(8.5) * 60.0).implied_attempt_rate;
}

int entangle_rate(const EntangleOpts& o, const Globals& g, std::ostream& os) {
    const double attempts = attempt_rate_of(o, o.p);
    const double rate = event_rate(o.p, attempts);
    emit_entangle(ojson{{"p_success", o.p},
                        {"event_rate_hz", rate},
                        {"mean_wait_s", mean_wait(o.p, attempts)},
                        {"improvement_factor", 1.0},
                        {"attempt_rate_hz", attempts}},
                  g, os);
    return kExitOk;
}

int entangle_scale(const EntangleOpts& o, const Globals& g, std::ostream& os) {
    if (o.fcap_new && o.c1) throw UsageError("give --fcap-new or --c1, not both");
    const double fnew = o.c1 ? capture_fraction(*o.c1) : o.fcap_new.value_or(0.8);
    const auto s = scaled_success(o.p, o.fcap_base, fnew);
    const double attempts = attempt_rate_of(o, o.p);
    emit_entangle(ojson{{"p_success", s.p},
                        {"event_rate_hz", event_rate(s.p, attempts)},
                        {"mean_wait_s", mean_wait(s.p, attempts)},
                        {"improvement_factor", s.factor},
                        {"fcap_new", fnew},
                        {"saturated", s.saturated}},
                  g, os);
    return kExitOk;
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::vector<DetectorModel> load_presets_json(std::string_view text, std::vector<DetectorModel> base) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError(std::string("preset JSON: ") + e.what());
    }
    if (j.is_object()) j = nlohmann::json::array({j});
    if (!j.is_array()) throw UsageError("preset JSON must be an object or an array of objects");
    for (const auto& item : j) {
        if (!item.is_object() || !item.contains("name") || !item["name"].is_string()) {
            throw UsageError("preset JSON entries need a \"name\"");
        }
        const std::string name = item["name"].get<std::string>();
        auto it = std::find_if(base.begin(), base.end(), [&](const DetectorModel& d) { return d.name == name; });
        const bool fresh = it == base.end();
        DetectorModel d = fresh ? DetectorModel{} : *it;
        d.name = name;
        auto take = [&](const char* key, auto setter) {
            if (item.contains(key)) {
                if (!item[key].is_number()) throw UsageError(name + ": \"" + key + "\" must be a number");
                setter(item[key].get<double>());
            } else if (fresh && std::string_view(key) != "pixel_latency_s") {
                throw UsageError(name + ": new preset needs \"" + key + "\"");
            }
        };
        take("eta", [&](double v) { d.eta = v; });
        take("gain", [&](double v) { d.gain_M = v; });
        take("enf", [&](double v) { d.enf_F = v; });
        take("dark_cps", [&](double v) { d.dark_rate = v; });
        take("cap_farad", [&](double v) { d.capacitance_C = Capacitance(v); });
        take("pixel_latency_s", [&](double v) { d.pixel_latency = Time(v); });
        d.validate();
        if (fresh) {
            base.push_back(d);
        } else {
            *it = d;
        }
    }
    return base;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optical subsystem design calculations for surface ion traps", "trapoptics"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    Globals g;
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", g.out_path, "Write output to FILE instead of stdout");
    app.add_option("--seed", g.seed, "Seed for Monte Carlo estimates");

    std::function<int(std::ostream&)> action;

    // beam
    BeamOpts bo;
    auto* beam = app.add_subcommand("beam", "Gaussian beam layout over the chip");
    beam->require_subcommand(1);
    auto add_chip = [&](CLI::App* c) {
        c->add_option("--chip-mm", bo.chip_mm, "Chip size L")->capture_default_str();
        c->add_option("--lambda-nm", bo.lambda_nm, "Wavelength")->capture_default_str();
        c->add_option("--y-ion-um", bo.y_ion_um, "Ion height above the surface")->capture_default_str();
    };
    auto* waist = beam->add_subcommand("waist", "Optimal waist and edge radius");
    add_chip(waist);
    waist->callback([&] { action = [&](std::ostream& os) { return beam_waist(bo, g, os); }; });
    auto* clip = beam->add_subcommand("clip", "Clipping at the chip edges; exit 1 above --max-clip");
    add_chip(clip);
    clip->add_option("--w0-um", bo.w0_um, "Waist (default: optimal)");
    clip->add_option("--max-clip", bo.max_clip, "Allowed clipped fraction per side")->capture_default_str();
    clip->callback([&] { action = [&](std::ostream& os) { return beam_clip(bo, g, os); }; });
    auto* fnum = beam->add_subcommand("fnum", "F-number of a lensed fibre tip");
    fnum->add_option("--tip-um", bo.tip_um, "Tip radius of curvature")->required();
    fnum->add_option("--diameter-um", bo.diameter_um, "Fibre diameter")->required();
    fnum->add_option("--index", bo.index, "Refractive index")->capture_default_str();
    fnum->add_option("--fiber-na", bo.fiber_na, "Fibre NA")->capture_default_str();
    fnum->callback([&] { action = [&](std::ostream& os) { return beam_fnum(bo, g, os); }; });

    // relay
    RelayOpts ro;
    auto* relay = app.add_subcommand("relay", "Beam recycling relay");
    relay->require_subcommand(1);
    auto* rcheck = relay->add_subcommand("check", "Zone fields and product uniformity; exit 1 when it fails");
    rcheck->add_option("--layout", ro.layout, "Take the relay from a layout document");
    rcheck->add_option("--chip-mm", ro.spec.chip_width_mm, "Chip size L")->capture_default_str();
    rcheck->add_option("--lenses", ro.spec.lenses_per_prism, "Lenses per prism (even)")->capture_default_str();
    rcheck->add_option("--offset", ro.spec.offset_fraction, "Prism offset, fraction of L")->capture_default_str();
    rcheck->add_option("--r", ro.r, "Coefficient per retro-reflection, both beams");
    rcheck->add_option("--r-red", ro.spec.r_red, "Coefficient seen by the red beam")->capture_default_str();
    rcheck->add_option("--r-blue", ro.spec.r_blue, "Coefficient seen by the blue beam")->capture_default_str();
    rcheck->add_option("--tol", ro.spec.tolerance, "Allowed product deviation")->capture_default_str();
    rcheck->callback([&] { action = [&](std::ostream& os) { return relay_check(ro, g, os); }; });

    // detect
    DetectOpts dop;
    auto* detect = app.add_subcommand("detect", "Photon detection SNR and bit error rate");
    detect->require_subcommand(1);
    auto add_detect = [&](CLI::App* c) {
        c->add_option("--preset", dop.presets, "Detector preset(s) or 'all'")->capture_default_str();
        c->add_option("--presets-json", dop.presets_json, "Override or add presets from JSON");
        c->add_option("--flux", dop.flux, "Bright-state photon flux at the detector, 1/s")->capture_default_str();
        c->add_option("--dark-flux", dop.dark_flux, "Dark-state photon flux, 1/s")->capture_default_str();
        c->add_option("--temp-k", dop.temp_k, "Readout temperature")->capture_default_str();
        c->add_option("--model", dop.model, "BER model")->check(CLI::IsMember({"exact", "gaussian"}))->capture_default_str();
    };
    auto add_times = [&](CLI::App* c) {
        auto* single = c->add_option("--tm-us", dop.tm_us, "Integration time (default 50)");
        c->add_option("--tm-range", dop.tm_range, "Log sweep: MIN_US MAX_US POINTS")->expected(3)->excludes(single);
    };
    auto* dsnr = detect->add_subcommand("snr", "SNR (with BER) at one or more integration times");
    add_detect(dsnr);
    add_times(dsnr);
    dsnr->callback([&] { action = [&](std::ostream& os) { return detect_rows(dop, g, os, false); }; });
    auto* dber = detect->add_subcommand("ber", "Optimised-threshold BER");
    add_detect(dber);
    add_times(dber);
    dber->add_option("--mc-trials", dop.mc_trials, "Also estimate BER by Monte Carlo");
    dber->callback([&] { action = [&](std::ostream& os) { return detect_rows(dop, g, os, true); }; });
    auto* dmin = detect->add_subcommand("mintime", "Shortest integration time reaching a target BER");
    add_detect(dmin);
    dmin->add_option("--target", dop.target, "Target BER")->capture_default_str();
    dmin->callback([&] { action = [&](std::ostream& os) { return detect_mintime(dop, g, os); }; });

    // cavity
    CavityOpts co;
    auto* cavity = app.add_subcommand("cavity", "Fibre micro-cavity coupling");
    cavity->require_subcommand(1);
    auto add_atom = [&](CLI::App* c) {
        c->add_option("--w0-um", co.w0_um, "Mode waist at the fibre mirror")->capture_default_str();
        c->add_option("--lambda-nm", co.lambda_nm, "Transition wavelength")->capture_default_str();
        c->add_option("--linewidth-mhz", co.linewidth_mhz, "Natural linewidth (Gamma / 2 pi)")->capture_default_str();
    };
    auto* creport = cavity->add_subcommand("report", "Finesse, rates, cooperativity and capture fraction");
    add_atom(creport);
    creport->add_option("--rm", co.rm, "Concave mirror reflectance")->capture_default_str();
    creport->add_option("--rf", co.rf, "Fibre mirror reflectance")->capture_default_str();
    auto* d_opt = creport->add_option("--d-um", co.d_um, "Cavity length");
    auto* roc_opt = creport->add_option("--roc-um", co.roc_um, "Concave mirror radius (short-cavity solution)");
    creport->add_option("--d-over-zr", co.d_over_zr, "Cavity length in Rayleigh lengths")->capture_default_str();
    d_opt->excludes(roc_opt);
    creport->add_option("--sigma-nm", co.sigma_nm, "Mirror rms roughness")->capture_default_str();
    creport->add_option("--z-ion-um", co.z_ion_um, "Ion distance from the waist")->capture_default_str();
    creport->callback([&] { action = [&](std::ostream& os) { return cavity_report(co, g, os, err); }; });
    auto* cfig = cavity->add_subcommand("fig7b", "g0/Gamma and g0/kappa against d/z_R (CSV by default)");
    add_atom(cfig);
    cfig->add_option("--rf", co.rf_list, "Fibre mirror reflectances")->capture_default_str();
    cfig->add_option("--grid-min", co.grid_min, "Smallest d/z_R")->capture_default_str();
    cfig->add_option("--grid-max", co.grid_max, "Largest d/z_R")->capture_default_str();
    cfig->add_option("--points", co.points, "Log grid points")->capture_default_str();
    cfig->callback([&] { action = [&](std::ostream& os) { return cavity_fig7b(co, g, os); }; });

    // layout
    std::string layout_file;
    double angle_tol = 1.0;
    auto* layout = app.add_subcommand("layout", "Beam layout documents");
    layout->require_subcommand(1);
    auto* lval = layout->add_subcommand("validate", "Check a layout; one RULE: message line per violation");
    lval->add_option("file", layout_file, "Layout JSON")->required();
    lval->add_option("--angle-tol-deg", angle_tol, "Angular tolerance")->capture_default_str();
    lval->callback([&] { action = [&](std::ostream& os) { return layout_validate(layout_file, angle_tol, g, os); }; });

    // entangle
    EntangleOpts eo;
    auto* ent = app.add_subcommand("entangle", "Remote entanglement rate budget");
    ent->require_subcommand(1);
    auto add_base = [&](CLI::App* c) {
        c->add_option("--p", eo.p, "Baseline success probability per attempt")->capture_default_str();
        auto* w = c->add_option("--wait-min", eo.wait_min, "Baseline mean wait between events (default 8.5)");
        c->add_option("--attempt-rate", eo.attempt_rate, "Attempts per second")->excludes(w);
    };
    auto* erate = ent->add_subcommand("rate", "Event rate and mean wait");
    add_base(erate);
    erate->callback([&] { action = [&](std::ostream& os) { return entangle_rate(eo, g, os); }; });
    auto* escale = ent->add_subcommand("scale", "Rescale by the capture fraction squared");
    add_base(escale);
    escale->add_option("--fcap-base", eo.fcap_base, "Baseline capture fraction")->capture_default_str();
    escale->add_option("--fcap-new", eo.fcap_new, "New capture fraction (default 0.8)");
    escale->add_option("--c1", eo.c1, "New cooperativity, converted to a capture fraction");
    escale->callback([&] { action = [&](std::ostream& os) { return entangle_scale(eo, g, os); }; });

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }
    if (!action) {
        err << app.help();
        return kExitUsage;
    }

    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    int code = kExitOk;
    try {
        code = action(buf);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const LayoutParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    if (g.out_path.empty()) {
        out << buf.str();
    } else {
        std::ofstream f(g.out_path, std::ios::binary);
        if (!f || !(f << buf.str())) {
            err << "error: cannot write " << g.out_path << '\n';
            return kExitUsage;
        }
    }
    return code;
}

}  // namespace trapoptics::cli
