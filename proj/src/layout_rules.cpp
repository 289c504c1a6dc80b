#include "trapoptics/layout_rules.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "trapoptics/constants.hpp"

namespace trapoptics {

namespace {

using json = nlohmann::json;

constexpr double kDeg = constants::pi / 180.0;

std::vector<BeamRequirement> make_table() {
    using F = BeamFunction;
    using P = PolarizationSpec;
    using Z = ZoneKind;
    const std::vector<Z> gates{Z::SingleQubitGate, Z::TwoQubitGate};
    const std::vector<Z> be_zones{Z::BeLoading, Z::Measurement};
    const std::string be_label = "9Be+ Loading Zone, Measurement Regions";
    return {
        {F::RSRC, P::PiOrSigma, TargetIon::Mg24, RamanDetuning::HyperfineMinusMotional, MomentumDiff::LargeDeltaK,
         IntensityClass::Modest, gates, "All Gate Regions"},
        {F::Repumping, P::SigmaPlusOrMinus, TargetIon::Mg24, RamanDetuning::None, MomentumDiff::None,
         IntensityClass::Mild, gates, "All Gate Regions"},
        {F::SingleQubit, P::PiOrSigma, TargetIon::Be9, RamanDetuning::Hyperfine, MomentumDiff::SmallDeltaK,
         IntensityClass::Modest, {Z::SingleQubitGate}, "Single Qubit Gate Regions"},
        {F::TwoQubit, P::SigmaPlusPlusMinus_and_SigmaPlusMinusMinus, TargetIon::Be9,
         RamanDetuning::Sqrt3MotionalPlusDelta, MomentumDiff::LargeDeltaK, IntensityClass::Extreme,
         {Z::TwoQubitGate}, "Two Qubit Gate Regions"},
        {F::Measurement, P::SigmaMinus, TargetIon::Be9, RamanDetuning::None, MomentumDiff::None,
         IntensityClass::Modest, {Z::Measurement}, "Measurement Regions"},
        {F::DopplerBe, P::SigmaMinus, TargetIon::Be9, RamanDetuning::None, MomentumDiff::None, IntensityClass::Mild,
         be_zones, be_label},
        {F::DepopulationBe, P::SigmaMinus, TargetIon::Be9, RamanDetuning::None, MomentumDiff::None,
         IntensityClass::Mild, be_zones, be_label},
        {F::DopplerMg, P::Any, TargetIon::Mg24, RamanDetuning::None, MomentumDiff::None, IntensityClass::Mild,
         {Z::MgLoading}, "24Mg+ Loading Zone"},
    };
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Lower-case alphanumerics with a plural "s" dropped, so "Measurement Regions"
// and "measurement region" compare equal.
std::string zone_key(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (!out.empty() && out.back() == 's') out.pop_back();
    return out;
}

double dot(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

double angle_deg(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return std::acos(std::clamp(dot(a, b), -1.0, 1.0)) / kDeg;
}

// Angle between two undirected lines, [0, 90].
double line_angle_deg(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return std::acos(std::clamp(std::abs(dot(a, b)), 0.0, 1.0)) / kDeg;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(4);
    os << v;
    return os.str();
}

bool is_raman(BeamFunction f) { return requirement_for(f).momentum_diff != MomentumDiff::None; }

bool needs_b_parallel(BeamFunction f) { return requirement_for(f).polarization == PolarizationSpec::SigmaMinus; }

template <class T>
T get_field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw LayoutParseError(where + ": missing \"" + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw LayoutParseError(where + ": bad type for \"" + key + "\"");
    }
}

}  // namespace

bool BeamRequirement::allows(Polarization p) const {
    using P = Polarization;
    switch (polarization) {
        case PolarizationSpec::Pi: return p == P::Pi;
        case PolarizationSpec::SigmaPlus: return p == P::SigmaPlus;
        case PolarizationSpec::SigmaMinus: return p == P::SigmaMinus;
        case PolarizationSpec::PiOrSigma: return p == P::Pi || p == P::SigmaPlus || p == P::SigmaMinus;
        case PolarizationSpec::SigmaPlusOrMinus: return p == P::SigmaPlus || p == P::SigmaMinus;
        case PolarizationSpec::SigmaPlusPlusMinus_and_SigmaPlusMinusMinus:
            return p == P::SigmaPlusPlusSigmaMinus || p == P::SigmaPlusMinusSigmaMinus;
        case PolarizationSpec::Any: return true;
    }
    return false;
}

bool BeamRequirement::allows(ZoneKind z) const {
    return std::find(locations.begin(), locations.end(), z) != locations.end();
}

const std::vector<BeamRequirement>& canonical_table() {
    static const std::vector<BeamRequirement> table = make_table();
    return table;
}

const BeamRequirement& requirement_for(BeamFunction f) {
    for (const auto& row : canonical_table()) {
        if (row.function == f) return row;
    }
    throw std::logic_error("no table row for beam function");
}

std::string serialize_table(const std::vector<BeamRequirement>& rows) {
    std::string out;
    for (const auto& r : rows) {
        out += std::string(to_string(r.function)) + " | " + std::string(to_string(r.polarization)) + " | " +
               std::string(to_string(r.target_ion)) + " | " + std::string(to_string(r.raman_detuning)) + " | " +
               std::string(to_string(r.momentum_diff)) + " | " + std::string(to_string(r.intensity)) + " | " +
               r.location_label + "\n";
    }
    return out;
}

std::string_view to_string(BeamFunction f) {
    switch (f) {
        case BeamFunction::RSRC: return "RSRC";
        case BeamFunction::Repumping: return "Re-pumping";
        case BeamFunction::SingleQubit: return "Single qubit";
        case BeamFunction::TwoQubit: return "Two qubit";
        case BeamFunction::Measurement: return "Measurement";
        case BeamFunction::DopplerBe: return "Doppler (9Be+)";
        case BeamFunction::DepopulationBe: return "Depopulation";
        case BeamFunction::DopplerMg: return "Doppler (24Mg+)";
    }
    return "?";
}

std::string_view to_string(PolarizationSpec p) {
    switch (p) {
        case PolarizationSpec::Pi: return "pi";
        case PolarizationSpec::SigmaPlus: return "sigma+";
        case PolarizationSpec::SigmaMinus: return "sigma-";
        case PolarizationSpec::PiOrSigma: return "pi, sigma+ or sigma-";
        case PolarizationSpec::SigmaPlusOrMinus: return "sigma+ or sigma-";
        case PolarizationSpec::SigmaPlusPlusMinus_and_SigmaPlusMinusMinus: return "sigma+ + sigma-, sigma+ - sigma-";
        case PolarizationSpec::Any: return "Any";
    }
    return "?";
}

std::string_view to_string(Polarization p) {
    switch (p) {
        case Polarization::Pi: return "pi";
        case Polarization::SigmaPlus: return "sigma+";
        case Polarization::SigmaMinus: return "sigma-";
        case Polarization::SigmaPlusPlusSigmaMinus: return "sigma+ + sigma-";
        case Polarization::SigmaPlusMinusSigmaMinus: return "sigma+ - sigma-";
    }
    return "?";
}

std::string_view to_string(TargetIon t) { return t == TargetIon::Be9 ? "9Be+" : "24Mg+"; }

std::string_view to_string(RamanDetuning d) {
    switch (d) {
        case RamanDetuning::HyperfineMinusMotional: return "w0' - wz";
        case RamanDetuning::Hyperfine: return "w0";
        case RamanDetuning::Sqrt3MotionalPlusDelta: return "sqrt(3) wz + delta";
        case RamanDetuning::None: return "-";
    }
    return "?";
}

std::string_view to_string(MomentumDiff m) {
    switch (m) {
        case MomentumDiff::LargeDeltaK: return "Large dk";
        case MomentumDiff::SmallDeltaK: return "Small dk";
        case MomentumDiff::None: return "-";
    }
    return "?";
}

std::string_view to_string(ZoneKind z) {
    switch (z) {
        case ZoneKind::SingleQubitGate: return "Single Qubit Gate Region";
        case ZoneKind::TwoQubitGate: return "Two Qubit Gate Region";
        case ZoneKind::Measurement: return "Measurement Region";
        case ZoneKind::BeLoading: return "9Be+ Loading Zone";
        case ZoneKind::MgLoading: return "24Mg+ Loading Zone";
    }
    return "?";
}

BeamFunction parse_beam_function(std::string_view s) {
    static const std::map<std::string, BeamFunction> names{
        {"rsrc", BeamFunction::RSRC},
        {"repumping", BeamFunction::Repumping},
        {"single_qubit", BeamFunction::SingleQubit},
        {"two_qubit", BeamFunction::TwoQubit},
        {"measurement", BeamFunction::Measurement},
        {"doppler_be", BeamFunction::DopplerBe},
        {"depopulation_be", BeamFunction::DepopulationBe},
        {"doppler_mg", BeamFunction::DopplerMg},
    };
    const auto it = names.find(lower(s));
    if (it == names.end()) throw LayoutParseError("unknown beam function \"" + std::string(s) + "\"");
    return it->second;
}

Polarization parse_polarization(std::string_view s) {
    static const std::map<std::string, Polarization> names{
        {"pi", Polarization::Pi},
        {"sigma+", Polarization::SigmaPlus},
        {"sigma-", Polarization::SigmaMinus},
        {"sigma+ + sigma-", Polarization::SigmaPlusPlusSigmaMinus},
        {"sigma+ - sigma-", Polarization::SigmaPlusMinusSigmaMinus},
    };
    const auto it = names.find(lower(s));
    if (it == names.end()) throw LayoutParseError("unknown polarization \"" + std::string(s) + "\"");
    return it->second;
}

IntensityClass parse_intensity(std::string_view s) {
    const std::string k = lower(s);
    if (k == "mild") return IntensityClass::Mild;
    if (k == "modest") return IntensityClass::Modest;
    if (k == "extreme") return IntensityClass::Extreme;
    throw LayoutParseError("unknown intensity \"" + std::string(s) + "\"");
}

std::optional<ZoneKind> parse_zone(std::string_view s) {
    static const std::map<std::string, ZoneKind> names{
        {"singlequbitgateregion", ZoneKind::SingleQubitGate},
        {"twoqubitgateregion", ZoneKind::TwoQubitGate},
        {"measurementregion", ZoneKind::Measurement},
        {"9beloadingzone", ZoneKind::BeLoading},
        {"beloadingzone", ZoneKind::BeLoading},
        {"24mgloadingzone", ZoneKind::MgLoading},
        {"mgloadingzone", ZoneKind::MgLoading},
    };
    const auto it = names.find(zone_key(s));
    if (it == names.end()) return std::nullopt;
    return it->second;
}

std::array<double, 3> BField::direction() const {
    const double a = axis_angle_deg * kDeg;
    const double e = elevation_deg * kDeg;
    return {std::cos(a) * std::cos(e), std::sin(a) * std::cos(e), std::sin(e)};
}

BeamLayoutDoc parse_layout(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw LayoutParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw LayoutParseError("layout document must be a JSON object");

    BeamLayoutDoc doc;
    const auto scheme = get_field<std::string>(j, "scheme", "document");
    if (scheme == "A") {
        doc.scheme = Scheme::A;
    } else if (scheme == "B") {
        doc.scheme = Scheme::B;
    } else {
        throw LayoutParseError("scheme must be \"A\" or \"B\"");
    }

    if (!j.contains("b_field") || !j["b_field"].is_object()) throw LayoutParseError("document: missing \"b_field\"");
    const json& b = j["b_field"];
    doc.b_field.axis_angle_deg = get_field<double>(b, "axis_angle_deg", "b_field");
    doc.b_field.elevation_deg = b.contains("elevation_deg") ? get_field<double>(b, "elevation_deg", "b_field") : 0.0;
    if (!(doc.b_field.axis_angle_deg >= 0.0 && doc.b_field.axis_angle_deg < 180.0)) {
        throw LayoutParseError("b_field.axis_angle_deg must lie in [0, 180)");
    }
    if (!(std::abs(doc.b_field.elevation_deg) <= 90.0)) {
        throw LayoutParseError("b_field.elevation_deg must lie in [-90, 90]");
    }

    if (!j.contains("beams") || !j["beams"].is_array()) throw LayoutParseError("document: missing \"beams\" array");
    std::size_t index = 0;
    for (const json& jb : j["beams"]) {
        const std::string where = "beams[" + std::to_string(index++) + "]";
        if (!jb.is_object()) throw LayoutParseError(where + ": must be an object");
        Beam beam;
        beam.id = jb.contains("id") ? get_field<std::string>(jb, "id", where) : where;
        beam.function = parse_beam_function(get_field<std::string>(jb, "function", where));
        beam.polarization = parse_polarization(get_field<std::string>(jb, "polarization", where));
        beam.intensity = parse_intensity(get_field<std::string>(jb, "intensity", where));
        beam.zone = get_field<std::string>(jb, "zone", where);
        const auto v = get_field<std::vector<double>>(jb, "propagation", where);
        if (v.size() != 3) throw LayoutParseError(where + ": propagation must have 3 components");
        beam.propagation = {v[0], v[1], v[2]};
        const double norm = std::sqrt(dot(beam.propagation, beam.propagation));
        if (!(std::abs(norm - 1.0) <= 1e-9)) throw LayoutParseError(where + ": propagation is not a unit vector");
        if (jb.contains("pair")) beam.pair = get_field<std::string>(jb, "pair", where);
        doc.beams.push_back(std::move(beam));
    }

    if (j.contains("relay")) {
        const json& r = j["relay"];
        if (!r.is_object()) throw LayoutParseError("relay must be an object");
        RelaySpec spec;
        if (r.contains("chip_width_mm")) spec.chip_width_mm = get_field<double>(r, "chip_width_mm", "relay");
        if (r.contains("lenses_per_prism")) spec.lenses_per_prism = get_field<int>(r, "lenses_per_prism", "relay");
        if (r.contains("offset_fraction")) spec.offset_fraction = get_field<double>(r, "offset_fraction", "relay");
        if (r.contains("r")) spec.r_red = spec.r_blue = get_field<double>(r, "r", "relay");
        if (r.contains("r_red")) spec.r_red = get_field<double>(r, "r_red", "relay");
        if (r.contains("r_blue")) spec.r_blue = get_field<double>(r, "r_blue", "relay");
        if (r.contains("tolerance")) spec.tolerance = get_field<double>(r, "tolerance", "relay");
        doc.relay = spec;
    }
    return doc;
}

BeamLayoutDoc load_layout(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LayoutParseError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_layout(buf.str());
}

std::vector<Violation> validate(const BeamLayoutDoc& doc, const ValidationOptions& opts) {
    const double tol = opts.angle_tol_deg;
    std::vector<Violation> out;

    const bool in_plane = std::abs(doc.b_field.elevation_deg) <= tol;
    if (!in_plane) {
        out.push_back({"R2", "", "B field is " + fmt(doc.b_field.elevation_deg) + " deg out of the chip plane"});
    }

    const double a = doc.b_field.axis_angle_deg;
    const double axis_line = std::min(a, 180.0 - a);
    const double wanted = doc.scheme == Scheme::A ? 45.0 : 0.0;
    if (!(std::abs(axis_line - wanted) <= tol)) {
        out.push_back({"R3", "", std::string("scheme ") + (doc.scheme == Scheme::A ? "A" : "B") + " needs B at " +
                                     fmt(wanted) + " deg to the trap axis, got " + fmt(axis_line) + " deg"});
    }

    const auto b = doc.b_field.direction();
    for (const Beam& beam : doc.beams) {
        if (in_plane && needs_b_parallel(beam.function)) {
            const double off = line_angle_deg(beam.propagation, b);
            if (off > tol) {
                out.push_back({"R1", beam.id, std::string(to_string(beam.function)) + " beam is " + fmt(off) +
                                                  " deg off the B field"});
            }
        }

        const BeamRequirement& row = requirement_for(beam.function);
        std::vector<std::string> problems;
        if (!row.allows(beam.polarization)) {
            problems.push_back("polarization " + std::string(to_string(beam.polarization)) + " (needs " +
                               std::string(to_string(row.polarization)) + ")");
        }
        if (beam.intensity != row.intensity) {
            problems.push_back("intensity " + std::string(to_string(beam.intensity)) + " (needs " +
                               std::string(to_string(row.intensity)) + ")");
        }
        const auto zone = parse_zone(beam.zone);
        if (!zone || !row.allows(*zone)) {
            problems.push_back("zone \"" + beam.zone + "\" (needs " + row.location_label + ")");
        }
        if (!problems.empty()) {
            std::string msg = std::string(to_string(beam.function)) + " beam has ";
            for (std::size_t i = 0; i < problems.size(); ++i) msg += (i ? ", " : "") + problems[i];
            out.push_back({"R4", beam.id, msg});
        }
    }

    // Raman pairs, in order of first appearance.
    std::vector<std::string> keys;
    std::map<std::string, std::vector<const Beam*>> groups;
    for (const Beam& beam : doc.beams) {
        if (!is_raman(beam.function)) continue;
        const std::string key =
            beam.pair.empty() ? std::string(to_string(beam.function)) + "@" + zone_key(beam.zone) : beam.pair;
        if (!groups.count(key)) keys.push_back(key);
        groups[key].push_back(&beam);
    }
    for (const auto& key : keys) {
        const auto& g = groups[key];
        if (g.size() != 2 || g[0]->function != g[1]->function) {
            out.push_back({"R5", key, "Raman pair \"" + key + "\" needs exactly two beams of one function, has " +
                                          std::to_string(g.size())});
            continue;
        }
        const double theta = angle_deg(g[0]->propagation, g[1]->propagation);
        const MomentumDiff dk = requirement_for(g[0]->function).momentum_diff;
        if (dk == MomentumDiff::LargeDeltaK) {
            if (!(std::abs(theta - 180.0) <= tol || std::abs(theta - 90.0) <= tol)) {
                out.push_back({"R5", key, std::string(to_string(g[0]->function)) + " pair at " + fmt(theta) +
                                              " deg; large dk needs counter-propagating or 90 deg beams"});
            }
        } else if (!(theta <= tol)) {
            out.push_back({"R5", key, std::string(to_string(g[0]->function)) + " pair at " + fmt(theta) +
                                          " deg; small dk needs co-propagating beams"});
        }
    }
    return out;
}

std::string format_violation(const Violation& v) {
    return v.rule + ": " + (v.beam_id.empty() ? "" : "[" + v.beam_id + "] ") + v.message;
}

}  // namespace trapoptics
