#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "trapoptics/quantities.hpp"

namespace trapoptics {

enum class BeamFunction { RSRC, Repumping, SingleQubit, TwoQubit, Measurement, DopplerBe, DepopulationBe, DopplerMg };

// Polarisation requirement of a table row. SigmaPlusOrMinus is needed for the
// re-pumping row, which allows sigma+ or sigma- but not pi.
enum class PolarizationSpec {
    Pi,
    SigmaPlus,
    SigmaMinus,
    PiOrSigma,
    SigmaPlusOrMinus,
    SigmaPlusPlusMinus_and_SigmaPlusMinusMinus,
    Any
};

// Polarisation a beam actually carries, relative to the B field.
enum class Polarization { Pi, SigmaPlus, SigmaMinus, SigmaPlusPlusSigmaMinus, SigmaPlusMinusSigmaMinus };

enum class TargetIon { Be9, Mg24 };
enum class RamanDetuning { HyperfineMinusMotional, Hyperfine, Sqrt3MotionalPlusDelta, None };
enum class MomentumDiff { LargeDeltaK, SmallDeltaK, None };
enum class ZoneKind { SingleQubitGate, TwoQubitGate, Measurement, BeLoading, MgLoading };

struct BeamRequirement {
    BeamFunction function;
    PolarizationSpec polarization;
    TargetIon target_ion;
    RamanDetuning raman_detuning;
    MomentumDiff momentum_diff;
    IntensityClass intensity;
    std::vector<ZoneKind> locations;
    std::string location_label;  // as printed in the table

    bool allows(Polarization p) const;
    bool allows(ZoneKind z) const;
};

/// The eight rows of the beam-requirement table, in table order.
const std::vector<BeamRequirement>& canonical_table();
const BeamRequirement& requirement_for(BeamFunction f);
/// One line per row, columns separated by " | ".
std::string serialize_table(const std::vector<BeamRequirement>& rows);

std::string_view to_string(BeamFunction f);
std::string_view to_string(PolarizationSpec p);
std::string_view to_string(Polarization p);
std::string_view to_string(TargetIon t);
std::string_view to_string(RamanDetuning d);
std::string_view to_string(MomentumDiff m);
std::string_view to_string(ZoneKind z);

/// Document keys, e.g. "two_qubit", "sigma+ - sigma-", "modest". Throw LayoutParseError.
BeamFunction parse_beam_function(std::string_view s);
Polarization parse_polarization(std::string_view s);
IntensityClass parse_intensity(std::string_view s);
/// Case-insensitive match against table location names; nullopt when unknown.
std::optional<ZoneKind> parse_zone(std::string_view s);

enum class Scheme { A, B };

struct BField {
    double axis_angle_deg = 0.0;  // in-plane angle from the trap axis, [0, 180)
    double elevation_deg = 0.0;   // out of the chip plane
    std::array<double, 3> direction() const;
};

struct Beam {
    std::string id;
    BeamFunction function;
    Polarization polarization;
    IntensityClass intensity;
    std::string zone;
    std::array<double, 3> propagation;  // unit vector; x = trap axis, z = chip normal
    std::string pair;                   // Raman pair id, may be empty
};

struct RelaySpec {
    double chip_width_mm = 10.0;
    int lenses_per_prism = 4;
    double offset_fraction = 0.2;
    double r_red = 1.0;
    double r_blue = 1.0;
    double tolerance = 0.01;
};

struct BeamLayoutDoc {
    Scheme scheme = Scheme::A;
    BField b_field;
    std::vector<Beam> beams;
    std::optional<RelaySpec> relay;
};

class LayoutParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

BeamLayoutDoc parse_layout(std::string_view json_text);
BeamLayoutDoc load_layout(const std::string& path);

struct Violation {
    std::string rule;  // "R1".."R5"
    std::string beam_id;
    std::string message;
};

struct ValidationOptions {
    double angle_tol_deg = 1.0;
};

/// R1 sigma- beams parallel to B (skipped when R2 fails, since no in-plane beam can then comply)
/// R2 B in the chip plane
/// R3 B-to-trap-axis angle matches the scheme (A: 45 deg, B: 0 deg)
/// R4 each beam matches its table row in polarisation, intensity and zone
/// R5 Raman pairs: large dk counter-propagating or at 90 deg, small dk co-propagating
std::vector<Violation> validate(const BeamLayoutDoc& doc, const ValidationOptions& opts = {});

std::string format_violation(const Violation& v);

}  // namespace trapoptics
