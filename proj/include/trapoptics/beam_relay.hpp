#pragma once

#include <cstddef>
#include <vector>

#include "trapoptics/quantities.hpp"

namespace trapoptics {

enum class RelayElementKind { MicrolensMirror, PrismFacet };

/// One retro-reflection. The two beams may see different coefficients;
/// an ideal polarisation- and frequency-independent element has r_red == r_blue.
struct RelayElement {
    RelayElement(RelayElementKind kind, double r_red, double r_blue, Length focal_length);
    static RelayElement uniform(RelayElementKind kind, double r, Length focal_length);

    RelayElementKind kind;
    double r_red;
    double r_blue;
    Length focal_length;
};

/// Counter-propagating relay. The red beam enters at zone 0 and meets the
/// elements in walk order right[0], left[0], right[1], left[1], ...; the blue
/// beam runs the same path backwards.
struct RelayChain {
    Length chip_width_L{1.0};
    std::vector<RelayElement> elements_left;
    std::vector<RelayElement> elements_right;
    std::vector<double> zone_positions;  // fractions of L in walk order; empty = evenly spaced
    double E_r = 1.0;
    double E_b = 1.0;

    std::vector<RelayElement> walk_order() const;
    std::size_t zone_count() const { return elements_left.size() + elements_right.size() + 1; }
};

struct ZoneReport {
    std::size_t zone_index;
    double position;  // fraction of L
    double E_r_local;
    double E_b_local;
    double product;
    double product_deviation;  // 1 - product / max product
};

struct UniformityResult {
    bool pass;
    std::size_t worst_zone;
    double worst_deviation;
};

/// Interaction-zone positions (fractions of L, in beam-walk order) for two facing
/// prisms. Prism A carries n lenses at (i+1)/(n+1); prism B is A shifted by offset.
/// Each prism folds a beam between lenses symmetric about its centre, so n must be even.
std::vector<double> prism_zone_positions(Length L, int n_lenses_per_prism, double offset_fraction);

bool imaging_condition_ok(Length f, Length d_zone_lens, Length d_lens_mirror, double tol);

std::vector<ZoneReport> propagate_fields(const RelayChain& chain);

/// Amplitude product E_r*E_b compared across zones.
UniformityResult product_uniformity_check(const std::vector<ZoneReport>& reports, double tol = 0.01);

/// Worst single-beam amplitude spread across zones (max over red and blue of 1 - min/max).
double field_spread(const std::vector<ZoneReport>& reports);

/// Chain for the prism relay: element i of the walk is the prism that folds
/// the beam after zone i. Both prisms use the same coefficients.
RelayChain prism_chain(Length L, int n_lenses_per_prism, double offset_fraction, double r_red, double r_blue,
                       double E_r = 1.0, double E_b = 1.0);

}  // namespace trapoptics
