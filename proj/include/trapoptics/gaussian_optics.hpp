#pragma once

#include "trapoptics/quantities.hpp"

namespace trapoptics {

/// TEM00 beam. z0 is the waist position on the propagation axis.
class GaussianBeam {
public:
    GaussianBeam(Length lambda, Length w0, Position z0 = Position(0.0));

    Length lambda() const { return lambda_; }
    Length w0() const { return w0_; }
    Position z0() const { return z0_; }
    Length rayleigh_length() const { return z_r_; }

private:
    Length lambda_;
    Length w0_;
    Position z0_;
    Length z_r_;
};

struct ChipGeometry {
    ChipGeometry(Length L, Length y_ion);
    Length L;
    Length y_ion;
};

struct LensedFiber {
    LensedFiber(Length R_tip, Length D, double n, double NA_f);
    Length R_tip;
    Length D;
    double n;
    double NA_f;
};

struct FNumberReport {
    double f_number;
    double na_lens;
    double na_total;
    Length focal_length;  // plano-convex, R/(n-1)
    bool paraxial_valid;  // false once NA_l + NA_f >= 1
};

Length rayleigh_length(Length w0, Length lambda);

Length beam_radius(const GaussianBeam& beam, Position z);

/// Waist that minimises the beam radius at distance L/2 from the waist.
Length optimal_waist(Length L, Length lambda);

/// Fraction of beam power below the chip plane at the worse chip edge, per side.
/// The chip spans [0, L] along the beam axis.
double clipping_fraction(const GaussianBeam& beam, const ChipGeometry& chip);

/// Clipping of the optimal-waist beam centred over the chip.
double clipping_at_optimal_waist(const ChipGeometry& chip, Length lambda);

bool chip_size_feasible(const ChipGeometry& chip, Length lambda, double max_clip);

/// Largest chip size that keeps the optimal-waist clipping at or below max_clip.
Length max_feasible_chip_size(Length y_ion, Length lambda, double max_clip);

Length plano_convex_focal_length(Length R, double n);

FNumberReport fiber_f_number(const LensedFiber& fiber);

}  // namespace trapoptics
