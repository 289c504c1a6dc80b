#include "trapoptics/gaussian_optics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/erf.hpp>

#include "trapoptics/constants.hpp"

namespace trapoptics {

using constants::pi;

Length rayleigh_length(Length w0, Length lambda) {
    if (lambda.value() <= 0.0) detail::throw_domain("wavelength", lambda.value());
    return Length(pi * w0.value() * w0.value() / lambda.value());
}

GaussianBeam::GaussianBeam(Length lambda, Length w0, Position z0)
    : lambda_(lambda), w0_(w0), z0_(z0), z_r_(0.0) {
    if (lambda.value() <= 0.0) detail::throw_domain("wavelength", lambda.value());
    if (w0.value() <= 0.0) detail::throw_domain("beam waist", w0.value());
    z_r_ = trapoptics::rayleigh_length(w0, lambda);
}

ChipGeometry::ChipGeometry(Length L_, Length y_ion_) : L(L_), y_ion(y_ion_) {
    if (L.value() <= 0.0) detail::throw_domain("chip size", L.value());
    if (y_ion.value() <= 0.0) detail::throw_domain("ion height", y_ion.value());
}

LensedFiber::LensedFiber(Length R_tip_, Length D_, double n_, double NA_f_)
    : R_tip(R_tip_), D(D_), n(n_), NA_f(NA_f_) {
    if (R_tip.value() <= 0.0) detail::throw_domain("tip radius", R_tip.value());
    if (D.value() <= 0.0) detail::throw_domain("fiber diameter", D.value());
    if (!(n > 1.0)) detail::throw_domain("refractive index", n);
    if (!(NA_f >= 0.0 && NA_f < 1.0)) detail::throw_domain("fiber NA", NA_f);
}

Length beam_radius(const GaussianBeam& beam, Position z) {
    const double u = (z.value() - beam.z0().value()) / beam.rayleigh_length().value();
    return Length(beam.w0().value() * std::sqrt(1.0 + u * u));
}

Length optimal_waist(Length L, Length lambda) {
    if (L.value() <= 0.0) detail::throw_domain("chip size", L.value());
    if (lambda.value() <= 0.0) detail::throw_domain("wavelength", lambda.value());
    return Length(std::sqrt(L.value() * lambda.value() / (2.0 * pi)));
}

double clipping_fraction(const GaussianBeam& beam, const ChipGeometry& chip) {
    const double w = std::max(beam_radius(beam, Position(0.0)).value(),
                              beam_radius(beam, Position(chip.L.value())).value());
    return 0.5 * std::erfc(std::sqrt(2.0) * chip.y_ion.value() / w);
}

double clipping_at_optimal_waist(const ChipGeometry& chip, Length lambda) {
    const GaussianBeam beam(lambda, optimal_waist(chip.L, lambda), Position(chip.L.value() / 2.0));
    return clipping_fraction(beam, chip);
}

bool chip_size_feasible(const ChipGeometry& chip, Length lambda, double max_clip) {
    if (!(max_clip > 0.0 && max_clip < 0.5)) detail::throw_domain("max clip", max_clip);
    return clipping_at_optimal_waist(chip, lambda) <= max_clip;
}

// At the optimal waist the edge sits one Rayleigh length out, so W_edge^2 = L*lambda/pi.
Length max_feasible_chip_size(Length y_ion, Length lambda, double max_clip) {
    if (!(max_clip > 0.0 && max_clip < 0.5)) detail::throw_domain("max clip", max_clip);
    if (lambda.value() <= 0.0) detail::throw_domain("wavelength", lambda.value());
    const double w_max = std::sqrt(2.0) * y_ion.value() / boost::math::erfc_inv(2.0 * max_clip);
    return Length(pi * w_max * w_max / lambda.value());
}

Length plano_convex_focal_length(Length R, double n) {
    if (!(n > 1.0)) detail::throw_domain("refractive index", n);
    return Length(R.value() / (n - 1.0));
}

FNumberReport fiber_f_number(const LensedFiber& fiber) {
    FNumberReport r{};
    r.na_lens = fiber.D.value() * (fiber.n - 1.0) / (2.0 * fiber.R_tip.value());
    r.na_total = r.na_lens + fiber.NA_f;
    r.f_number = r.na_total > 0.0 ? 1.0 / (2.0 * r.na_total) : std::numeric_limits<double>::infinity();
    r.focal_length = plano_convex_focal_length(fiber.R_tip, fiber.n);
    r.paraxial_valid = r.na_total < 1.0;
    return r;
}

}  // namespace trapoptics
