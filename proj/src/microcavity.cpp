#include "trapoptics/microcavity.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "trapoptics/constants.hpp"

namespace trapoptics {

using constants::c;
using constants::eps0;
using constants::h;
using constants::hbar;
using constants::pi;

AtomicTransition::AtomicTransition(Length lambda_a, Frequency linewidth) : lambda_(lambda_a), linewidth_(linewidth) {
    if (lambda_a.value() <= 0.0) detail::throw_domain("transition wavelength", lambda_a.value());
}

AtomicTransition AtomicTransition::from_gamma(Length lambda_a, AngularFrequency gamma) {
    return AtomicTransition(lambda_a, Frequency(gamma.value() / (2.0 * pi)));
}

AtomicTransition AtomicTransition::beryllium_313() { return AtomicTransition(Length(313e-9), Frequency(20e6)); }

AngularFrequency AtomicTransition::omega() const { return angular_frequency_from_wavelength(lambda_); }

AngularFrequency AtomicTransition::gamma() const { return AngularFrequency(2.0 * pi * linewidth_.value()); }

double AtomicTransition::dipole_moment() const {
    const double w = omega().value();
    return std::sqrt(3.0 * pi * eps0 * hbar * c * c * c * gamma().value() / (w * w * w));
}

AngularFrequency wigner_weisskopf_gamma(AngularFrequency omega, double p_d) {
    if (!(p_d >= 0.0)) detail::throw_domain("dipole moment", p_d);
    const double w = omega.value();
    return AngularFrequency(w * w * w * p_d * p_d / (3.0 * pi * eps0 * hbar * c * c * c));
}

double finesse(double R_m, double R_f) {
    if (!(R_m > 0.0 && R_m <= 1.0)) detail::throw_domain("concave mirror reflectance", R_m);
    if (!(R_f > 0.0 && R_f <= 1.0)) detail::throw_domain("fibre mirror reflectance", R_f);
    const double product = R_m * R_f;
    if (!(product < 1.0)) detail::throw_domain("mirror reflectance product", product);
    return -pi / std::log(product);
}

AngularFrequency cavity_decay_kappa(Length d, double F) {
    if (d.value() <= 0.0) detail::throw_domain("cavity length", d.value());
    if (!(F > 0.0)) detail::throw_domain("finesse", F);
    return AngularFrequency(pi * c / (d.value() * F));
}

double scattering_loss(Length sigma, Length lambda) {
    if (lambda.value() <= 0.0) detail::throw_domain("wavelength", lambda.value());
    const double x = 4.0 * pi * sigma.value() / lambda.value();
    return -std::expm1(-x * x);
}

double capture_fraction(double C1) {
    if (!(C1 >= 0.0)) detail::throw_domain("cooperativity", C1);
    return 2.0 * C1 / (2.0 * C1 + 1.0);
}

double max_scatter_rate(const AtomicTransition& t) { return t.gamma().value() / 2.0; }

CavityDesign::CavityDesign(double R_m, double R_f, Length sigma, Length w0, Length roc, Length d, Length lambda)
    : R_m_(R_m), R_f_(R_f), sigma_(sigma), w0_(w0), roc_(roc), d_(d), lambda_(lambda) {
    trapoptics::finesse(R_m, R_f);  // validates the reflectances
    if (R_f >= 1.0) detail::throw_domain("fibre mirror reflectance", R_f);
    if (w0.value() <= 0.0) detail::throw_domain("mode waist", w0.value());
    if (lambda.value() <= 0.0) detail::throw_domain("wavelength", lambda.value());
    if (!(d.value() > 0.0 && d.value() < roc.value())) detail::throw_domain("cavity length", d.value());
}

CavityDesign CavityDesign::from_length(double R_m, double R_f, Length sigma, Length w0, Length d, Length lambda) {
    if (d.value() <= 0.0) detail::throw_domain("cavity length", d.value());
    const double zr = pi * w0.value() * w0.value() / lambda.value();
    const double roc = d.value() + zr * zr / d.value();
    return CavityDesign(R_m, R_f, sigma, w0, Length(roc), d, lambda);
}

CavityDesign CavityDesign::from_curvature(double R_m, double R_f, Length sigma, Length w0, Length roc_R, Length lambda,
                                          Branch branch) {
    if (lambda.value() <= 0.0) detail::throw_domain("wavelength", lambda.value());
    const double zr = pi * w0.value() * w0.value() / lambda.value();
    const double R = roc_R.value();
    const double disc = R * R - 4.0 * zr * zr;
    if (!(disc >= 0.0)) detail::throw_domain("radius of curvature (no mode for this waist)", R);
    const double root = std::sqrt(disc);
    // Short branch via the product of roots, which stays accurate when root ~ R.
    const double d = branch == Branch::Short ? 2.0 * zr * zr / (R + root) : (R + root) / 2.0;
    return CavityDesign(R_m, R_f, sigma, w0, roc_R, Length(d), lambda);
}

Length CavityDesign::rayleigh_length() const { return Length(pi * w0_.value() * w0_.value() / lambda_.value()); }

double CavityDesign::mode_volume() const { return pi * w0_.value() * w0_.value() * d_.value(); }

double CavityDesign::alpha() const {
    const double l = lambda_.value();
    const double w = w0_.value();
    return l * l / (2.0 * pi * pi * w * w);
}

double CavityDesign::finesse() const { return trapoptics::finesse(R_m_, R_f_); }

bool CavityDesign::mirror_ordering_ok() const { return (1.0 - R_m_) <= 0.1 * (1.0 - R_f_); }

double single_photon_field_max(const CavityDesign& design) {
    const double l = design.lambda().value();
    return std::sqrt(4.0 * h * c / (l * design.mode_volume() * eps0 * (1.0 + design.alpha())));
}

double field_on_axis(const CavityDesign& design, Length z) {
    if (z.value() > design.d().value()) detail::throw_domain("axial position", z.value());
    const double u = z.value() / design.rayleigh_length().value();
    return single_photon_field_max(design) / std::sqrt(1.0 + u * u);
}

AngularFrequency vacuum_rabi_g0(const AtomicTransition& t, double E) {
    if (!(E >= 0.0)) detail::throw_domain("field amplitude", E);
    return AngularFrequency(std::sqrt(2.0) * t.dipole_moment() * E / hbar);
}

double cooperativity_closed(const CavityDesign& design) {
    const double l = design.lambda().value();
    const double w = design.w0().value();
    return 3.0 * l * l * design.finesse() / (pi * pi * pi * w * w * (1.0 + design.alpha()));
}

CouplingReport coupling_report(const AtomicTransition& t, const CavityDesign& design, Length z_ion) {
    CouplingReport r{};
    r.finesse = design.finesse();
    r.kappa = cavity_decay_kappa(design.d(), r.finesse).value();
    r.gamma = t.gamma().value();
    r.g0 = vacuum_rabi_g0(t, field_on_axis(design, z_ion)).value();
    r.g0_waist = vacuum_rabi_g0(t, single_photon_field_max(design)).value();
    r.C1 = r.g0_waist * r.g0_waist / (2.0 * r.gamma * r.kappa);
    r.C1_closed = cooperativity_closed(design);
    // The closed form assumes the cavity is resonant with the transition.
    if (std::abs(t.lambda().value() / design.lambda().value() - 1.0) <= 1e-12 &&
        !(std::abs(r.C1 / r.C1_closed - 1.0) <= 1e-6)) {
        throw std::logic_error("cooperativity forms disagree: " + std::to_string(r.C1) + " vs " +
                               std::to_string(r.C1_closed));
    }
    r.f_cap = capture_fraction(r.C1);
    r.g0_over_gamma = r.g0 / r.gamma;
    r.g0_over_kappa = r.g0 / r.kappa;
    r.strong_coupling = r.g0 > r.gamma && r.g0 > r.kappa;
    r.mirror_ordering_ok = design.mirror_ordering_ok();
    return r;
}

std::vector<Fig7bRow> fig7b_sweep(const AtomicTransition& t, Length w0, const std::vector<double>& R_f_list,
                                  const std::vector<double>& d_over_zr_grid) {
    const double zr = pi * w0.value() * w0.value() / t.lambda().value();
    std::vector<Fig7bRow> rows;
    rows.reserve(d_over_zr_grid.size());
    for (double x : d_over_zr_grid) {
        Fig7bRow row{x, std::nan(""), {}, false};
        const double d = x * zr;
        // |R| = d + z_R^2/d always exceeds d for d > 0; anything else has no stable mode.
        if (!(d > 0.0) || !(d < d + zr * zr / d)) {
            row.g0_over_kappa.assign(R_f_list.size(), std::nan(""));
            rows.push_back(row);
            continue;
        }
        row.feasible = true;
        for (double R_f : R_f_list) {
            const auto design = CavityDesign::from_length(1.0, R_f, Length(0.0), w0, Length(d), t.lambda());
            const auto rep = coupling_report(t, design);
            row.g0_over_gamma = rep.g0_over_gamma;
            row.g0_over_kappa.push_back(rep.g0_over_kappa);
        }
        if (R_f_list.empty()) {
            const auto design = CavityDesign::from_length(1.0, 0.5, Length(0.0), w0, Length(d), t.lambda());
            row.g0_over_gamma = vacuum_rabi_g0(t, single_photon_field_max(design)).value() / t.gamma().value();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0.0 && hi > lo)) detail::throw_domain("grid bounds", lo);
    if (points < 2) detail::throw_domain("grid points", points);
    std::vector<double> g(points);
    // Decimal exponents keep decade points exact (1e-5, not 9.999999999999997e-06).
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int i = 0; i < points; ++i) g[i] = std::pow(10.0, a + (b - a) * i / (points - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

}  // namespace trapoptics
