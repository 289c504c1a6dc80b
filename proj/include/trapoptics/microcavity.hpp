#pragma once

#include <vector>

#include "trapoptics/quantities.hpp"

namespace trapoptics {

class AtomicTransition {
public:
    /// linewidth is the natural FWHM in Hz; Gamma = 2*pi*linewidth.
    AtomicTransition(Length lambda_a, Frequency linewidth);
    static AtomicTransition from_gamma(Length lambda_a, AngularFrequency gamma);
    /// Defaults for the 313 nm Be+ cycling transition (20 MHz linewidth).
    static AtomicTransition beryllium_313();

    Length lambda() const { return lambda_; }
    Frequency linewidth() const { return linewidth_; }
    AngularFrequency omega() const;
    AngularFrequency gamma() const;
    /// Transition dipole moment (C*m) from inverting the Wigner-Weisskopf rate.
    double dipole_moment() const;

private:
    Length lambda_;
    Frequency linewidth_;
};

/// Spontaneous emission rate for a dipole moment p_d at angular frequency omega.
AngularFrequency wigner_weisskopf_gamma(AngularFrequency omega, double p_d);

double finesse(double R_m, double R_f);
AngularFrequency cavity_decay_kappa(Length d, double finesse);
double scattering_loss(Length sigma, Length lambda);
double capture_fraction(double C1);
/// Saturated two-level scattering rate Gamma/2, photons/s.
double max_scatter_rate(const AtomicTransition& t);

/// Plano-concave fibre cavity. The fibre mirror is planar and carries the mode
/// waist; the concave mirror has radius of curvature roc_R. The mode condition
/// d(|R| - d) = z_R^2 ties roc_R to d.
class CavityDesign {
public:
    enum class Branch { Short, Long };

    static CavityDesign from_length(double R_m, double R_f, Length roughness_sigma, Length w0, Length d, Length lambda);
    static CavityDesign from_curvature(double R_m, double R_f, Length roughness_sigma, Length w0, Length roc_R,
                                       Length lambda, Branch branch = Branch::Short);

    double R_m() const { return R_m_; }
    double R_f() const { return R_f_; }
    Length roughness_sigma() const { return sigma_; }
    Length roc_R() const { return roc_; }
    Length d() const { return d_; }
    Length w0() const { return w0_; }
    Length lambda() const { return lambda_; }
    Length rayleigh_length() const;
    double mode_volume() const;  // pi w0^2 d, m^3
    double alpha() const;        // lambda^2 / (2 pi^2 w0^2)
    double finesse() const;
    /// True when 1 - R_m <= 0.1 (1 - R_f).
    bool mirror_ordering_ok() const;

private:
    CavityDesign(double R_m, double R_f, Length sigma, Length w0, Length roc, Length d, Length lambda);

    double R_m_;
    double R_f_;
    Length sigma_;
    Length w0_;
    Length roc_;
    Length d_;
    Length lambda_;
};

/// Peak single-photon field E0 (V/m) at the waist.
double single_photon_field_max(const CavityDesign& design);
/// On-axis field at distance z from the waist (fibre mirror), 0 <= z <= d.
double field_on_axis(const CavityDesign& design, Length z);

AngularFrequency vacuum_rabi_g0(const AtomicTransition& t, double E);

/// Closed-form cooperativity 3 lambda^2 F / (pi^3 w0^2 (1 + alpha)).
double cooperativity_closed(const CavityDesign& design);

struct CouplingReport {
    double finesse;
    double kappa;    // rad/s
    double gamma;    // rad/s
    double g0;       // rad/s, at z_ion
    double g0_waist; // rad/s
    double C1;       // g0_waist^2 / (2 Gamma kappa)
    double C1_closed;
    double f_cap;
    double g0_over_gamma;
    double g0_over_kappa;
    bool strong_coupling;  // g0 > Gamma and g0 > kappa
    bool mirror_ordering_ok;
};

/// Throws std::logic_error if the two cooperativity forms disagree beyond 1e-6.
CouplingReport coupling_report(const AtomicTransition& t, const CavityDesign& design, Length z_ion = Length(0.0));

struct Fig7bRow {
    double d_over_zr;
    double g0_over_gamma;
    std::vector<double> g0_over_kappa;  // one per R_f, same order as the input list
    bool feasible;
};

/// Sweep with R_m = 1, ion at the waist. Rows are in grid order.
std::vector<Fig7bRow> fig7b_sweep(const AtomicTransition& t, Length w0, const std::vector<double>& R_f_list,
                                  const std::vector<double>& d_over_zr_grid);

/// Log-spaced d/z_R grid.
std::vector<double> log_grid(double lo, double hi, int points);

}  // namespace trapoptics
