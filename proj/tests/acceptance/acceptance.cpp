// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "trapoptics/beam_relay.hpp"
#include "trapoptics/constants.hpp"
#include "trapoptics/detection.hpp"
#include "trapoptics/entanglement.hpp"
#include "trapoptics/gaussian_optics.hpp"
#include "trapoptics/layout_rules.hpp"
#include "trapoptics/microcavity.hpp"

using namespace trapoptics;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool within(double x, double lo, double hi) { return x >= lo && x <= hi; }

MeasurementScenario at(double flux, double t) { return MeasurementScenario{flux, 0.0, Time(t), Temperature(300.0)}; }

// Power fraction of exp(-2x^2/W^2) beyond y by composite Simpson.
double clip_quadrature(double W, double y) {
    const int n = 20000;
    const double a = y, b = y + 12.0 * W, h = (b - a) / n;
    auto f = [&](double x) { return std::exp(-2.0 * x * x / (W * W)); };
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0 / (W * std::sqrt(constants::pi / 2.0));
}

void optimal_waist_check() {
    const auto t0 = Clock::now();
    const int reps = 1000;
    double w0 = 0.0;
    for (int i = 0; i < reps; ++i) w0 = optimal_waist(Length(10e-3), Length(313e-9)).value();
    const double per_call = seconds_since(t0) / reps;
    const double edge = beam_radius(GaussianBeam(Length(313e-9), Length(w0), Position(0.0)), Position(5e-3)).value();
    const bool ok = std::abs(w0 * 1e6 - 22.3) <= 0.1 && std::abs(edge * 1e6 - 31.6) <= 0.1 && per_call < 1e-3;
    report(ok, "optimal waist", fmt("w0 = %.3f um, w(5 mm) = %.3f um, %.2g s per call", w0 * 1e6, edge * 1e6, per_call));
}

void clipping_check() {
    const ChipGeometry chip(Length(10e-3), Length(50e-6));
    const double w0 = optimal_waist(chip.L, Length(313e-9)).value();
    const GaussianBeam beam(Length(313e-9), Length(w0), Position(5e-3));
    const double clip = clipping_fraction(beam, chip);
    const double oracle = clip_quadrature(beam_radius(beam, Position(0.0)).value(), 50e-6);
    const bool ok = clip < 8e-4 && std::abs(clip - oracle) <= 1e-6;
    report(ok, "edge clipping", fmt("clip = %.4g per side, quadrature %.4g", clip, oracle));
}

void rayleigh_check() {
    const double zr = rayleigh_length(Length(1.5e-6), Length(313e-9)).value() * 1e6;
    report(std::abs(zr - 22.6) <= 0.1, "cavity Rayleigh length", fmt("z_R = %.3f um", zr));
}

void thermal_check() {
    const double th = thermal_noise_electrons(Temperature(300.0), Capacitance(1e-12));
    const double g = gain_threshold_for_shot_limit(Temperature(300.0), Capacitance(1e-12), 1.0);
    report(within(th, 780, 830) && within(g, 780, 830), "thermal floor and gain rule",
           fmt("sigma = %.1f e, gain threshold (P=1) = %.1f", th, g));
}

void timing_check() {
    const auto t0 = Clock::now();
    std::vector<std::pair<std::string, double>> times;
    for (const auto& d : detector_presets()) {
        const auto r = min_integration_time(d, 1e6, 0.0, Temperature(300.0), 1e-3);
        times.emplace_back(d.name, r.reachable ? r.T_M.value() : INFINITY);
    }
    const double sweep = seconds_since(t0);
    auto time_of = [&](const char* n) {
        return std::find_if(times.begin(), times.end(), [&](auto& p) { return p.first == n; })->second;
    };
    const double best = std::min(time_of("UVPC"), time_of("EMCCD"));
    const bool ok = within(best, 25e-6, 100e-6) && sweep < 5.0;
    std::string detail = fmt("best = %.2f us (band 25-100 us), sweep %.2f s;", best * 1e6, sweep);
    for (const auto& [n, t] : times) detail += fmt(" %s %.2f us", n.c_str(), t * 1e6);
    report(ok, "detection timing", detail);
}

void ber_order_check() {
    auto ber = [](const char* n, double t) { return ber_analytic(detector_preset(n), at(1e6, t)).ber; };
    const double uv = ber("UVPC", 50e-6), em = ber("EMCCD", 50e-6), pmt = ber("PMT", 50e-6), ccd = ber("CCD", 50e-6);
    const bool order = uv < pmt && em < pmt && pmt < ccd;
    bool mono = true;
    std::string where;
    for (const auto& d : detector_presets()) {
        double prev = 0.5;
        for (int i = 0; i <= 30; ++i) {
            const double t = 1e-6 * std::pow(10.0, i / 10.0);
            const double b = ber_analytic(d, at(1e6, t)).ber;
            if (b > prev * (1.0 + 1e-6) + 1e-18) {
                mono = false;
                where = fmt(" (%s rises at %.3g s)", d.name.c_str(), t);
            }
            prev = b;
        }
    }
    report(order && mono, "BER ordering and monotonicity",
           fmt("50 us: UVPC %.3g, EMCCD %.3g, PMT %.3g, CCD %.3g; monotone %s%s", uv, em, pmt, ccd,
               mono ? "yes" : "no", where.c_str()));
}

void monte_carlo_check() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(detector_presets().size()) - 1);
    std::uniform_real_distribution<double> logT(std::log(1e-6), std::log(1e-3)), logF(std::log(3e5), std::log(3e6));
    int kept = 0, agree = 0, draws = 0;
    std::string worst;
    double worst_ratio = 1.0;
    while (kept < 20 && draws < 10000) {
        ++draws;
        const auto& det = detector_presets()[pick(rng)];
        const auto sc = at(std::exp(logF(rng)), std::exp(logT(rng)));
        const auto a = ber_analytic(det, sc);
        if (a.ber < 1e-5) continue;
        const auto mc = ber_monte_carlo(det, sc, a.threshold, 1000000, 1000 + kept);
        const bool in_ci = a.ber >= mc.ci_low && a.ber <= mc.ci_high;
        const double ratio = mc.ber > 0.0 ? std::max(a.ber / mc.ber, mc.ber / a.ber) : INFINITY;
        if (in_ci || ratio <= 2.0) ++agree;
        if (ratio > worst_ratio) {
            worst_ratio = ratio;
            worst = fmt("%s T=%.3g s flux=%.3g analytic %.4g mc %.4g", det.name.c_str(), sc.T_M.value(), sc.flux_bright,
                        a.ber, mc.ber);
        }
        ++kept;
    }
    const double elapsed = seconds_since(t0);
    report(kept == 20 && agree == 20 && elapsed < 60.0, "analytic BER against Monte Carlo",
           fmt("%d/%d scenarios agree, %.1f s; worst ratio %.3f (%s)", agree, kept, elapsed, worst_ratio, worst.c_str()));
}

void cooperativity_check() {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double w0 = 0.5e-6 + 9.5e-6 * u(rng);
        const double lam = 200e-9 + 1300e-9 * u(rng);
        const double lw = std::exp(std::log(1e6) + u(rng) * std::log(1e3));
        const double R_f = 0.9 + 0.0999 * u(rng);
        const double R_m = 1.0 - 0.1 * (1.0 - R_f) * u(rng);
        const double zr = constants::pi * w0 * w0 / lam;
        const double d = zr * std::exp(std::log(0.1) + u(rng) * std::log(100.0));
        const AtomicTransition t{Length(lam), Frequency(lw)};
        const auto r = coupling_report(t, CavityDesign::from_length(R_m, R_f, Length(0.0), Length(w0), Length(d), Length(lam)));
        worst = std::max(worst, std::abs(r.C1 / r.C1_closed - 1.0));
    }
    const bool exact = capture_fraction(2.0) == 0.8 && capture_fraction(20.0) == 40.0 / 41.0;
    report(worst <= 1e-6 && exact, "cooperativity algebra",
           fmt("worst relative gap %.2g over 1000 designs; f_cap(2) = %.17g, f_cap(20) = %.17g", worst,
               capture_fraction(2.0), capture_fraction(20.0)));
}

void scattering_check() {
    const double a = scattering_loss(Length(0.25e-9), Length(313e-9));
    const double b = scattering_loss(Length(0.8e-9), Length(313e-9));
    report(within(a, 0.9e-4, 1.1e-4) && within(b, 0.95e-3, 1.1e-3), "mirror scattering loss",
           fmt("0.25 nm: %.4f %%, 0.8 nm: %.4f %%", a * 100, b * 100));
}

void scatter_rate_check() {
    const double r = max_scatter_rate(AtomicTransition::beryllium_313());
    report(within(r, 6.0e7, 6.5e7), "maximum scatter rate", fmt("%.4g photons/s", r));
}

void sweep_check() {
    const auto be = AtomicTransition::beryllium_313();
    const std::vector<double> Rf{0.99, 0.999, 0.9999};
    const auto grid = log_grid(0.1, 10.0, 41);
    const double zr = constants::pi * 1.5e-6 * 1.5e-6 / 313e-9;
    double gamma_gap = 0.0;
    bool increasing = true;
    std::vector<bool> strong(Rf.size(), false);
    for (double x : grid) {
        std::vector<CouplingReport> reps;
        for (double r : Rf) {
            reps.push_back(coupling_report(be, CavityDesign::from_length(1.0, r, Length(0.0), Length(1.5e-6), Length(x * zr), Length(313e-9))));
        }
        for (std::size_t k = 0; k < reps.size(); ++k) {
            gamma_gap = std::max(gamma_gap, std::abs(reps[k].g0_over_gamma / reps[0].g0_over_gamma - 1.0));
            if (k > 0 && !(reps[k].g0_over_kappa > reps[k - 1].g0_over_kappa)) increasing = false;
            if (reps[k].strong_coupling) strong[k] = true;
        }
    }
    const bool ok = gamma_gap <= 1e-12 && increasing && !strong[0] && strong[1] && strong[2];
    report(ok, "cavity length sweep",
           fmt("g0/Gamma spread %.2g, g0/kappa rises with R_f: %s, strong coupling at 0.99/0.999/0.9999: %d/%d/%d",
               gamma_gap, increasing ? "yes" : "no", int(strong[0]), int(strong[1]), int(strong[2])));
}

void entanglement_check() {
    const double f = improvement_factor(0.004, 0.8);
    const auto b = EntanglementBaseline::from_wait(1e-8, 8.5 * 60.0);
    report(f == 4.0e4 && within(b.event_rate, 1.9e-3, 2.0e-3), "entanglement scaling",
           fmt("factor %.17g, baseline %.4g events/s", f, b.event_rate));
}

void relay_check() {
    const Length L(10e-3);
    const auto lossless = propagate_fields(prism_chain(L, 4, 0.2, 1.0, 1.0));
    double spread = 0.0;
    for (const auto& z : lossless) spread = std::max(spread, z.product_deviation);
    const auto r99 = product_uniformity_check(propagate_fields(prism_chain(L, 4, 0.2, 0.99, 0.99)));
    const auto r999 = product_uniformity_check(propagate_fields(prism_chain(L, 4, 0.2, 0.999, 0.999)));
    auto zones = prism_zone_positions(L, 4, 0.2);
    std::sort(zones.begin(), zones.end());
    bool spacing = zones.size() == 5;
    for (std::size_t i = 1; i < zones.size(); ++i) spacing = spacing && std::abs(zones[i] - zones[i - 1] - 0.2) < 1e-12;
    const bool ok = spread == 0.0 && !r99.pass && r999.pass && spacing;
    std::string pos;
    for (double z : zones) pos += fmt(" %.1f", z);
    report(ok, "relay invariants",
           fmt("lossless spread %.2g; r=0.99 check %s (worst product deviation %.3g); r=0.999 check %s; zones at%s L",
               spread, r99.pass ? "passes" : "fails", r99.worst_deviation, r999.pass ? "passes" : "fails", pos.c_str()));
}

Beam& find_beam(BeamLayoutDoc& doc, const char* id) {
    return *std::find_if(doc.beams.begin(), doc.beams.end(), [&](const Beam& b) { return b.id == id; });
}

void layout_check() {
    const auto base = load_layout(std::string(TRAPOPTICS_SOURCE_DIR) + "/fixtures/scheme_a.json");
    const auto clean = validate(base);
    struct Mut {
        const char* rule;
        std::function<void(BeamLayoutDoc&)> apply;
    };
    const double c30 = std::cos(constants::pi / 6.0), s30 = std::sin(constants::pi / 6.0);
    const std::vector<Mut> muts{
        {"R1", [&](BeamLayoutDoc& d) {
             auto& p = find_beam(d, "meas-1").propagation;
             p = {p[0] * c30 - p[1] * s30, p[0] * s30 + p[1] * c30, p[2]};
         }},
        {"R2", [](BeamLayoutDoc& d) { d.b_field.elevation_deg = 10.0; }},
        {"R3", [](BeamLayoutDoc& d) { d.scheme = Scheme::B; }},
        {"R4", [](BeamLayoutDoc& d) { find_beam(d, "repump-1").polarization = Polarization::Pi; }},
        {"R4", [](BeamLayoutDoc& d) { find_beam(d, "doppler-mg-1").intensity = IntensityClass::Extreme; }},
        {"R4", [](BeamLayoutDoc& d) { find_beam(d, "sq-a").zone = "Measurement Region"; }},
        {"R5", [](BeamLayoutDoc& d) { find_beam(d, "tq-b").propagation = {1.0, 0.0, 0.0}; }},
        {"R5", [](BeamLayoutDoc& d) { find_beam(d, "rsrc-b").propagation = {0.0, 1.0, 0.0}; }},
    };
    int good = 0;
    std::string got;
    for (const auto& m : muts) {
        auto doc = base;
        m.apply(doc);
        const auto v = validate(doc);
        if (v.size() == 1 && v[0].rule == m.rule) ++good;
        got += " " + (v.size() == 1 ? v[0].rule : fmt("%zu violations", v.size()));
    }
    report(clean.empty() && good == 8, "layout validation",
           fmt("fixture violations %zu; mutations %d/8 exact:%s", clean.size(), good, got.c_str()));
}

}  // namespace

int main() {
    optimal_waist_check();
    clipping_check();
    rayleigh_check();
    thermal_check();
    timing_check();
    ber_order_check();
    monte_carlo_check();
    cooperativity_check();
    scattering_check();
    scatter_rate_check();
    sweep_check();
    entanglement_check();
    relay_check();
    layout_check();
    std::printf("%d failed\n", failures);
    return failures;
}
