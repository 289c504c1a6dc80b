#include <doctest.h>

#include <cmath>
#include <random>

#include "trapoptics/constants.hpp"
#include "trapoptics/gaussian_optics.hpp"

using namespace trapoptics;
using namespace trapoptics::literals;

namespace {

constexpr double kPi = constants::pi;

// Edge radius of a beam focused at the chip centre, written out directly.
double edge_radius(double w0, double L, double lam) {
    const double u = (L / 2.0) * lam / (kPi * w0 * w0);
    return w0 * std::sqrt(1.0 + u * u);
}

double golden_section_min(auto f, double a, double b) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    for (int i = 0; i < 200; ++i) {
        if (f(c) < f(d)) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    return 0.5 * (a + b);
}

// Power fraction of a 1-D Gaussian intensity profile exp(-2x^2/W^2) beyond y,
// by composite Simpson on [y, y + 12W] (the remainder is below 1e-120).
double clip_quadrature(double W, double y) {
    const int n = 20000;
    const double a = y, b = y + 12.0 * W, h = (b - a) / n;
    auto f = [&](double x) { return std::exp(-2.0 * x * x / (W * W)); };
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    const double norm = W * std::sqrt(kPi / 2.0);
    return s * h / 3.0 / norm;
}

}  // namespace

TEST_CASE("beam radius") {
    const GaussianBeam beam(313.0_nm, 22.3_um, Position(0.0));
    CHECK(beam_radius(beam, Position(5e-3)).value() * 1e6 == doctest::Approx(31.6).epsilon(0.1 / 31.6));
    CHECK(beam_radius(beam, Position(0.0)).value() == beam.w0().value());
    const double zr = beam.rayleigh_length().value();
    CHECK(beam_radius(beam, Position(zr)).value() == doctest::Approx(beam.w0().value() * std::sqrt(2.0)));
    CHECK(beam_radius(beam, Position(-zr)).value() == doctest::Approx(beam.w0().value() * std::sqrt(2.0)));
}

TEST_CASE("beam radius is non-decreasing in |z - z0|") {
    const GaussianBeam beam(313.0_nm, 5.0_um, Position(1e-3));
    double prev = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double dz = i * 1e-5;
        const double w1 = beam_radius(beam, Position(1e-3 + dz)).value();
        const double w2 = beam_radius(beam, Position(1e-3 - dz)).value();
        CHECK(w1 >= prev);
        CHECK(w1 == doctest::Approx(w2));
        prev = w1;
    }
}

TEST_CASE("rayleigh length for the cavity mode") {
    CHECK(rayleigh_length(1.5_um, 313.0_nm).value() * 1e6 == doctest::Approx(22.6).epsilon(0.1 / 22.6));
    const GaussianBeam beam(313.0_nm, 1.5_um);
    CHECK(beam.rayleigh_length().value() == rayleigh_length(1.5_um, 313.0_nm).value());
    CHECK_THROWS_AS(GaussianBeam(Length(0.0), 1.0_um), DomainError);
    CHECK_THROWS_AS(GaussianBeam(313.0_nm, Length(0.0)), DomainError);
}

TEST_CASE("optimal waist") {
    const double w = optimal_waist(10.0_mm, 313.0_nm).value();
    CHECK(w * 1e6 == doctest::Approx(22.3).epsilon(0.1 / 22.3));
    CHECK(optimal_waist(40.0_mm, 313.0_nm).value() == doctest::Approx(2.0 * w).epsilon(1e-15));
    CHECK_THROWS_AS(optimal_waist(Length(0.0), 313.0_nm), DomainError);

    const double oracle = golden_section_min([](double w0) { return edge_radius(w0, 10e-3, 313e-9); }, 1e-6, 1e-4);
    CHECK(w == doctest::Approx(oracle).epsilon(1e-3));
    // At the optimum the chip edge sits one Rayleigh length from the waist.
    CHECK(edge_radius(w, 10e-3, 313e-9) == doctest::Approx(std::sqrt(2.0) * w));
    CHECK(edge_radius(w, 10e-3, 313e-9) * 1e6 == doctest::Approx(31.6).epsilon(0.1 / 31.6));
}

TEST_CASE("perturbing the optimal waist widens the edge") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> logL(std::log(1e-4), std::log(1e-1));
    std::uniform_real_distribution<double> logLam(std::log(200e-9), std::log(2e-6));
    for (int i = 0; i < 100; ++i) {
        const double L = std::exp(logL(rng)), lam = std::exp(logLam(rng));
        const double w = optimal_waist(Length(L), Length(lam)).value();
        const double best = edge_radius(w, L, lam);
        CHECK(edge_radius(1.1 * w, L, lam) > best);
        CHECK(edge_radius(0.9 * w, L, lam) > best);
    }
}

TEST_CASE("clipping at the worked chip size") {
    const ChipGeometry chip(10.0_mm, 50.0_um);
    const double w0 = optimal_waist(chip.L, 313.0_nm).value();
    const GaussianBeam beam(313.0_nm, Length(w0), Position(5e-3));
    const double clip = clipping_fraction(beam, chip);
    CHECK(clip < 8e-4);
    CHECK(clip == doctest::Approx(7.7e-4).epsilon(0.01));
    const double W = beam_radius(beam, Position(0.0)).value();
    CHECK(std::abs(clip - clip_quadrature(W, 50e-6)) <= 1e-6);
    CHECK(clipping_at_optimal_waist(chip, 313.0_nm) == doctest::Approx(clip).epsilon(1e-14));
}

TEST_CASE("clipping tends to one half as the ion approaches the surface") {
    // ChipGeometry needs y_ion > 0, so the y_ion = 0 limit is approached.
    const ChipGeometry chip(10.0_mm, Length(1e-15));
    CHECK(clipping_at_optimal_waist(chip, 313.0_nm) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK_THROWS_AS(ChipGeometry(10.0_mm, Length(0.0)), DomainError);
}

TEST_CASE("erfc clipping matches quadrature on random pairs") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> W(5e-6, 100e-6), ratio(0.05, 3.0);
    for (int i = 0; i < 100; ++i) {
        const double w = W(rng), y = ratio(rng) * w;
        // Beam with its waist at the chip edge so that W(edge) = w exactly.
        const GaussianBeam beam(313.0_nm, Length(w), Position(0.0));
        const ChipGeometry chip(Length(1e-9), Length(y));
        const double c = clipping_fraction(beam, chip);
        const double edge = beam_radius(beam, Position(1e-9)).value();
        CHECK(std::abs(c - clip_quadrature(edge, y)) <= 1e-6);
        CHECK(c >= 0.0);
        CHECK(c <= 0.5);
    }
}

TEST_CASE("clipping is monotone in ion height and beam radius") {
    const GaussianBeam beam(313.0_nm, 20.0_um, Position(5e-3));
    double prev = 1.0;
    for (int i = 1; i <= 50; ++i) {
        const double c = clipping_fraction(beam, ChipGeometry(10.0_mm, Length(i * 2e-6)));
        CHECK(c < prev);
        prev = c;
    }
    prev = 0.0;
    for (int i = 1; i <= 50; ++i) {
        const GaussianBeam b(313.0_nm, Length(4e-6 + i * 1e-6), Position(0.0));
        const double c = clipping_fraction(b, ChipGeometry(Length(1e-12), 20.0_um));
        CHECK(c > prev);
        prev = c;
    }
}

TEST_CASE("chip size feasibility") {
    CHECK(chip_size_feasible(ChipGeometry(10.0_mm, 50.0_um), 313.0_nm, 1e-3));
    CHECK(chip_size_feasible(ChipGeometry(Length(1e-7), 50.0_um), 313.0_nm, 1e-3));
    CHECK_THROWS_AS(chip_size_feasible(ChipGeometry(10.0_mm, 50.0_um), 313.0_nm, 0.6), DomainError);

    // Bisection on L for the feasibility flip.
    double lo = 1e-3, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = std::sqrt(lo * hi);
        (chip_size_feasible(ChipGeometry(Length(mid), 50.0_um), 313.0_nm, 1e-3) ? lo : hi) = mid;
    }
    const double L_star = max_feasible_chip_size(50.0_um, 313.0_nm, 1e-3).value();
    CHECK(L_star == doctest::Approx(lo).epsilon(1e-9));
    CHECK(L_star > 0.01);
    CHECK(L_star < 0.02);
    CHECK(clipping_at_optimal_waist(ChipGeometry(Length(L_star), 50.0_um), 313.0_nm) ==
          doctest::Approx(1e-3).epsilon(1e-9));
}

TEST_CASE("lensed fibre F-number") {
    const auto r = fiber_f_number(LensedFiber(220.0_um, 200.0_um, 1.48, 0.22));
    CHECK(r.f_number == doctest::Approx(1.0).epsilon(0.15));
    CHECK(r.paraxial_valid);

    // Hand evaluation: NA_l = 200*0.48/(2*230) = 0.208696, F/# = 1/(2*(0.208696+0.22)).
    const auto s = fiber_f_number(LensedFiber(230.0_um, 200.0_um, 1.48, 0.22));
    CHECK(s.na_lens == doctest::Approx(0.2086956521739).epsilon(1e-12));
    CHECK(s.f_number == doctest::Approx(1.0 / (2.0 * (0.2086956521739 + 0.22))).epsilon(1e-12));
    CHECK(s.focal_length.value() == doctest::Approx(230e-6 / 0.48));

    double prev = 0.0;
    for (double R : {1e-3, 1e-2, 1e-1, 1.0, 1e3}) {
        const auto t = fiber_f_number(LensedFiber(Length(R), 200.0_um, 1.48, 0.0));
        CHECK(t.f_number > prev);
        prev = t.f_number;
    }
    CHECK(prev > 1e6);

    const auto fast = fiber_f_number(LensedFiber(50.0_um, 200.0_um, 1.48, 0.22));
    CHECK_FALSE(fast.paraxial_valid);
    CHECK(fast.f_number < 0.5);
    CHECK_THROWS_AS(LensedFiber(220.0_um, 200.0_um, 1.0, 0.22), DomainError);
}
