#pragma once

#include <numbers>

// Physical constants used across the library. Every physical constant lives
// here; other translation units must not spell out numeric constants.
// Values are the exact SI-2019 definitions where available, CODATA 2018
// recommended values otherwise.

namespace trapoptics::constants {

inline constexpr double pi = std::numbers::pi;

/// Speed of light in vacuum, m/s (exact).
inline constexpr double c = 2.99792458e8;

/// Planck constant, J*s (exact).
inline constexpr double h = 6.62607015e-34;

/// Reduced Planck constant, J*s.
inline constexpr double hbar = h / (2.0 * pi);

/// Vacuum permittivity, F/m (CODATA 2018).
inline constexpr double eps0 = 8.8541878128e-12;

/// Boltzmann constant, J/K (exact).
inline constexpr double kB = 1.380649e-23;

/// Elementary charge, C (exact).
inline constexpr double e_charge = 1.602176634e-19;

/// Default readout-circuit temperature, K.
inline constexpr double room_temperature = 300.0;

struct PhysConstants {
    double c = constants::c;
    double h = constants::h;
    double hbar = constants::hbar;
    double eps0 = constants::eps0;
    double kB = constants::kB;
    double e_charge = constants::e_charge;
};

inline constexpr PhysConstants phys{};

}  // namespace trapoptics::constants
