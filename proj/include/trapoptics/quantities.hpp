#pragma once

#include <cmath>
#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>

namespace trapoptics {

/// Thrown for arguments outside an operation's mathematical domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

namespace detail {

[[noreturn]] void throw_domain(std::string_view what, double value);

}  // namespace detail

// Dimension-tagged SI scalar. Tags decide whether negative values are legal;
// NaN is always rejected.
template <class Tag>
class Quantity {
public:
    constexpr Quantity() = default;

    explicit Quantity(double si_value) : value_(si_value) {
        if (std::isnan(si_value) || (Tag::non_negative && si_value < 0.0)) {
            detail::throw_domain(Tag::name, si_value);
        }
    }

    [[nodiscard]] constexpr double value() const { return value_; }

    friend constexpr auto operator<=>(Quantity, Quantity) = default;

    friend Quantity operator+(Quantity a, Quantity b) { return Quantity(a.value_ + b.value_); }
    friend Quantity operator*(Quantity a, double k) { return Quantity(a.value_ * k); }
    friend Quantity operator*(double k, Quantity a) { return Quantity(a.value_ * k); }
    friend Quantity operator/(Quantity a, double k) { return Quantity(a.value_ / k); }
    friend double operator/(Quantity a, Quantity b) { return a.value_ / b.value_; }

private:
    double value_ = 0.0;
};

struct LengthTag {
    static constexpr bool non_negative = true;
    static constexpr std::string_view name = "length";
};
// Signed axial coordinate (e.g. z - z0 along a beam).
struct PositionTag {
    static constexpr bool non_negative = false;
    static constexpr std::string_view name = "position";
};
struct AngularFrequencyTag {
    static constexpr bool non_negative = true;
    static constexpr std::string_view name = "angular frequency";
};
struct FrequencyTag {
    static constexpr bool non_negative = true;
    static constexpr std::string_view name = "frequency";
};
struct TimeTag {
    static constexpr bool non_negative = true;
    static constexpr std::string_view name = "time";
};
struct TemperatureTag {
    static constexpr bool non_negative = true;
    static constexpr std::string_view name = "temperature";
};
struct CapacitanceTag {
    static constexpr bool non_negative = true;
    static constexpr std::string_view name = "capacitance";
};

using Length = Quantity<LengthTag>;
using Position = Quantity<PositionTag>;
using AngularFrequency = Quantity<AngularFrequencyTag>;  // rad/s
using Frequency = Quantity<FrequencyTag>;                // Hz
using Time = Quantity<TimeTag>;                          // s
using Temperature = Quantity<TemperatureTag>;            // K
using Capacitance = Quantity<CapacitanceTag>;            // F

/// Laser intensity classes used in the beam-requirement table.
enum class IntensityClass { Mild, Modest, Extreme };

std::string_view to_string(IntensityClass c);

/// Nominal power range for an intensity class, in watts. Extreme has no upper bound (+inf).
struct PowerRange {
    double low_w;
    double high_w;
};
PowerRange nominal_power(IntensityClass c);

AngularFrequency angular_frequency_from_wavelength(Length lambda);
Length wavelength_from_angular_frequency(AngularFrequency omega);

namespace literals {

inline Length operator""_m(long double v) { return Length(static_cast<double>(v)); }
inline Length operator""_mm(long double v) { return Length(static_cast<double>(v) * 1e-3); }
inline Length operator""_um(long double v) { return Length(static_cast<double>(v) * 1e-6); }
inline Length operator""_nm(long double v) { return Length(static_cast<double>(v) * 1e-9); }
inline Time operator""_s(long double v) { return Time(static_cast<double>(v)); }
inline Time operator""_us(long double v) { return Time(static_cast<double>(v) * 1e-6); }
inline Capacitance operator""_pF(long double v) { return Capacitance(static_cast<double>(v) * 1e-12); }
inline Temperature operator""_K(long double v) { return Temperature(static_cast<double>(v)); }

}  // namespace literals

}  // namespace trapoptics
