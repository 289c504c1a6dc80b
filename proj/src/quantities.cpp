#include "trapoptics/quantities.hpp"

#include <limits>
#include <sstream>

#include "trapoptics/constants.hpp"

namespace trapoptics {

namespace detail {

void throw_domain(std::string_view what, double value) {
    std::ostringstream os;
    os << "invalid " << what << ": " << value;
    throw DomainError(os.str());
}

}  // namespace detail

std::string_view to_string(IntensityClass c) {
    switch (c) {
        case IntensityClass::Mild: return "mild";
        case IntensityClass::Modest: return "modest";
        case IntensityClass::Extreme: return "extreme";
    }
    return "?";
}

PowerRange nominal_power(IntensityClass c) {
    switch (c) {
        case IntensityClass::Mild: return {1e-6, 1e-5};    // few uW
        case IntensityClass::Modest: return {1e-3, 1e-2};  // few mW
        case IntensityClass::Extreme: return {0.1, std::numeric_limits<double>::infinity()};
    }
    return {0.0, 0.0};
}

AngularFrequency angular_frequency_from_wavelength(Length lambda) {
    if (lambda.value() <= 0.0) detail::throw_domain("wavelength", lambda.value());
    return AngularFrequency(2.0 * constants::pi * constants::c / lambda.value());
}

Length wavelength_from_angular_frequency(AngularFrequency omega) {
    if (omega.value() <= 0.0) detail::throw_domain("angular frequency", omega.value());
    return Length(2.0 * constants::pi * constants::c / omega.value());
}

}  // namespace trapoptics
