#include "trapoptics/entanglement.hpp"

#include <algorithm>
#include <limits>

#include "trapoptics/quantities.hpp"

namespace trapoptics {

namespace {

void check_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) detail::throw_domain("probability", p);
}

}  // namespace

double improvement_factor(double fcap_base, double fcap_new) {
    if (!(fcap_base > 0.0 && fcap_base <= 1.0)) detail::throw_domain("baseline capture fraction", fcap_base);
    if (!(fcap_new >= 0.0 && fcap_new <= 1.0)) detail::throw_domain("capture fraction", fcap_new);
    // Ratio first: (0.8/0.004)^2 is exactly 4e4 this way, not when squaring each side.
    const double ratio = fcap_new / fcap_base;
    return ratio * ratio;
}

ScaledSuccess scaled_success(double p_base, double fcap_base, double fcap_new) {
    check_probability(p_base);
    const double factor = improvement_factor(fcap_base, fcap_new);
    const double p = p_base * factor;
    return {std::min(p, 1.0), factor, p > 1.0};
}

double event_rate(double p, double attempt_rate) {
    check_probability(p);
    if (!(attempt_rate >= 0.0)) detail::throw_domain("attempt rate", attempt_rate);
    return p * attempt_rate;
}

double mean_wait(double p, double attempt_rate) {
    const double r = event_rate(p, attempt_rate);
    return r > 0.0 ? 1.0 / r : std::numeric_limits<double>::infinity();
}

double rate_from_mean_wait(double wait_s) {
    if (!(wait_s > 0.0)) detail::throw_domain("mean wait", wait_s);
    return 1.0 / wait_s;
}

EntanglementBaseline EntanglementBaseline::from_wait(double p_success, double wait_s) {
    if (!(p_success > 0.0 && p_success <= 1.0)) detail::throw_domain("success probability", p_success);
    const double rate = rate_from_mean_wait(wait_s);
    return {p_success, rate, rate / p_success};
}

}  // namespace trapoptics
