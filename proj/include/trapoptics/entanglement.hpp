#pragma once

namespace trapoptics {

struct ScaledSuccess {
    double p;          // clamped to 1
    double factor;     // (fcap_new / fcap_base)^2, unclamped
    bool saturated;    // p_base * factor exceeded 1
};

/// Success probability scales with the square of the capture fraction.
ScaledSuccess scaled_success(double p_base, double fcap_base, double fcap_new);
double improvement_factor(double fcap_base, double fcap_new);

double event_rate(double p, double attempt_rate);
/// Mean wait between events, s; +inf when the rate is zero.
double mean_wait(double p, double attempt_rate);
double rate_from_mean_wait(double wait_s);

struct EntanglementBaseline {
    double p_success;
    double event_rate;             // events/s
    double implied_attempt_rate;   // attempts/s

    static EntanglementBaseline from_wait(double p_success, double wait_s);
};

}  // namespace trapoptics
