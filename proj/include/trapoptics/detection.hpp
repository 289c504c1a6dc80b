#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "trapoptics/quantities.hpp"

namespace trapoptics {

struct DetectorModel {
    std::string name;
    double eta = 1.0;        // quantum efficiency
    double gain_M = 1.0;
    double enf_F = 1.0;      // excess noise factor <g^2>/<g>^2
    double dark_rate = 0.0;  // counts/s, pre-gain
    Capacitance capacitance_C{1e-12};
    Time pixel_latency{0.0};
    double frame_rate_min = 0.0;  // frames/s, 0 = not specified
    double frame_rate_max = 0.0;
    int pixels = 1;

    /// Throws DomainError when a field is out of range.
    void validate() const;
};

struct MeasurementScenario {
    double flux_bright = 0.0;  // photons/s at the detector, scattering state
    double flux_dark = 0.0;    // photons/s, non-scattering state
    Time T_M{1e-6};
    Temperature temperature{300.0};
};

enum class BerModel {
    /// Poisson count, Gamma-distributed per-count gain, Gaussian thermal noise.
    Exact,
    /// Single Gaussian per state with variance M^2 F mu + thermal.
    Gaussian,
};

struct DetectionResult {
    double snr = 0.0;
    double ber = 0.5;
    double threshold = 0.0;  // output electrons
    double signal_electrons_S = 0.0;
    double noise_electrons_N = 0.0;
    bool degenerate = false;  // bright flux not above dark flux
};

struct SnrTerms {
    double S;
    double thermal2;
    double shot2;
    double background2;
    double N() const;
    double snr() const { return S / N(); }
};

const std::vector<DetectorModel>& detector_presets();
/// Case-insensitive lookup; throws std::invalid_argument for unknown names.
const DetectorModel& detector_preset(std::string_view name);

double thermal_noise_electrons(Temperature T, Capacitance C);
double gain_threshold_for_shot_limit(Temperature T, Capacitance C, double photons_absorbed_P);

SnrTerms snr_terms(const DetectorModel& det, const MeasurementScenario& sc);
double snr(const DetectorModel& det, const MeasurementScenario& sc);

/// Output-electron statistic for one qubit state.
struct OutputDistribution {
    double mu;     // mean primary photoelectrons (signal + dark)
    double M;
    double F;
    double sigma;  // thermal noise, electrons rms

    static OutputDistribution bright(const DetectorModel& det, const MeasurementScenario& sc);
    static OutputDistribution dark(const DetectorModel& det, const MeasurementScenario& sc);

    double mean() const { return M * mu; }
    double variance() const { return M * M * F * mu + sigma * sigma; }

    double upper_tail(double theta, BerModel model = BerModel::Exact) const;  // P(X > theta)
    double lower_tail(double theta, BerModel model = BerModel::Exact) const;  // P(X < theta)

    double sample(std::mt19937_64& rng) const;
};

double ber_at_threshold(const DetectorModel& det, const MeasurementScenario& sc, double theta,
                        BerModel model = BerModel::Exact);

DetectionResult ber_analytic(const DetectorModel& det, const MeasurementScenario& sc,
                             BerModel model = BerModel::Exact);

struct MonteCarloResult {
    double ber;
    double ci_low;
    double ci_high;
    std::uint64_t trials;
    std::uint64_t errors;
};

/// Wilson score interval at 95 %.
std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t trials);

/// Stratified simulation: half the trials per state, equal priors. Each batch
/// of each state draws from its own generator seeded by (seed, state, batch).
MonteCarloResult ber_monte_carlo(const DetectorModel& det, const MeasurementScenario& sc, double threshold,
                                 std::uint64_t trials, std::uint64_t seed, std::uint64_t batch_size = 1u << 16);

struct MinTimeResult {
    bool reachable = false;
    Time T_M{0.0};
    double ber = 0.5;
};

inline constexpr double kMinTimeGridLow = 1e-7;
inline constexpr double kMinTimeGridHigh = 1.0;

MinTimeResult min_integration_time(const DetectorModel& det, double flux_bright, double flux_dark, Temperature T,
                                   double target_ber, BerModel model = BerModel::Exact);

struct ReadoutReport {
    Time added_latency{0.0};
    double required_frame_rate = 0.0;
    double achievable_frame_rate = 0.0;  // +inf when no readout metadata
    bool feasible = true;
};

/// Binned readout: one pixel read per zone.
ReadoutReport readout_budget(const DetectorModel& det, int zones, Time T_M);

}  // namespace trapoptics
