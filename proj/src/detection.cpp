#include "trapoptics/detection.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>

#include "tail_engine.hpp"
#include "trapoptics/constants.hpp"

namespace trapoptics {

namespace {

void check_scenario(const MeasurementScenario& sc) {
    if (!(sc.T_M.value() > 0.0)) detail::throw_domain("integration time", sc.T_M.value());
    if (!(sc.temperature.value() > 0.0)) detail::throw_domain("temperature", sc.temperature.value());
    if (!(sc.flux_bright >= 0.0)) detail::throw_domain("bright flux", sc.flux_bright);
    if (!(sc.flux_dark >= 0.0)) detail::throw_domain("dark flux", sc.flux_dark);
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

void DetectorModel::validate() const {
    if (!(eta > 0.0 && eta <= 1.0)) detail::throw_domain("quantum efficiency", eta);
    if (!(gain_M >= 1.0)) detail::throw_domain("gain", gain_M);
    if (!(enf_F >= 1.0)) detail::throw_domain("excess noise factor", enf_F);
    if (!(dark_rate >= 0.0)) detail::throw_domain("dark rate", dark_rate);
    if (!(capacitance_C.value() > 0.0)) detail::throw_domain("capacitance", capacitance_C.value());
    if (!(frame_rate_min >= 0.0 && frame_rate_max >= 0.0)) detail::throw_domain("frame rate", frame_rate_max);
    if (pixels < 1) detail::throw_domain("pixel count", pixels);
}

const std::vector<DetectorModel>& detector_presets() {
    static const std::vector<DetectorModel> presets = [] {
        std::vector<DetectorModel> v(5);
        v[0].name = "UVPC";
        v[0].eta = 0.65, v[0].gain_M = 3e4, v[0].enf_F = 1.0, v[0].dark_rate = 20000;
        v[0].capacitance_C = Capacitance(1e-12);

        v[1].name = "PMT";
        v[1].eta = 0.10, v[1].gain_M = 1e6, v[1].enf_F = 1.5, v[1].dark_rate = 500;
        v[1].capacitance_C = Capacitance(1e-12);

        v[2].name = "CCD";
        v[2].eta = 0.65, v[2].gain_M = 1, v[2].enf_F = 1.0, v[2].dark_rate = 100;
        v[2].capacitance_C = Capacitance(0.1e-12);
        v[2].frame_rate_min = 60, v[2].frame_rate_max = 15000;

        v[3].name = "EMCCD";
        v[3].eta = 0.65, v[3].gain_M = 100, v[3].enf_F = 2.0, v[3].dark_rate = 100;
        v[3].capacitance_C = Capacitance(0.1e-12);
        v[3].pixel_latency = Time(50e-6);

        v[4].name = "APD";
        v[4].eta = 0.50, v[4].gain_M = 100, v[4].enf_F = 10.0, v[4].dark_rate = 100;
        v[4].capacitance_C = Capacitance(1e-12);
        return v;
    }();
    return presets;
}

const DetectorModel& detector_preset(std::string_view name) {
    const auto key = lower(name);
    for (const auto& d : detector_presets()) {
        if (lower(d.name) == key) return d;
    }
    throw std::invalid_argument("unknown detector preset: " + std::string(name));
}

double thermal_noise_electrons(Temperature T, Capacitance C) {
    if (!(T.value() > 0.0)) detail::throw_domain("temperature", T.value());
    if (!(C.value() > 0.0)) detail::throw_domain("capacitance", C.value());
    return std::sqrt(4.0 * constants::kB * T.value() * C.value()) / constants::e_charge;
}

double gain_threshold_for_shot_limit(Temperature T, Capacitance C, double photons_absorbed_P) {
    if (!(photons_absorbed_P > 0.0)) detail::throw_domain("absorbed photons", photons_absorbed_P);
    return thermal_noise_electrons(T, C) / photons_absorbed_P;
}

double SnrTerms::N() const { return std::sqrt(thermal2 + shot2 + background2); }

SnrTerms snr_terms(const DetectorModel& det, const MeasurementScenario& sc) {
    det.validate();
    check_scenario(sc);
    const double T = sc.T_M.value();
    const double M = det.gain_M;
    const double th = thermal_noise_electrons(sc.temperature, det.capacitance_C);
    const double primary = det.eta * sc.flux_bright * T;
    SnrTerms t{};
    t.S = primary * M;
    t.thermal2 = th * th;
    t.shot2 = 2.0 * primary * M * M * det.enf_F;
    const double bg = det.dark_rate * T * M;
    t.background2 = bg * bg;
    return t;
}

double snr(const DetectorModel& det, const MeasurementScenario& sc) { return snr_terms(det, sc).snr(); }

OutputDistribution OutputDistribution::bright(const DetectorModel& det, const MeasurementScenario& sc) {
    return {(det.eta * sc.flux_bright + det.dark_rate) * sc.T_M.value(), det.gain_M, det.enf_F,
            thermal_noise_electrons(sc.temperature, det.capacitance_C)};
}

OutputDistribution OutputDistribution::dark(const DetectorModel& det, const MeasurementScenario& sc) {
    return {(det.eta * sc.flux_dark + det.dark_rate) * sc.T_M.value(), det.gain_M, det.enf_F,
            thermal_noise_electrons(sc.temperature, det.capacitance_C)};
}

double OutputDistribution::upper_tail(double theta, BerModel model) const {
    return detail::TailEngine(*this, model).upper(theta);
}

double OutputDistribution::lower_tail(double theta, BerModel model) const {
    return detail::TailEngine(*this, model).lower(theta);
}

namespace {

class Sampler {
public:
    explicit Sampler(const OutputDistribution& d) : d_(d), poisson_(d.mu > 0.0 ? d.mu : 1.0) {}

    double operator()(std::mt19937_64& rng) {
        const long long n = d_.mu > 0.0 ? poisson_(rng) : 0;
        double x;
        if (d_.F > 1.0 && n > 0) {
            std::gamma_distribution<double> g(static_cast<double>(n) / (d_.F - 1.0), d_.M * (d_.F - 1.0));
            x = g(rng);
        } else {
            x = d_.M * static_cast<double>(n);
        }
        if (d_.sigma > 0.0) x += d_.sigma * normal_(rng);
        return x;
    }

private:
    OutputDistribution d_;
    std::poisson_distribution<long long> poisson_;
    std::normal_distribution<double> normal_;
};

}  // namespace

double OutputDistribution::sample(std::mt19937_64& rng) const {
    Sampler s(*this);
    return s(rng);
}

double ber_at_threshold(const DetectorModel& det, const MeasurementScenario& sc, double theta, BerModel model) {
    det.validate();
    check_scenario(sc);
    const auto b = OutputDistribution::bright(det, sc);
    const auto d = OutputDistribution::dark(det, sc);
    return 0.5 * (d.upper_tail(theta, model) + b.lower_tail(theta, model));
}

DetectionResult ber_analytic(const DetectorModel& det, const MeasurementScenario& sc, BerModel model) {
    det.validate();
    check_scenario(sc);
    DetectionResult r;
    if (sc.flux_bright > 0.0) {
        const auto t = snr_terms(det, sc);
        r.snr = t.snr();
        r.signal_electrons_S = t.S;
        r.noise_electrons_N = t.N();
    }
    const auto b = OutputDistribution::bright(det, sc);
    const auto d = OutputDistribution::dark(det, sc);
    if (!(sc.flux_bright > sc.flux_dark)) {
        r.degenerate = true;
        r.ber = 0.5;
        r.threshold = b.mean();
        return r;
    }

    const detail::TailEngine dark_tail(d, model);
    const detail::TailEngine bright_tail(b, model);
    auto ber = [&](double theta) { return 0.5 * (dark_tail.upper(theta) + bright_tail.lower(theta)); };

    const double hi = b.mean();
    std::vector<double> grid;
    if (model == BerModel::Gaussian) {
        for (int i = 0; i <= 1000; ++i) grid.push_back(hi * i / 1000.0);
    } else {
        // Linear coverage plus a log ladder that resolves thresholds near the thermal floor.
        for (int i = 0; i <= 16; ++i) grid.push_back(hi * i / 16.0);
        const double start = std::max(std::min(d.sigma, hi) / 4.0, hi * 1e-6);
        for (int i = 0; i < 16; ++i) grid.push_back(start * std::pow(hi / start, i / 15.0));
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    }

    std::size_t best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = ber(grid[i]);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    const double a = grid[best == 0 ? 0 : best - 1];
    const double c = grid[std::min(best + 1, grid.size() - 1)];
    double theta = grid[best];
    if (c > a) {
        std::uintmax_t iters = 60;
        const auto [x, fx] = boost::math::tools::brent_find_minima(ber, a, c, 24, iters);
        if (fx < best_val) {
            best_val = fx;
            theta = x;
        }
    }
    r.ber = std::min(best_val, 0.5);
    r.threshold = std::max(theta, 0.0);
    return r;
}

std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t trials) {
    if (trials == 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(errors) / n;
    const double denom = 1.0 + z * z / n;
    const double centre = (p + z * z / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
    // The bounds are exactly 0 and 1 at the extremes; the subtraction above is not.
    const double lo = errors == 0 ? 0.0 : std::max(0.0, centre - half);
    const double hi = errors == trials ? 1.0 : std::min(1.0, centre + half);
    return {lo, hi};
}

MonteCarloResult ber_monte_carlo(const DetectorModel& det, const MeasurementScenario& sc, double threshold,
                                 std::uint64_t trials, std::uint64_t seed, std::uint64_t batch_size) {
    det.validate();
    check_scenario(sc);
    if (trials < 1) throw std::invalid_argument("monte carlo needs at least one trial");
    if (batch_size < 1) throw std::invalid_argument("batch size must be positive");

    const std::uint64_t n_dark = trials / 2;
    const std::uint64_t n_bright = trials - n_dark;
    std::uint64_t errors = 0;

    auto run_state = [&](const OutputDistribution& dist, std::uint64_t count, std::uint32_t state, bool is_bright) {
        Sampler sampler(dist);
        for (std::uint64_t start = 0, batch = 0; start < count; start += batch_size, ++batch) {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), state,
                              static_cast<std::uint32_t>(batch), static_cast<std::uint32_t>(batch >> 32)};
            std::mt19937_64 rng(seq);
            const std::uint64_t end = std::min(count, start + batch_size);
            for (std::uint64_t i = start; i < end; ++i) {
                const double x = sampler(rng);
                if (is_bright ? x < threshold : x > threshold) ++errors;
            }
        }
    };
    run_state(OutputDistribution::dark(det, sc), n_dark, 0, false);
    run_state(OutputDistribution::bright(det, sc), n_bright, 1, true);

    MonteCarloResult r{};
    r.trials = trials;
    r.errors = errors;
    r.ber = static_cast<double>(errors) / static_cast<double>(trials);
    std::tie(r.ci_low, r.ci_high) = wilson_interval(errors, trials);
    return r;
}

MinTimeResult min_integration_time(const DetectorModel& det, double flux_bright, double flux_dark, Temperature T,
                                   double target_ber, BerModel model) {
    if (!(target_ber > 0.0 && target_ber < 0.5)) detail::throw_domain("target BER", target_ber);
    auto ber_at = [&](double t) {
        MeasurementScenario sc{flux_bright, flux_dark, Time(t), T};
        return ber_analytic(det, sc, model).ber;
    };

    constexpr int per_decade = 2;
    const int decades = static_cast<int>(std::lround(std::log10(kMinTimeGridHigh / kMinTimeGridLow)));
    double prev = 0.0;
    for (int i = 0; i <= decades * per_decade; ++i) {
        const double t = kMinTimeGridLow * std::pow(10.0, static_cast<double>(i) / per_decade);
        const double b = ber_at(t);
        if (b > target_ber) {
            prev = t;
            continue;
        }
        MinTimeResult r{true, Time(t), b};
        if (i == 0) return r;
        // BER is non-increasing in T_M, so bisect the bracketing grid cell in log time.
        double lo = prev, hi = t;
        while (hi / lo > 1.0 + 1e-3) {
            const double mid = std::sqrt(lo * hi);
            const double bm = ber_at(mid);
            if (bm <= target_ber) {
                hi = mid;
                r.ber = bm;
            } else {
                lo = mid;
            }
        }
        r.T_M = Time(hi);
        return r;
    }
    return MinTimeResult{false, Time(kMinTimeGridHigh), ber_at(kMinTimeGridHigh)};
}

ReadoutReport readout_budget(const DetectorModel& det, int zones, Time T_M) {
    if (zones < 1) detail::throw_domain("zone count", zones);
    if (!(T_M.value() > 0.0)) detail::throw_domain("integration time", T_M.value());
    ReadoutReport r;
    r.added_latency = Time(zones * det.pixel_latency.value());
    r.required_frame_rate = 1.0 / T_M.value();
    const double per_pixel =
        std::max(det.pixel_latency.value(), det.frame_rate_max > 0.0 ? 1.0 / det.frame_rate_max : 0.0);
    r.achievable_frame_rate =
        per_pixel > 0.0 ? 1.0 / (zones * per_pixel) : std::numeric_limits<double>::infinity();
    r.feasible = r.required_frame_rate <= r.achievable_frame_rate;
    return r;
}

}  // namespace trapoptics
