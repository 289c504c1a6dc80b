#include "tail_engine.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "trapoptics/constants.hpp"

namespace trapoptics::detail {

namespace {

using boost::math::gamma_p;
using boost::math::gamma_q;

// Thermal-noise integration window in standard deviations; Phi(-9.5) ~ 1e-21.
constexpr double kZ = 9.5;
// Poisson terms lighter than this are dropped.
constexpr double kWeightFloor = 1e-25;
// Count sums (F = 1) stop once the neglected mass is below either bound.
constexpr double kTailFloor = 1e-22;
constexpr double kTailRel = 1e-12;
constexpr double kQuadTol = 1e-7;
constexpr unsigned kQuadDepth = 15;
// exp() underflows below this; terms are carried in log form until they re-enter range.
constexpr double kLogUnderflow = -700.0;

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * constants::pi);

double normal_sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }
double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double poisson_pmf(double n, double mu) { return std::exp(n * std::log(mu) - mu - std::lgamma(n + 1.0)); }

// P(N >= n)
double poisson_sf_ge(double n, double mu) { return n <= 0.0 ? 1.0 : gamma_p(n, mu); }

double integrate(const auto& f, double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, kQuadDepth, kQuadTol);
}

// Integral of f over [lo, hi] where f behaves like (hi - z)^k near hi. The last
// panel is mapped through z = hi - delta*w^p, which turns the cusp into a polynomial.
double integrate_cusp(const auto& f, double lo, double hi, double k) {
    if (!(hi > lo)) return 0.0;
    const double delta = std::min(2.0, hi - lo);
    const double p = std::max(1.0, std::ceil(1.0 / k - 1e-9));
    const auto g = [&](double w) {
        const double wp = std::pow(w, p - 1.0);
        return f(hi - delta * wp * w) * delta * p * wp;
    };
    return integrate(f, lo, hi - delta) + integrate(g, 0.0, 1.0);
}

// t(c) = u^c e^-u / Gamma(c+1), the increment between neighbouring incomplete gammas.
struct GammaTerm {
    GammaTerm(double c, double u) : lt(c * std::log(u) - u - std::lgamma(c + 1.0)) {
        if (lt > kLogUnderflow) {
            linear = true;
            t = std::exp(lt);
        }
    }
    void scale(double factor) {
        if (linear) {
            t *= factor;
            return;
        }
        lt += std::log(factor);
        if (lt > kLogUnderflow) {
            linear = true;
            t = std::exp(lt);
        }
    }
    double value() const { return linear ? t : 0.0; }

    double lt;
    double t = 0.0;
    bool linear = false;
};

}  // namespace

TailEngine::TailEngine(const OutputDistribution& d, BerModel model) : d_(d), model_(model) {
    if (model_ != BerModel::Exact || d_.mu == 0.0) return;
    w0_ = std::exp(-d_.mu);
    if (d_.F == 1.0) return;

    k_ = 1.0 / (d_.F - 1.0);
    s_ = d_.M * (d_.F - 1.0);
    const double half = 12.0 * std::sqrt(d_.mu) + 12.0;
    long lo = std::max(1L, static_cast<long>(std::floor(d_.mu - half)));
    long hi = static_cast<long>(std::ceil(d_.mu + half));
    while (lo <= hi && poisson_pmf(lo, d_.mu) < kWeightFloor) ++lo;
    while (hi >= lo && poisson_pmf(hi, d_.mu) < kWeightFloor) --hi;
    n_first_ = lo;
    for (long n = lo; n <= hi; ++n) w_.push_back(poisson_pmf(n, d_.mu));

    // Members n and n + m share a recurrence chain when m*k is an integer.
    for (long m = 1; m <= 32; ++m) {
        const double j = m * k_;
        const double r = std::round(j);
        if (r >= 1.0 && std::abs(j - r) <= 1e-9 * r) {
            stride_ = m;
            shape_step_ = static_cast<long>(r);
            break;
        }
    }
}

double TailEngine::sum_p(double u) const {
    if (u <= 0.0 || w_.empty()) return 0.0;
    const long size = static_cast<long>(w_.size());
    double total = 0.0;
    if (stride_ == 0) {
        for (long i = 0; i < size; ++i) total += w_[i] * gamma_p((n_first_ + i) * k_, u);
        return total;
    }
    // P(c-1) = P(c) + t(c-1): stable walking down from the top of each chain.
    for (long r = 0; r < stride_ && r < size; ++r) {
        const long top = r + stride_ * ((size - 1 - r) / stride_);
        double c = (n_first_ + top) * k_;
        double p = gamma_p(c, u);
        GammaTerm t(c, u);
        total += w_[top] * p;
        for (long i = top - stride_; i >= r; i -= stride_) {
            for (long step = 0; step < shape_step_; ++step) {
                t.scale(c / u);
                c -= 1.0;
                p += t.value();
            }
            total += w_[i] * p;
        }
    }
    return total;
}

double TailEngine::sum_q(double u) const {
    if (u <= 0.0 || w_.empty()) {
        double mass = 0.0;
        for (double w : w_) mass += w;
        return mass;
    }
    const long size = static_cast<long>(w_.size());
    double total = 0.0;
    if (stride_ == 0) {
        for (long i = 0; i < size; ++i) total += w_[i] * gamma_q((n_first_ + i) * k_, u);
        return total;
    }
    // Q(c+1) = Q(c) + t(c): stable walking up from the bottom of each chain.
    for (long r = 0; r < stride_ && r < size; ++r) {
        double c = (n_first_ + r) * k_;
        double q = gamma_q(c, u);
        GammaTerm t(c, u);
        total += w_[r] * q;
        for (long i = r + stride_; i < size; i += stride_) {
            for (long step = 0; step < shape_step_; ++step) {
                q += t.value();
                t.scale(u / (c + 1.0));
                c += 1.0;
            }
            total += w_[i] * std::min(q, 1.0);
        }
    }
    return total;
}

namespace {

double count_upper(const OutputDistribution& d, double n, double theta) {
    const double shift = d.M * n;
    if (d.sigma == 0.0) return shift > theta ? 1.0 : 0.0;
    return normal_sf((theta - shift) / d.sigma);
}

double count_lower(const OutputDistribution& d, double n, double theta) {
    const double shift = d.M * n;
    if (d.sigma == 0.0) return shift < theta ? 1.0 : 0.0;
    return normal_sf((shift - theta) / d.sigma);
}

struct Window {
    double lo;
    double hi;
};

Window window(double mu) {
    const double half = 12.0 * std::sqrt(mu) + 12.0;
    return {std::max(0.0, std::floor(mu - half)), std::ceil(mu + half)};
}

}  // namespace

// F = 1: each count is a Gaussian shifted by M*n. The conditional upper tail
// rises with n, so once it saturates the rest is the Poisson survival mass.
double TailEngine::gaussian_count_upper(double theta) const {
    const auto [lo, hi] = window(d_.mu);
    double sum = 0.0;
    for (double n = lo; n <= hi; n += 1.0) {
        const double rest = poisson_sf_ge(n, d_.mu);
        if (rest < kTailFloor || rest <= kTailRel * sum) break;
        const double u = count_upper(d_, n, theta);
        if (u >= 1.0 - 1e-15) {
            sum += rest;
            break;
        }
        sum += poisson_pmf(n, d_.mu) * u;
    }
    return std::min(sum, 1.0);
}

// The conditional lower tail falls with n, which bounds the remainder.
double TailEngine::gaussian_count_lower(double theta) const {
    const auto [lo, hi] = window(d_.mu);
    double sum = 0.0;
    for (double n = lo; n <= hi; n += 1.0) {
        const double l = count_lower(d_, n, theta);
        sum += poisson_pmf(n, d_.mu) * l;
        const double rest = l * poisson_sf_ge(n + 1.0, d_.mu);
        if (rest < kTailFloor || rest <= kTailRel * sum) break;
    }
    return std::min(sum, 1.0);
}

double TailEngine::upper(double theta) const {
    if (model_ == BerModel::Gaussian) {
        const double v = d_.variance();
        if (v == 0.0) return d_.mean() > theta ? 1.0 : 0.0;
        return normal_sf((theta - d_.mean()) / std::sqrt(v));
    }
    if (d_.mu == 0.0) return count_upper(d_, 0.0, theta);
    if (d_.F == 1.0) return gaussian_count_upper(theta);

    if (d_.sigma == 0.0) return theta < 0.0 ? 1.0 : sum_q(theta / s_);
    const double zt = theta / d_.sigma;
    if (zt < -kZ) return 1.0;
    // Above z = theta/sigma the thermal sample alone clears the threshold.
    const auto f = [&](double z) { return normal_pdf(z) * sum_q((theta - d_.sigma * z) / s_); };
    const double part = zt <= kZ ? integrate_cusp(f, -kZ, zt, k_) : integrate(f, -kZ, kZ);
    return std::min(1.0, normal_sf(zt) + part);
}

double TailEngine::lower(double theta) const {
    if (model_ == BerModel::Gaussian) {
        const double v = d_.variance();
        if (v == 0.0) return d_.mean() < theta ? 1.0 : 0.0;
        return normal_sf((d_.mean() - theta) / std::sqrt(v));
    }
    if (d_.mu == 0.0) return count_lower(d_, 0.0, theta);
    if (d_.F == 1.0) return gaussian_count_lower(theta);

    if (d_.sigma == 0.0) return theta <= 0.0 ? 0.0 : std::min(1.0, w0_ + sum_p(theta / s_));
    const double zt = theta / d_.sigma;
    if (zt < -kZ) return 0.0;
    const auto f = [&](double z) { return normal_pdf(z) * sum_p((theta - d_.sigma * z) / s_); };
    const double part = zt <= kZ ? integrate_cusp(f, -kZ, zt, k_) : integrate(f, -kZ, kZ);
    return std::min(1.0, w0_ * normal_sf(-zt) + part);
}

}  // namespace trapoptics::detail
