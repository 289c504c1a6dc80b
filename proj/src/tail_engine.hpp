#pragma once

// Tail probabilities of the detector output statistic
//   X = sum_{i=1..n} g_i + N,  n ~ Poisson(mu),  g_i ~ Gamma(1/(F-1), M(F-1)),  N ~ Normal(0, sigma^2)
// (g_i = M exactly when F = 1). Internal to the library.

#include <vector>

#include "trapoptics/detection.hpp"

namespace trapoptics::detail {

class TailEngine {
public:
    TailEngine(const OutputDistribution& d, BerModel model);

    double upper(double theta) const;  // P(X > theta)
    double lower(double theta) const;  // P(X < theta)

private:
    // Sums over n >= 1 of w_n P(nk, u) and w_n Q(nk, u) for the gamma model.
    double sum_p(double u) const;
    double sum_q(double u) const;

    double gaussian_count_upper(double theta) const;
    double gaussian_count_lower(double theta) const;

    OutputDistribution d_;
    BerModel model_;
    double w0_ = 1.0;  // P(n = 0)
    // Gamma model only.
    double k_ = 0.0;   // shape per primary electron
    double s_ = 0.0;   // gain scale
    long n_first_ = 1;
    std::vector<double> w_;  // w_[i] = P(n = n_first_ + i)
    long stride_ = 0;        // chain stride in n, 0 when shapes do not line up
    long shape_step_ = 0;    // integer shape increase per chain step
};

}  // namespace trapoptics::detail
