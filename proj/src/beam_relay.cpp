#include "trapoptics/beam_relay.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trapoptics {

namespace {

constexpr double kPosTol = 1e-9;

bool has_lens(const std::vector<double>& lenses, double u) {
    return std::any_of(lenses.begin(), lenses.end(), [u](double x) { return std::abs(x - u) < kPosTol; });
}

void check_coefficient(double r) {
    if (!(r > 0.0 && r <= 1.0)) detail::throw_domain("relay coefficient", r);
}

}  // namespace

RelayElement::RelayElement(RelayElementKind kind_, double r_red_, double r_blue_, Length focal_length_)
    : kind(kind_), r_red(r_red_), r_blue(r_blue_), focal_length(focal_length_) {
    check_coefficient(r_red);
    check_coefficient(r_blue);
}

RelayElement RelayElement::uniform(RelayElementKind kind, double r, Length focal_length) {
    return RelayElement(kind, r, r, focal_length);
}

std::vector<RelayElement> RelayChain::walk_order() const {
    if (elements_right.size() < elements_left.size() || elements_right.size() > elements_left.size() + 1) {
        throw std::invalid_argument("relay chain: right side must have as many elements as the left, or one more");
    }
    std::vector<RelayElement> out;
    out.reserve(elements_left.size() + elements_right.size());
    for (std::size_t i = 0; i < elements_right.size(); ++i) {
        out.push_back(elements_right[i]);
        if (i < elements_left.size()) out.push_back(elements_left[i]);
    }
    return out;
}

std::vector<double> prism_zone_positions(Length L, int n_lenses_per_prism, double offset_fraction) {
    if (L.value() <= 0.0) detail::throw_domain("chip size", L.value());
    if (n_lenses_per_prism < 2 || n_lenses_per_prism % 2 != 0) {
        throw std::invalid_argument("prism relay needs an even number (>= 2) of lenses per prism");
    }
    if (!(offset_fraction > 0.0 && offset_fraction < 1.0)) {
        throw std::invalid_argument("prism offset must lie in (0, 1)");
    }
    const int n = n_lenses_per_prism;
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
        a[i] = static_cast<double>(i + 1) / (n + 1);
        b[i] = a[i] + offset_fraction;
    }
    const double ca = 0.5 * (a.front() + a.back());
    const double cb = 0.5 * (b.front() + b.back());

    // Entry through the first lens of A that has no partner in B.
    auto start = std::find_if(a.begin(), a.end(), [&](double u) { return !has_lens(b, u); });
    if (start == a.end()) throw std::invalid_argument("prism offset leaves no entry lens");

    std::vector<double> zones{*start};
    bool toward_a = true;
    double u = *start;
    while (zones.size() <= static_cast<std::size_t>(2 * n + 1)) {
        const auto& lenses = toward_a ? a : b;
        if (!has_lens(lenses, u)) break;
        u = 2.0 * (toward_a ? ca : cb) - u;
        if (std::any_of(zones.begin(), zones.end(), [u](double z) { return std::abs(z - u) < kPosTol; })) {
            throw std::invalid_argument("prism relay closes on itself");
        }
        zones.push_back(u);
        toward_a = !toward_a;
    }
    return zones;
}

bool imaging_condition_ok(Length f, Length d_zone_lens, Length d_lens_mirror, double tol) {
    const double fv = f.value();
    return std::abs(d_zone_lens.value() - fv) <= tol * fv && std::abs(d_lens_mirror.value() - fv) <= tol * fv;
}

std::vector<ZoneReport> propagate_fields(const RelayChain& chain) {
    const auto walk = chain.walk_order();
    const std::size_t nz = walk.size() + 1;
    if (!chain.zone_positions.empty() && chain.zone_positions.size() != nz) {
        throw std::invalid_argument("relay chain: zone_positions size does not match element count");
    }

    std::vector<ZoneReport> out(nz);
    double red = chain.E_r;
    for (std::size_t k = 0; k < nz; ++k) {
        out[k].zone_index = k;
        out[k].position = chain.zone_positions.empty() ? (k + 0.5) / static_cast<double>(nz) : chain.zone_positions[k];
        out[k].E_r_local = red;
        if (k < walk.size()) red *= walk[k].r_red;
    }
    double blue = chain.E_b;
    for (std::size_t k = nz; k-- > 0;) {
        out[k].E_b_local = blue;
        if (k > 0) blue *= walk[k - 1].r_blue;
    }

    double pmax = 0.0;
    for (auto& z : out) {
        z.product = z.E_r_local * z.E_b_local;
        pmax = std::max(pmax, z.product);
    }
    for (auto& z : out) z.product_deviation = pmax > 0.0 ? 1.0 - z.product / pmax : 0.0;
    return out;
}

UniformityResult product_uniformity_check(const std::vector<ZoneReport>& reports, double tol) {
    if (reports.empty()) throw std::invalid_argument("uniformity check needs at least one zone");
    UniformityResult r{true, 0, 0.0};
    for (const auto& z : reports) {
        if (z.product_deviation > r.worst_deviation) {
            r.worst_deviation = z.product_deviation;
            r.worst_zone = z.zone_index;
        }
    }
    r.pass = r.worst_deviation <= tol;
    return r;
}

double field_spread(const std::vector<ZoneReport>& reports) {
    if (reports.empty()) return 0.0;
    auto spread = [&](auto member) {
        double lo = reports.front().*member, hi = lo;
        for (const auto& z : reports) {
            lo = std::min(lo, z.*member);
            hi = std::max(hi, z.*member);
        }
        return hi > 0.0 ? 1.0 - lo / hi : 0.0;
    };
    return std::max(spread(&ZoneReport::E_r_local), spread(&ZoneReport::E_b_local));
}

RelayChain prism_chain(Length L, int n_lenses_per_prism, double offset_fraction, double r_red, double r_blue,
                       double E_r, double E_b) {
    RelayChain chain;
    chain.chip_width_L = L;
    chain.zone_positions = prism_zone_positions(L, n_lenses_per_prism, offset_fraction);
    chain.E_r = E_r;
    chain.E_b = E_b;
    const Length f(L.value() / 2.0);
    const std::size_t folds = chain.zone_positions.size() - 1;
    for (std::size_t i = 0; i < folds; ++i) {
        RelayElement e(RelayElementKind::PrismFacet, r_red, r_blue, f);
        (i % 2 == 0 ? chain.elements_right : chain.elements_left).push_back(e);
    }
    return chain;
}

}  // namespace trapoptics
