#include "cardinal/bounds.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cardinal/errors.hpp"
#include "cardinal/sampling.hpp"

namespace cardinal {

namespace {
constexpr double pi = std::numbers::pi;
}

void TubeSpec::validate() const {
    std::vector<std::string> v;
    if (delta.empty()) v.push_back("tube delta must be nonempty");
    for (double d : delta)
        if (!(d > 0.0) || !std::isfinite(d)) v.push_back("tube delta entries must be positive");
    if (!(M > 0.0) || !std::isfinite(M)) v.push_back("tube M must be positive and finite");
    if (!(L > 0.0) || !std::isfinite(L)) v.push_back("tube L must be positive and finite");
    if (!v.empty()) throw ConfigError(std::move(v));
}

double BoundIngredients::mu(double xi) const {
    const double u = std::abs(delta * xi);
    // 1 / (pi cosh u) without overflowing cosh
    const double e = std::exp(-u);
    return 2.0 * e / (pi * (1.0 + e * e));
}

double BoundIngredients::C(double xi, int max_terms) const {
    double s = 0.0;
    for (int k = 0;; ++k) {
        if (max_terms > 0 && k >= max_terms) break;
        const double term = mu((2 * k + 1) * a + xi);
        s += (k % 2 == 0) ? term : -term;
        if (max_terms == 0 && term < 1e-16) break;
        if (k > 100000) break;
    }
    return s;
}

int BoundIngredients::terms_used(double xi) const {
    for (int k = 0; k <= 100000; ++k)
        if (mu((2 * k + 1) * a + xi) < 1e-16) return k + 1;
    return 100001;
}

BoundIngredients bound_ingredients(double a_k, double delta_k) {
    if (!(a_k > 0.0) || !(delta_k > 0.0)) throw ConfigError("bound ingredients need a > 0 and delta > 0");
    BoundIngredients b;
    b.a = a_k;
    b.delta = delta_k;
    b.S = 2.0 * delta_k * a_k * (1.0 / (2.0 * delta_k) + b.mu(2.0 * a_k) + b.mu(a_k));
    return b;
}

double vartheta_eval(double a_k, double delta_k, double x) {
    const BoundIngredients b = bound_ingredients(a_k, delta_k);
    auto f = [&](double xi) { return (b.mu(xi) - b.C(a_k - xi) - b.C(a_k + xi)) * std::cos(xi * x); };
    // fixed-order panels, a few per oscillation of cos(xi x); adaptive
    // refinement stalls where vartheta itself is ~0 and the tolerance is relative
    const int pieces = std::max(4, static_cast<int>(std::ceil(a_k * std::abs(x) / pi)) + 4);
    const double h = a_k / pieces;
    double v = 0.0, err = 0.0;
    for (int i = 0; i < pieces; ++i) {
        double e = 0.0;
        v += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, i * h, (i + 1) * h, 0, 0.0, &e);
        err += e;
    }
    return 2.0 * delta_k * v;
}

double kernel_k1(double delta_k, double x) {
    const double u = std::abs(pi * x / (2.0 * delta_k));
    const double e = std::exp(-u);
    return (1.0 / (2.0 * delta_k)) * 2.0 * e / (1.0 + e * e);
}

BoundMode parse_bound_mode(const std::string& name) {
    if (name == "best_sup" || name == "sup") return BoundMode::best_sup;
    if (name == "best_l1" || name == "l1") return BoundMode::best_l1;
    if (name == "sampling_sup" || name == "sampling") return BoundMode::sampling_sup;
    if (name == "sampling_l1") return BoundMode::sampling_l1;
    throw ConfigError("unknown bound mode '" + name + "'");
}

std::string bound_mode_name(BoundMode mode) {
    switch (mode) {
        case BoundMode::best_sup: return "best_sup";
        case BoundMode::best_l1: return "best_l1";
        case BoundMode::sampling_sup: return "sampling_sup";
        case BoundMode::sampling_l1: return "sampling_l1";
    }
    return "";
}

BoundBreakdown approximation_bound(BoundMode mode, const TubeSpec& tube, const RealVec& a) {
    tube.validate();
    const std::size_t n = tube.dimension();
    if (a.size() != n) throw ConfigError("band and tube dimensions differ");
    BoundBreakdown out;
    out.mode = mode;
    const double nn = static_cast<double>(n);
    const bool l1 = mode == BoundMode::best_l1 || mode == BoundMode::sampling_l1;
    const bool chain = mode == BoundMode::sampling_sup || mode == BoundMode::sampling_l1;
    out.prefactor = 2.0 * (l1 ? tube.L : tube.M) * nn;
    if (chain) out.prefactor *= 1.0 + 2.0 * std::pow(kOperatorNormConstant, nn);
    out.product = 1.0;
    double min_ad = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const BoundIngredients b = bound_ingredients(a[k], tube.delta[k]);
        out.s_factors.push_back(b.S);
        out.product *= b.S / (2.0 * tube.delta[k]);
        min_ad = std::min(min_ad, a[k] * tube.delta[k]);
    }
    out.exponential = std::exp(-min_ad);
    out.total = out.prefactor * out.product * out.exponential;
    return out;
}

BandChoice choose_band(double target_eps, const TubeSpec& tube, BoundMode mode, const BandSearch& search) {
    if (!(target_eps > 0.0)) throw ConfigError("target accuracy must be positive");
    tube.validate();
    const std::size_t n = tube.dimension();
    auto band = [&](double c) {
        RealVec a(n);
        for (std::size_t k = 0; k < n; ++k) a[k] = c / tube.delta[k];
        return a;
    };
    auto total = [&](double c) { return approximation_bound(mode, tube, band(c)).total; };
    auto make = [&](double c) { return BandChoice{band(c), c, approximation_bound(mode, tube, band(c))}; };

    if (total(search.c_min) <= target_eps) return make(search.c_min);
    double lo = std::max(search.c_min, static_cast<double>(n));
    if (total(lo) <= target_eps) return make(lo);
    double hi = lo;
    while (total(hi) > target_eps) {
        if (hi >= search.c_max) {
            std::ostringstream msg;
            msg << "target " << target_eps << " unreachable below the band cap; best bound " << total(search.c_max);
            throw CapacityError(msg.str(), total(search.c_max));
        }
        lo = hi;
        hi = std::min(2.0 * hi, search.c_max);
    }
    while ((hi - lo) > search.rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (total(mid) <= target_eps) hi = mid;
        else lo = mid;
    }
    return make(hi);
}

}  // namespace cardinal
