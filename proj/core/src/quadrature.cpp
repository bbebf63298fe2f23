#include "cardinal/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace cardinal {

namespace {

QuadratureRule make_gauss_legendre(std::size_t n) {
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, std::unique_ptr<QuadratureRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<QuadratureRule>(make_gauss_legendre(n));
    return *slot;
}

QuadratureRule composite_gauss_legendre(const std::vector<double>& breaks, std::size_t n) {
    const QuadratureRule& base = gauss_legendre(n);
    QuadratureRule out;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double lo = breaks[i], hi = breaks[i + 1];
        if (!(hi > lo)) continue;
        const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        for (std::size_t j = 0; j < n; ++j) {
            out.nodes.push_back(mid + half * base.nodes[j]);
            out.weights.push_back(half * base.weights[j]);
        }
    }
    return out;
}

std::vector<double> graded_breaks(double center, double radius, std::size_t panels_per_side,
                                  const std::vector<double>& extra) {
    std::vector<double> b;
    const std::size_t p = std::max<std::size_t>(panels_per_side, 1);
    for (std::size_t k = 0; k <= p; ++k) {
        const double s = static_cast<double>(k) / p;
        b.push_back(center + radius * s * s);
        b.push_back(center - radius * s * s);
    }
    for (double e : extra)
        if (e > center - radius && e < center + radius) b.push_back(e);
    std::sort(b.begin(), b.end());
    const double eps = 1e-12 * std::max(1.0, radius);
    b.erase(std::unique(b.begin(), b.end(), [eps](double x, double y) { return std::abs(x - y) < eps; }), b.end());
    return b;
}

}  // namespace cardinal
