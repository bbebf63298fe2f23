#include "cardinal/windows.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "cardinal/errors.hpp"
#include "cardinal/quadrature.hpp"

namespace cardinal {

namespace {

constexpr double pi = std::numbers::pi;

double bump(double t) {
    if (std::abs(t) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - t * t));
}

template <class F>
double gl_integrate(F&& f, double lo, double hi, std::size_t n) {
    const QuadratureRule& rule = gauss_legendre(n);
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += rule.weights[j] * f(mid + half * rule.nodes[j]);
    return s * half;
}

}  // namespace

// Cumulative integral G(s) of the bump on a uniform knot grid.
struct BumpCache {
    static constexpr int knots = 256;
    double step = 2.0 / knots;
    std::vector<double> cumulative;

    BumpCache() : cumulative(knots + 1, 0.0) {
        for (int j = 0; j < knots; ++j) {
            const double lo = -1.0 + j * step;
            cumulative[j + 1] = cumulative[j] + gl_integrate(bump, lo, lo + step, 20);
        }
    }

    double G(double s) const {
        if (s <= -1.0) return 0.0;
        if (s >= 1.0) return cumulative.back();
        const int j = std::min(knots - 1, static_cast<int>((s + 1.0) / step));
        const double lo = -1.0 + j * step;
        return cumulative[j] + gl_integrate(bump, lo, s, 20);
    }

    double total() const { return cumulative.back(); }

    static std::shared_ptr<const BumpCache> instance() {
        static std::once_flag once;
        static std::shared_ptr<const BumpCache> cache;
        std::call_once(once, [] { cache = std::make_shared<const BumpCache>(); });
        return cache;
    }
};

TrapezoidWindow::TrapezoidWindow(double a_) : a(a_) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("window band a must be positive");
}

double TrapezoidWindow::value(double x) const {
    const double ax = std::abs(x);
    if (ax <= 0.5 * a) return 1.0;
    if (ax >= a) return 0.0;
    return 2.0 - 2.0 * ax / a;
}

double TrapezoidWindow::fourier(double y) const {
    const double t = a * y;
    if (std::abs(y) < 1e-4 / a) {
        const double t2 = t * t;
        return a * (1.5 - (5.0 / 32.0) * t2 + (7.0 / 1280.0) * t2 * t2);
    }
    // (4 / (a y^2)) (cos(ay/2) - cos(ay)) written as a product of sines
    return 8.0 * a / (t * t) * std::sin(0.75 * t) * std::sin(0.25 * t);
}

SmoothWindow::SmoothWindow(double a_) : a(a_), cache_(BumpCache::instance()) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("window band a must be positive");
}

double SmoothWindow::omega() const { return 0.25 * cache_->total(); }

double SmoothWindow::value(double x) const {
    const double u = x / a;
    if (std::abs(u) >= 7.0 / 16.0) return 0.0;
    const double v = (cache_->G(4.0 * u + 0.75) - cache_->G(4.0 * u - 0.75)) / cache_->total();
    return std::clamp(v, 0.0, 1.0);
}

// Integrating by parts, phi' is a difference of two shifted bumps, so
// F phi(eta) = 2 sin(3 eta / 16) / (eta G(1)) * g^(eta / 4) with g^ the cosine
// transform of the bump.
double SmoothWindow::fourier(double y) const {
    const double eta = a * y;
    const double w = 0.25 * eta;
    auto integrand = [&](double t) { return bump(t) * std::cos(w * t); };
    const int pieces = std::max(4, 2 * static_cast<int>(std::ceil(std::abs(w) / (2.0 * pi))));
    double g_hat = 0.0, err_sum = 0.0;
    for (int j = 0; j < pieces; ++j) {
        double err = 0.0;
        g_hat += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            integrand, static_cast<double>(j) / pieces, static_cast<double>(j + 1) / pieces, 0, 0.0, &err);
        err_sum += std::abs(err);
    }
    g_hat *= 2.0;
    err_sum *= 2.0;
    const double total = cache_->total();
    // 2 sin(3 eta / 16) / eta, with its limit 3/8 at the origin
    const double ratio =
        std::abs(eta) < 1e-6 ? 0.375 * (1.0 - (9.0 / 1536.0) * eta * eta) : 2.0 * std::sin(0.1875 * eta) / eta;
    const double abs_err = a * std::abs(ratio) * err_sum / total;
    if (!(abs_err <= 1e-12 * std::max(1.0, a))) {
        std::ostringstream msg;
        msg << "smooth window transform did not converge at y = " << y << " (achieved " << abs_err << ")";
        throw NumericError(msg.str());
    }
    return a * ratio * g_hat / total;
}

Window WindowSpec::axis(std::size_t k) const {
    if (kind == WindowKind::smooth) return SmoothWindow(a.at(k));
    return TrapezoidWindow(a.at(k));
}

std::vector<Window> WindowSpec::axes() const {
    std::vector<Window> out;
    out.reserve(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out.push_back(axis(k));
    return out;
}

double window_eval(const Window& w, double x) {
    return std::visit([x](const auto& v) { return v.value(x); }, w);
}

double window_fourier(const Window& w, double y) {
    return std::visit([y](const auto& v) { return v.fourier(y); }, w);
}

double window_support(const Window& w) {
    return std::visit([](const auto& v) { return v.support(); }, w);
}

double window_plateau(const Window& w) {
    return std::visit([](const auto& v) { return v.plateau(); }, w);
}

double window_band(const Window& w) {
    return std::visit([](const auto& v) { return v.a; }, w);
}

double cardinal_axis(const Window& w, int m, double x) {
    const double a = window_band(w);
    return window_fourier(w, pi * m / a - x) / (2.0 * a);
}

double cardinal_eval(const std::vector<Window>& axes, std::span<const int> m, std::span<const double> x) {
    double out = 1.0;
    for (std::size_t k = 0; k < axes.size(); ++k) out *= cardinal_axis(axes[k], m[k], x[k]);
    return out;
}

double cardinal_eval(const WindowSpec& w, std::span<const int> m, std::span<const double> x) {
    if (m.size() != w.dimension() || x.size() != w.dimension())
        throw ConfigError("cardinal_eval: index and point must match the window dimension");
    return cardinal_eval(w.axes(), m, x);
}

double cardinal_sup(const Window& w) {
    const double a = window_band(w);
    return window_fourier(w, 0.0) / (2.0 * a);
}

double cardinal_l1(const Window& w) {
    const double a = window_band(w);
    if (std::holds_alternative<TrapezoidWindow>(w)) {
        // In t = a y the integral of |F lambda_a| is a-free; kinks of
        // |sin(3t/4) sin(t/4)| sit on multiples of 4 pi / 3.
        static const double scaled = [] {
            const double cut = 4.0e5;
            const double width = 4.0 * pi / 3.0;
            const TrapezoidWindow unit(1.0);
            double s = 0.0;
            for (double lo = 0.0; lo < cut; lo += width)
                s += gl_integrate([&](double t) { return std::abs(unit.fourier(t)); }, lo, lo + width, 16);
            return 2.0 * (s + 8.0 / cut);
        }();
        return scaled / (2.0 * a);
    }
    // The smooth transform decays faster than any power; 200 / a is far out.
    double s = 0.0;
    const double width = 0.5 / a, cut = 200.0 / a;
    for (double lo = 0.0; lo < cut; lo += width)
        s += gl_integrate([&](double y) { return std::abs(window_fourier(w, y)); }, lo, lo + width, 8);
    return 2.0 * s / (2.0 * a);
}

double norm_sum(const Window& w, double x, int max_index) {
    const double a = window_band(w);
    if (std::holds_alternative<TrapezoidWindow>(w)) {
        // |J_m| = 4 |sin(3t/4) sin(t/4)| / t^2 with t = pi m - a x; the sine
        // product only depends on m mod 8.
        const double s = a * x;
        double num[8];
        for (int r = 0; r < 8; ++r) {
            const double t = pi * r - s;
            num[r] = 4.0 * std::abs(std::sin(0.75 * t) * std::sin(0.25 * t));
        }
        double total = 0.0;
        for (int m = -max_index; m <= max_index; ++m) {
            const double t = pi * m - s;
            if (std::abs(t) < 1e-4) {
                total += std::abs(cardinal_axis(w, m, x));
                continue;
            }
            total += num[((m % 8) + 8) % 8] / (t * t);
        }
        return total;
    }
    double total = 0.0;
    for (int m = -max_index; m <= max_index; ++m) total += std::abs(cardinal_axis(w, m, x));
    return total;
}

NormEstimate operator_norm_estimate(const Window& w, int grid_points, int max_index) {
    const double a = window_band(w);
    const int g = std::max(grid_points, 1);
    const int mi = std::max(max_index, 2);
    NormEstimate out;
    for (int j = 0; j < g; ++j) {
        const double x = (pi / a) * j / g;
        const double v = norm_sum(w, x, mi);
        if (v > out.sampled) {
            out.sampled = v;
            out.argmax = x;
        }
    }
    if (std::holds_alternative<TrapezoidWindow>(w)) {
        out.tail_bound = (4.0 / (pi * pi)) * (1.0 / (mi - 1.0) + 1.0 / mi);
    } else {
        // no closed majorant for the bump transform; the next block of terms
        // bounds a super-algebraically decaying remainder generously
        double extra = 0.0;
        for (int m = mi + 1; m <= 2 * mi; ++m)
            extra += std::abs(cardinal_axis(w, m, out.argmax)) + std::abs(cardinal_axis(w, -m, out.argmax));
        out.tail_bound = 2.0 * extra;
    }
    return out;
}

}  // namespace cardinal
