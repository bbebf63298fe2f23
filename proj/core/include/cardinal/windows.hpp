#pragma once

#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "cardinal/models.hpp"

namespace cardinal {

// lambda_a(x): 1 on |x| <= a/2, 0 on |x| >= a, linear in between.
struct TrapezoidWindow {
    double a = 1.0;

    explicit TrapezoidWindow(double a_);
    double value(double x) const;
    double fourier(double y) const;
    double plateau() const { return 0.5 * a; }
    double support() const { return a; }
};

struct BumpCache;

// phi(x / a) with phi the normalized double-bump integral: smooth, compactly
// supported in |x| <= 7a/16, but without a flat top, so reconstruction with
// it is only approximate.
class SmoothWindow {
public:
    explicit SmoothWindow(double a_);
    double value(double x) const;
    double fourier(double y) const;
    double plateau() const { return 0.0; }
    double support() const { return 7.0 * a / 16.0; }
    double omega() const;

    double a = 1.0;

private:
    std::shared_ptr<const BumpCache> cache_;
};

using Window = std::variant<TrapezoidWindow, SmoothWindow>;

enum class WindowKind { trapezoid, smooth };

// Product window: one kind, one band per coordinate.
struct WindowSpec {
    WindowKind kind = WindowKind::trapezoid;
    RealVec a;

    std::size_t dimension() const { return a.size(); }
    Window axis(std::size_t k) const;
    std::vector<Window> axes() const;
};

double window_eval(const Window& w, double x);
double window_fourier(const Window& w, double y);
double window_support(const Window& w);
double window_plateau(const Window& w);
double window_band(const Window& w);

// Per-axis factor (1 / (2a)) F lambda_a(pi m / a - x).
double cardinal_axis(const Window& w, int m, double x);

// J_m(x) = prod_k (1 / (2 a_k)) F lambda_{a_k}(pi m_k / a_k - x_k).
double cardinal_eval(const WindowSpec& w, std::span<const int> m, std::span<const double> x);
double cardinal_eval(const std::vector<Window>& axes, std::span<const int> m, std::span<const double> x);

// sup_x |J_m(x)| for one axis.
double cardinal_sup(const Window& w);

// Integral of |J_m| over the real line for one axis (independent of m).
double cardinal_l1(const Window& w);

struct NormEstimate {
    double sampled = 0.0;     // max over the grid of the truncated sum
    double tail_bound = 0.0;  // majorant for the indices beyond max_index
    double argmax = 0.0;
    double estimate() const { return sampled + tail_bound; }
};

// sup over one period [0, pi/a) of sum_m |J_m(x)|, sampled on grid_points
// points with |m| <= max_index, plus a tail majorant.
NormEstimate operator_norm_estimate(const Window& w, int grid_points, int max_index);

// sum_{|m| <= max_index} |J_m(x)| at one point.
double norm_sum(const Window& w, double x, int max_index);

}  // namespace cardinal
