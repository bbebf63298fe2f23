#pragma once

#include <cstddef>
#include <vector>

namespace cardinal {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
const QuadratureRule& gauss_legendre(std::size_t n);

// Composite rule: an n-point Gauss-Legendre panel on each [b_i, b_{i+1}].
QuadratureRule composite_gauss_legendre(const std::vector<double>& breaks, std::size_t n);

// Breakpoints on [center - radius, center + radius] graded quadratically
// toward the centre, with `extra` points merged in (kinks, window corners).
std::vector<double> graded_breaks(double center, double radius, std::size_t panels_per_side,
                                  const std::vector<double>& extra = {});

}  // namespace cardinal
