#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cardinal/models.hpp"

namespace cardinal {

struct McResult {
    double estimate = 0.0;
    double standard_error = 0.0;
    std::size_t paths = 0;
    std::uint64_t seed = 0;
};

// Bivariate normal density of the log-prices; the covariance off-diagonal is
// rho s1 s2 (corrected) or s1^2 s2^2 rho (printed).
double gaussian_log_density(const GbmParams& gbm, std::span<const double> x,
                            FormReading reading = FormReading::corrected);

// Exact terminal sampling; discounted (S1 - S2 - K)+.
McResult mc_gbm_spread(const GbmParams& gbm, double K, std::size_t paths, std::uint64_t seed);

// Spot prices s10, s20 take the place of the initial log-prices in vg; the
// payoff is discounted at rate r.
McResult mc_vg_spread(const VgParams& vg, double K, std::size_t paths, std::uint64_t seed, double s10, double s20,
                      double r = 0.0);

// Euler full truncation with steps_per_year steps per unit time.
McResult mc_sv_spread(const SvParams& sv, double K, std::size_t paths, std::uint64_t seed, int steps_per_year = 2048);

struct TerminalSample {
    std::vector<double> x1, x2;
};

// X_k = x_k0 + Y_k + Y_3 with each Y a difference of gamma variates.
TerminalSample sample_vg_terminal(const VgParams& vg, std::size_t paths, std::uint64_t seed);

// Trapezoid rule for (2 pi)^{-n} ∫_{[-R,R]^n} Phi(z) e^{-i<z,x>} dz at every
// point of xs.  Throws BoxTooSmallError when |Phi| >= 1e-12 on the boundary.
std::vector<double> quadrature_inversion(const ModelSpec& model, double T, const std::vector<RealVec>& xs,
                                         double box_radius, std::size_t points_per_axis);
double quadrature_inversion(const ModelSpec& model, double T, std::span<const double> x, double box_radius,
                            std::size_t points_per_axis);

// Density of G(nu, a_plus) - G(nu, a_minus) with G(shape, rate) gamma.
double bilateral_gamma_density(double nu, double a_plus, double a_minus, double y);

// VG joint density by conditioning on the common factor Y_3.
double vg_conditional_density(const VgParams& vg, double T, std::span<const double> x, double tolerance = 1e-10);

}  // namespace cardinal
