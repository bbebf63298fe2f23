#pragma once

#include <map>
#include <string>

#include "cardinal/inversion.hpp"
#include "cardinal/models.hpp"

namespace cardinal {

// Pays (S1_T - S2_T - K)+ at T.
struct SpreadOption {
    double K = 0.0;
    double T = 1.0;
    double r = 0.0;

    void validate() const;
};

struct PriceQuote {
    double value = 0.0;
    std::string method;
    double analytic_budget = 0.0;
    double standard_error = 0.0;
    std::map<std::string, double> diagnostics;
    std::string note;
};

struct PricingOptions {
    // integration box half-width in log-price standard deviations, clipped
    // to the window plateau
    double std_devs = 12.0;
    std::size_t mass_points = 512;
    double min_mass = 1.0 - 1e-3;
};

PriceQuote price_spread_density(const SpreadOption& opt, const DensityApproximant& approx, std::size_t panels,
                                const PricingOptions& options = {});

double normal_cdf(double x);
double black_scholes_call(double spot, double strike, double r, double q, double sigma, double T);

// Exchange option S1 for S2 with continuous yields q1, q2.  The printed
// reading keeps sigma without the square root and sigma / 2 in d1.
PriceQuote margrabe_price(const GbmParams& gbm, double q1, double q2, FormReading reading = FormReading::corrected);

// Kirk's approximation: the exchange formula against F2 + K with
// b = F2 / (F2 + K) weighting the second volatility.
PriceQuote kirk_price(const GbmParams& gbm, double K);

}  // namespace cardinal
