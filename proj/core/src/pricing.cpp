#include "cardinal/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cardinal/errors.hpp"
#include "cardinal/quadrature.hpp"

namespace cardinal {

void SpreadOption::validate() const {
    std::vector<std::string> v;
    if (!(K >= 0.0) || !std::isfinite(K)) v.push_back("strike K must be nonnegative");
    if (!(T > 0.0)) v.push_back("maturity T must be positive");
    if (!std::isfinite(r)) v.push_back("rate r must be finite");
    if (!v.empty()) throw ConfigError(std::move(v));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double black_scholes_call(double spot, double strike, double r, double q, double sigma, double T) {
    if (strike <= 0.0) return spot * std::exp(-q * T) - strike * std::exp(-r * T);
    const double v = sigma * std::sqrt(T);
    const double d1 = (std::log(spot / strike) + (r - q + 0.5 * sigma * sigma) * T) / v;
    return spot * std::exp(-q * T) * normal_cdf(d1) - strike * std::exp(-r * T) * normal_cdf(d1 - v);
}

PriceQuote margrabe_price(const GbmParams& gbm, double q1, double q2, FormReading reading) {
    const double s1 = gbm.sigma1, s2 = gbm.sigma2, T = gbm.T;
    const double var = s1 * s1 + s2 * s2 - 2.0 * s1 * s2 * gbm.rho;
    PriceQuote q;
    q.method = "margrabe";
    double d1 = 0.0, d2 = 0.0;
    if (reading == FormReading::printed) {
        const double s = var;
        d1 = (std::log(gbm.s10 / gbm.s20) + (q1 - q2 + 0.5 * s) * T) / (s * std::sqrt(T));
        d2 = d1 - s * std::sqrt(T);
        q.note = "printed reading: sigma without square root and sigma/2 in d1";
    } else {
        const double s = std::sqrt(std::max(var, 0.0));
        if (s == 0.0) {
            q.value = std::max(0.0, gbm.s10 * std::exp(-q1 * T) - gbm.s20 * std::exp(-q2 * T));
            return q;
        }
        d1 = (std::log(gbm.s10 / gbm.s20) + (q2 - q1 + 0.5 * s * s) * T) / (s * std::sqrt(T));
        d2 = d1 - s * std::sqrt(T);
        q.diagnostics["sigma"] = s;
    }
    q.value = gbm.s10 * std::exp(-q1 * T) * normal_cdf(d1) - gbm.s20 * std::exp(-q2 * T) * normal_cdf(d2);
    q.diagnostics["d1"] = d1;
    q.diagnostics["d2"] = d2;
    return q;
}

PriceQuote kirk_price(const GbmParams& gbm, double K) {
    if (!(K >= 0.0)) throw ConfigError("strike K must be nonnegative");
    const double T = gbm.T, growth = std::exp(gbm.r * T);
    const double f1 = gbm.s10 * growth, f2 = gbm.s20 * growth;
    const double b = f2 / (f2 + K);
    const double s1 = gbm.sigma1, s2 = gbm.sigma2;
    const double sig = std::sqrt(std::max(0.0, s1 * s1 - 2.0 * gbm.rho * s1 * s2 * b + s2 * s2 * b * b));
    PriceQuote q;
    q.method = "kirk";
    q.note = "approximation";
    q.diagnostics["sigma_eff"] = sig;
    if (sig == 0.0) {
        q.value = std::max(0.0, f1 - f2 - K) / growth;
        return q;
    }
    const double v = sig * std::sqrt(T);
    const double d1 = (std::log(f1 / (f2 + K)) + 0.5 * v * v) / v;
    q.value = (f1 * normal_cdf(d1) - (f2 + K) * normal_cdf(d1 - v)) / growth;
    return q;
}

PriceQuote price_spread_density(const SpreadOption& opt, const DensityApproximant& approx, std::size_t panels,
                                const PricingOptions& options) {
    opt.validate();
    if (approx.dimension() != 2) throw ConfigError("spread pricing needs a two-dimensional approximant");
    const std::size_t per_side = std::max<std::size_t>(panels, 1);

    const double mass = mass_check(approx, options.mass_points);
    if (!(mass >= options.min_mass)) {
        std::ostringstream msg;
        msg << "window plateau does not cover the effective support: mass " << mass << " < " << options.min_mass;
        throw ConfigError(msg.str());
    }

    const LogMoments mom = log_moments(approx.model(), approx.maturity());
    double lo[2], hi[2], radius[2];
    for (int k = 0; k < 2; ++k) {
        const double plateau = window_plateau(approx.window().axis(k));
        const double r = plateau > 0.0 ? plateau : window_support(approx.window().axis(k));
        radius[k] = std::min(r, options.std_devs * mom.stddev[k] + std::abs(mom.mean[k] - approx.center()[k]));
        lo[k] = approx.center()[k] - radius[k];
        hi[k] = approx.center()[k] + radius[k];
    }

    const std::vector<double> breaks1 = graded_breaks(approx.center()[0], radius[0], per_side);
    const QuadratureRule q2 = composite_gauss_legendre(graded_breaks(approx.center()[1], radius[1], per_side), 16);

    double value = 0.0, payoff_l1 = 0.0;
    double kink_min = std::numeric_limits<double>::infinity(), kink_max = -kink_min;
    std::size_t rows = 0;
    for (std::size_t j = 0; j < q2.nodes.size(); ++j) {
        const double x2 = q2.nodes[j];
        const double kink = std::log(std::exp(x2) + opt.K);
        const double start = std::max(lo[0], kink);
        if (start >= hi[0]) continue;
        kink_min = std::min(kink_min, kink);
        kink_max = std::max(kink_max, kink);
        std::vector<double> b{start};
        for (double x : breaks1)
            if (x > start && x < hi[0]) b.push_back(x);
        b.push_back(hi[0]);
        const QuadratureRule q1 = composite_gauss_legendre(b, 16);
        const double x2v[1] = {x2};
        const std::vector<double> dens = approx.eval_grid(q1.nodes, x2v);
        double row = 0.0, row_l1 = 0.0;
        for (std::size_t i = 0; i < q1.nodes.size(); ++i) {
            const double payoff = std::max(0.0, std::exp(q1.nodes[i]) - std::exp(x2) - opt.K);
            row += q1.weights[i] * payoff * dens[i];
            row_l1 += q1.weights[i] * payoff;
        }
        value += q2.weights[j] * row;
        payoff_l1 += q2.weights[j] * row_l1;
        ++rows;
    }
    const double disc = std::exp(-opt.r * opt.T);
    value *= disc;

    PriceQuote q;
    q.method = "density";
    q.analytic_budget = disc * approx.budget().total() * payoff_l1;
    q.diagnostics["panels_per_side"] = static_cast<double>(per_side);
    q.diagnostics["x2_nodes"] = static_cast<double>(rows);
    q.diagnostics["kink_min"] = rows ? kink_min : 0.0;
    q.diagnostics["kink_max"] = rows ? kink_max : 0.0;
    q.diagnostics["mass"] = mass;
    q.diagnostics["x1_lo"] = lo[0];
    q.diagnostics["x1_hi"] = hi[0];
    q.diagnostics["x2_lo"] = lo[1];
    q.diagnostics["x2_hi"] = hi[1];
    q.diagnostics["raw_value"] = value;
    if (value < -q.analytic_budget) {
        std::ostringstream msg;
        msg << "density price " << value << " is below minus its error budget " << q.analytic_budget;
        throw ConsistencyError(msg.str());
    }
    q.value = std::max(0.0, value);
    return q;
}

}  // namespace cardinal
