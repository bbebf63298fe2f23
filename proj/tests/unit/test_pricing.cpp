#include <cardinal/errors.hpp>
#include <cardinal/oracles.hpp>
#include <cardinal/pricing.hpp>

#include <cmath>

#include "testing.hpp"

using namespace cardinal;
using testing::close;

namespace {

GbmParams spot_gbm() {
    GbmParams g;
    g.r = 0.1;
    g.T = 1.0;
    g.rho = 0.5;
    g.sigma1 = 0.2;
    g.sigma2 = 0.1;
    g.s10 = 100.0;
    g.s20 = 100.0;
    return g;
}

double hand_call(double s, double k, double r, double sig, double T) {
    auto N = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    const double d1 = (std::log(s / k) + (r + 0.5 * sig * sig) * T) / (sig * std::sqrt(T));
    return s * N(d1) - k * std::exp(-r * T) * N(d1 - sig * std::sqrt(T));
}

const DensityApproximant& shared_approximant() {
    static const DensityApproximant ap = [] {
        const auto m = make_model(spot_gbm());
        SamplingPlan plan;
        plan.a = {8.0, 8.0};
        plan.trunc = ThresholdTruncation{1e-12, 4096, {}};
        return build_density_approximant(m, plan, WindowSpec{WindowKind::trapezoid, {8.0, 8.0}},
                                         ContourShift{{0.5, 0.5}}, 1.0);
    }();
    return ap;
}

}  // namespace

TEST_CASE("Black-Scholes and the degenerate exchange option") {
    CHECK(close(black_scholes_call(100.0, 95.0, 0.05, 0.0, 0.25, 0.75), hand_call(100.0, 95.0, 0.05, 0.25, 0.75), 1e-12));
    CHECK(close(normal_cdf(0.0), 0.5, 1e-16));
    CHECK(close(normal_cdf(1.959963984540054), 0.975, 1e-12));

    // with the second asset nearly deterministic the exchange option is a call
    // struck at its forward
    GbmParams g = spot_gbm();
    g.sigma2 = 1e-9;
    g.rho = 0.0;
    const double k = g.s20 * std::exp(g.r * g.T);
    CHECK(close(margrabe_price(g, 0.0, 0.0).value, hand_call(g.s10, k, g.r, g.sigma1, g.T), 1e-7));
}

TEST_CASE("exchange option properties") {
    GbmParams g = spot_gbm();
    g.s10 = 105.0;
    const double q1 = 0.01, q2 = 0.03;
    const PriceQuote p = margrabe_price(g, q1, q2);
    const double intrinsic = g.s10 * std::exp(-q1 * g.T) - g.s20 * std::exp(-q2 * g.T);
    CHECK(p.value >= intrinsic);
    CHECK(p.value <= g.s10 * std::exp(-q1 * g.T));
    CHECK(p.method.size() > 0);

    // the printed reading agrees only when the combined variance is exactly 1
    CHECK(margrabe_price(g, q1, q2, FormReading::printed).value != p.value);
    const double s = std::sqrt(0.04 + 0.01 - 2.0 * 0.5 * 0.2 * 0.1);
    CHECK(close(p.diagnostics.at("sigma"), s, 1e-14));
}

TEST_CASE("Kirk's approximation") {
    const GbmParams g = spot_gbm();
    CHECK(close(kirk_price(g, 0.0).value, margrabe_price(g, 0.0, 0.0).value, 1e-12));
    double prev = kirk_price(g, 0.0).value;
    for (double K : {1.0, 5.0, 10.0, 20.0, 40.0}) {
        const double v = kirk_price(g, K).value;
        CHECK(v < prev);
        CHECK(v > 0.0);
        prev = v;
    }
    CHECK_THROWS_AS((void)kirk_price(g, -1.0), ConfigError);
}

TEST_CASE("density price at zero strike is the exchange option") {
    const GbmParams g = spot_gbm();
    const PriceQuote q = price_spread_density(SpreadOption{0.0, 1.0, 0.1}, shared_approximant(), 24);
    CHECK(std::abs(q.value - margrabe_price(g, 0.0, 0.0).value) < 1e-3);
    CHECK(q.method == "density");
    CHECK(std::abs(q.diagnostics.at("mass") - 1.0) < 1e-8);
    CHECK(std::isfinite(q.analytic_budget));
}

TEST_CASE("density prices against Kirk and Monte Carlo") {
    const GbmParams g = spot_gbm();
    double prev = 1e300;
    for (double K : {5.0, 15.0}) {
        const double v = price_spread_density(SpreadOption{K, 1.0, 0.1}, shared_approximant(), 24).value;
        CAPTURE(K);
        CHECK(std::abs(v - kirk_price(g, K).value) < 1e-3);
        const McResult mc = mc_gbm_spread(g, K, 200000, 17);
        CHECK(std::abs(v - mc.estimate) < 4.0 * mc.standard_error);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("pricing input checks") {
    CHECK_THROWS_AS(SpreadOption({1.0, -1.0, 0.0}).validate(), ConfigError);
    CHECK_THROWS_AS(SpreadOption({-1.0, 1.0, 0.0}).validate(), ConfigError);

    // a window too narrow for the law loses mass and is refused
    GbmParams wide = spot_gbm();
    wide.sigma1 = 1.0;
    wide.sigma2 = 1.0;
    const auto m = make_model(wide);
    SamplingPlan plan;
    plan.a = {2.0, 2.0};
    plan.trunc = ThresholdTruncation{1e-10, 4096, {}};
    BuildOptions o;
    o.coverage_sigmas = 0.0;
    o.compute_budget = false;
    const auto ap = build_density_approximant(m, plan, WindowSpec{WindowKind::trapezoid, {2.0, 2.0}},
                                              ContourShift{{0.0, 0.0}}, 1.0, o);
    CHECK_THROWS_AS((void)price_spread_density(SpreadOption{0.0, 1.0, 0.1}, ap, 8), ConfigError);
}
