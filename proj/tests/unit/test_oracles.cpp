#include <cardinal/errors.hpp>
#include <cardinal/oracles.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "testing.hpp"

using namespace cardinal;
using testing::close;

namespace {

constexpr double pi = std::numbers::pi;

GbmParams example_gbm() {
    GbmParams g;
    g.r = 0.1;
    g.T = 1.0;
    g.rho = 0.5;
    g.sigma1 = 0.2;
    g.sigma2 = 0.1;
    return g;
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// exchange option on two lognormal assets with continuous yields q1, q2
double exchange_price(double s1, double s2, double sig1, double sig2, double rho, double T, double q1 = 0.0,
                      double q2 = 0.0) {
    const double s = std::sqrt((sig1 * sig1 + sig2 * sig2 - 2.0 * rho * sig1 * sig2) * T);
    const double d1 = (std::log(s1 / s2) + (q2 - q1) * T + 0.5 * s * s) / s;
    return s1 * std::exp(-q1 * T) * norm_cdf(d1) - s2 * std::exp(-q2 * T) * norm_cdf(d1 - s);
}

}  // namespace

TEST_CASE("lognormal density: peak, normalization and transform") {
    const GbmParams g = example_gbm();
    const double s1 = g.sigma1 * std::sqrt(g.T), s2 = g.sigma2 * std::sqrt(g.T);
    const double m[2] = {(g.r - 0.5 * g.sigma1 * g.sigma1) * g.T, (g.r - 0.5 * g.sigma2 * g.sigma2) * g.T};
    const double peak = 1.0 / (2.0 * pi * s1 * s2 * std::sqrt(1.0 - g.rho * g.rho));
    CHECK(close(gaussian_log_density(g, m), peak, 1e-13));

    // trapezoid sums on +-9 sigma converge spectrally for a Gaussian
    const int n = 241;
    const double h1 = 18.0 * s1 / (n - 1), h2 = 18.0 * s2 / (n - 1);
    double mass = 0.0;
    Complex ft{0.0, 0.0};
    const double u[2] = {3.0, -7.0};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x[2] = {m[0] - 9.0 * s1 + i * h1, m[1] - 9.0 * s2 + j * h2};
            const double p = gaussian_log_density(g, x);
            mass += p;
            ft += p * std::exp(Complex{0.0, u[0] * x[0] + u[1] * x[1]});
        }
    CHECK(close(mass * h1 * h2, 1.0, 1e-12));
    const Complex phi = char_function(make_model(g), std::span<const double>(u, 2), g.T);
    CHECK(std::abs(ft * h1 * h2 - phi) < 1e-12);

    // the printed covariance reading only moves the off-diagonal
    const double off[2] = {m[0] + 0.1, m[1] - 0.05};
    CHECK(gaussian_log_density(g, off, FormReading::printed) != gaussian_log_density(g, off));
    GbmParams flat = g;
    flat.rho = 0.0;
    CHECK(close(gaussian_log_density(flat, off, FormReading::printed), gaussian_log_density(flat, off), 1e-15));
}

TEST_CASE("Monte Carlo exchange option matches the closed form") {
    GbmParams g = example_gbm();
    g.s10 = 100.0;
    g.s20 = 100.0;
    const McResult mc = mc_gbm_spread(g, 0.0, 400000, 7);
    const double want = exchange_price(100.0, 100.0, g.sigma1, g.sigma2, g.rho, g.T);
    CHECK(std::abs(mc.estimate - want) < 3.0 * mc.standard_error);
    CHECK(mc.paths == 400000);
    CHECK(mc.seed == 7);
}

TEST_CASE("Monte Carlo bookkeeping") {
    GbmParams same = example_gbm();
    same.sigma2 = same.sigma1;
    same.rho = 1.0;
    const McResult zero = mc_gbm_spread(same, 0.0, 20000, 3);
    CHECK(std::abs(zero.estimate) < 1e-12);

    GbmParams g = example_gbm();
    g.s10 = 110.0;
    g.s20 = 100.0;
    const McResult a = mc_gbm_spread(g, 5.0, 100000, 11), b = mc_gbm_spread(g, 5.0, 200000, 11);
    CHECK(close(a.standard_error / b.standard_error, std::sqrt(2.0), 0.05));
    const McResult again = mc_gbm_spread(g, 5.0, 100000, 11);
    CHECK(again.estimate == a.estimate);
    CHECK(again.standard_error == a.standard_error);
    CHECK(mc_gbm_spread(g, 5.0, 100000, 12).estimate != a.estimate);
    CHECK_THROWS_AS((void)mc_gbm_spread(g, 5.0, 10, 1), ConfigError);
}

TEST_CASE("frozen-variance stochastic volatility reduces to the lognormal model") {
    SvParams p;
    p.r = 0.05;
    p.T = 0.5;
    p.rho = 0.3;
    p.delta1 = 0.02;
    p.delta2 = 0.04;
    p.sigma1 = 1.0;
    p.sigma2 = 0.5;
    p.v0 = 0.04;
    p.mu = 0.04;
    p.kappa = 1.0;
    p.sigma_v = 1e-8;
    p.s10 = 100.0;
    p.s20 = 95.0;
    const McResult mc = mc_sv_spread(p, 0.0, 200000, 5, 8);
    const double want = exchange_price(100.0, 95.0, 0.2, 0.1, 0.3, 0.5, 0.02, 0.04);
    CHECK(std::abs(mc.estimate - want) < 3.0 * mc.standard_error);

    SvParams bad = p;
    bad.rho = 0.9;
    bad.rho1 = 0.9;
    bad.rho2 = -0.9;
    CHECK_THROWS_AS((void)mc_sv_spread(bad, 0.0, 20000, 5, 8), ConfigError);
}

TEST_CASE("variance gamma samples reproduce the characteristic function") {
    const VgParams vg{};
    const std::size_t n = 200000;
    const TerminalSample s = sample_vg_terminal(vg, n, 21);
    REQUIRE(s.x1.size() == n);
    const auto model = make_model(vg);
    for (auto [u1, u2] : {std::pair{0.5, 0.0}, std::pair{1.0, -2.0}, std::pair{3.0, 1.0}}) {
        Complex mean{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) mean += std::exp(Complex{0.0, u1 * s.x1[i] + u2 * s.x2[i]});
        mean /= static_cast<double>(n);
        const double u[2] = {u1, u2};
        const Complex phi = char_function(model, std::span<const double>(u, 2), vg.T);
        // each part of e^{iu.X} has variance at most 1
        CHECK(std::abs(mean.real() - phi.real()) < 3.0 / std::sqrt(double(n)));
        CHECK(std::abs(mean.imag() - phi.imag()) < 3.0 / std::sqrt(double(n)));
    }
}

TEST_CASE("common factor weight") {
    const std::size_t n = 100000;
    VgParams own = VgParams{};
    own.alpha_mix = 0.0;
    const TerminalSample s = sample_vg_terminal(own, n, 4);
    double m1 = 0, m2 = 0, c = 0, v1 = 0, v2 = 0;
    for (std::size_t i = 0; i < n; ++i) m1 += s.x1[i], m2 += s.x2[i];
    m1 /= n;
    m2 /= n;
    for (std::size_t i = 0; i < n; ++i) {
        c += (s.x1[i] - m1) * (s.x2[i] - m2);
        v1 += (s.x1[i] - m1) * (s.x1[i] - m1);
        v2 += (s.x2[i] - m2) * (s.x2[i] - m2);
    }
    CHECK(std::abs(c / std::sqrt(v1 * v2)) < 4.0 / std::sqrt(double(n)));

    VgParams common = VgParams{};
    common.alpha_mix = 1.0;
    common.x10 = 0.3;
    common.x20 = -0.1;
    const TerminalSample t = sample_vg_terminal(common, 1000, 4);
    for (std::size_t i = 0; i < t.x1.size(); ++i) CHECK(close(t.x1[i] - t.x2[i], 0.4, 1e-12));
}

TEST_CASE("direct quadrature inversion of the lognormal spectrum") {
    GbmParams g = example_gbm();
    const auto model = make_model(g);
    std::vector<RealVec> xs{{0.08, 0.095}, {-0.2, 0.0}, {0.3, 0.2}};
    const auto got = quadrature_inversion(model, g.T, xs, 100.0, 201);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(got[i] - gaussian_log_density(g, xs[i])) < 1e-10);

    g.sigma2 = g.sigma1;
    const auto sym = make_model(g);
    const double p = quadrature_inversion(sym, g.T, RealVec{0.1, -0.05}, 100.0, 201);
    const double q = quadrature_inversion(sym, g.T, RealVec{-0.05, 0.1}, 100.0, 201);
    CHECK(close(p, q, 1e-12));

    CHECK_THROWS_AS((void)quadrature_inversion(model, g.T, xs, 5.0, 51), BoxTooSmallError);
}

TEST_CASE("bilateral gamma density") {
    // shape 1 is the asymmetric Laplace law
    const double ap = 2.0, am = 3.0;
    for (double y : {-2.0, -0.3, 0.4, 1.7}) {
        const double want = ap * am / (ap + am) * (y > 0 ? std::exp(-ap * y) : std::exp(am * y));
        CHECK(close(bilateral_gamma_density(1.0, ap, am, y), want, 1e-12 * want));
    }
    CHECK(close(bilateral_gamma_density(1.0, ap, am, 0.0), ap * am / (ap + am), 1e-12));
    CHECK(std::isinf(bilateral_gamma_density(0.5, ap, am, 0.0)));

    // unit mass for a shape with a smooth density (Simpson on [-25, 25])
    const int panels = 20000;
    const double h = 50.0 / panels;
    double s = 0.0;
    for (int i = 0; i <= panels; ++i) {
        const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * bilateral_gamma_density(2.5, ap, am, -25.0 + i * h);
    }
    CHECK(close(s * h / 3.0, 1.0, 1e-8));
}

TEST_CASE("variance gamma conditional density") {
    const VgParams vg{};
    for (RealVec x : std::vector<RealVec>{{0.3, -0.2}, {-0.5, 0.4}, {1.0, 1.2}, {0.05, 0.6}}) {
        const double loose = vg_conditional_density(vg, 1.0, x, 1e-9);
        const double tight = vg_conditional_density(vg, 1.0, x, 1e-12);
        CHECK(tight > 0.0);
        CHECK(close(loose, tight, 1e-7 * tight));
    }

    // with no common factor the density factors into its marginals
    VgParams own = vg;
    own.alpha_mix = 0.0;
    own.lam = 2.0;
    const RealVec x{0.4, -0.7};
    const double want = bilateral_gamma_density(2.0, 2.0, 3.0, 0.4) * bilateral_gamma_density(2.0, 2.0, 3.0, -0.7);
    CHECK(close(vg_conditional_density(own, 1.0, x), want, 1e-8 * want));

    // probability of a box against the sampled law
    const std::size_t n = 400000;
    const TerminalSample s = sample_vg_terminal(vg, n, 99);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (s.x1[i] > 0.2 && s.x1[i] < 0.6 && s.x2[i] > -0.6 && s.x2[i] < -0.2) ++hits;
    const double freq = double(hits) / n;
    double prob = 0.0;
    const int k = 16;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const RealVec y{0.2 + 0.4 * (i + 0.5) / k, -0.6 + 0.4 * (j + 0.5) / k};
            prob += vg_conditional_density(vg, 1.0, y, 1e-8);
        }
    prob *= 0.4 * 0.4 / (k * k);
    CHECK(std::abs(freq - prob) < 4.0 * std::sqrt(prob * (1.0 - prob) / n) + 2e-4);
}
