#include <cardinal/errors.hpp>
#include <cardinal/models.hpp>

#include <array>
#include <cmath>
#include <random>

#include "testing.hpp"

using namespace cardinal;
using testing::close;

namespace {

constexpr Complex I{0.0, 1.0};

GbmParams example_gbm() {
    GbmParams g;
    g.r = 0.1;
    g.T = 1.0;
    g.rho = 0.5;
    g.sigma1 = 0.2;
    g.sigma2 = 0.1;
    return g;
}

SvParams example_sv() {
    SvParams p;
    p.r = 0.1;
    p.T = 1.0;
    p.rho = 0.5;
    p.rho1 = 0.25;
    p.rho2 = -0.5;
    p.delta1 = 0.05;
    p.delta2 = 0.05;
    p.sigma1 = 0.5;
    p.sigma2 = 1.0;
    p.v0 = 0.04;
    p.kappa = 1.0;
    p.mu = 0.04;
    p.sigma_v = 0.05;
    p.s10 = 96.0;
    p.s20 = 100.0;
    return p;
}

// exp(i<u, ln S0 + (r e - sigma^2 / 2) T> - (T / 2) <u, Sigma u>), written out
// with an explicit 2x2 matrix rather than the library's expanded quadratic.
Complex gbm_matrix_form(const GbmParams& g, std::array<Complex, 2> u, double T) {
    const double sig[2] = {g.sigma1, g.sigma2};
    const double s0[2] = {g.s10, g.s20};
    const double cov[2][2] = {{sig[0] * sig[0], g.rho * sig[0] * sig[1]}, {g.rho * sig[0] * sig[1], sig[1] * sig[1]}};
    Complex lin = 0.0, quad = 0.0;
    for (int k = 0; k < 2; ++k) {
        lin += u[k] * (std::log(s0[k]) + (g.r - 0.5 * sig[k] * sig[k]) * T);
        for (int j = 0; j < 2; ++j) quad += u[k] * cov[k][j] * u[j];
    }
    return std::exp(I * lin - 0.5 * T * quad);
}

std::vector<ModelSpec> example_models() {
    return {make_model(example_gbm()), make_model(example_sv()), make_model(VgParams{})};
}

}  // namespace

TEST_CASE("characteristic functions equal one at the origin") {
    const double zero[2] = {0.0, 0.0};
    for (const auto& m : example_models())
        for (double t : {0.25, 1.0, 3.0}) CHECK(std::abs(char_function(m, zero, t) - 1.0) < 1e-14);

    LevyTriplet tr{{{1.0, 0.2}, {0.2, 0.5}}, {0.1, -0.3}, {{{0.5, 0.0}, 1.0}, {{-1.5, 2.0}, 0.3}}};
    CHECK(std::abs(char_function(make_model(tr), zero, 2.0) - 1.0) < 1e-14);
}

TEST_CASE("Hermitian symmetry on a random grid") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-15.0, 15.0);
    for (const auto& m : example_models()) {
        for (int i = 0; i < 200; ++i) {
            const double z[2] = {u(rng), u(rng)};
            const double mz[2] = {-z[0], -z[1]};
            const Complex a = char_function(m, z, m.maturity());
            const Complex b = char_function(m, mz, m.maturity());
            CHECK(std::abs(b - std::conj(a)) < 1e-12);
        }
    }
}

TEST_CASE("GBM agrees with the matrix form, including complex arguments") {
    GbmParams g = example_gbm();
    g.s10 = 100.0;
    g.s20 = 90.0;
    const auto m = make_model(g);
    const double real_z[2] = {1.0, 1.0};
    CHECK(std::abs(char_function(m, real_z, 1.0) - gbm_matrix_form(g, {1.0, 1.0}, 1.0)) < 1e-14);

    const Complex z[2] = {{2.0, 0.7}, {-3.0, -1.1}};
    const Complex want = gbm_matrix_form(g, {z[0], z[1]}, 2.5);
    CHECK(std::abs(char_function(m, z, 2.5) - want) < 1e-13 * std::abs(want));
}

TEST_CASE("the expanded scalar form printed with Example 1 differs from the matrix form") {
    // Coefficients as printed: 0.004 i u1, 0.02 u1 u2, 0.2 u1^2, 0.001 i u2, 0.1 u2^2, -0.2 i (u1 + u2).
    auto printed = [](double u1, double u2) {
        return std::exp(-0.5 * (0.004 * I * u1 + 0.02 * u1 * u2 + 0.2 * u1 * u1 + 0.001 * I * u2 + 0.1 * u2 * u2 -
                                0.2 * I * u1 - 0.2 * I * u2));
    };
    const GbmParams g = example_gbm();
    const Complex exact = gbm_matrix_form(g, {1.0, 1.0}, 1.0);
    CHECK(std::abs(printed(1.0, 1.0) - exact) > 1e-2);
}

TEST_CASE("printed GBM covariance reading differs only through the off-diagonal") {
    ModelSpec m = make_model(example_gbm());
    ModelSpec p = m;
    p.reading = FormReading::printed;
    const double axis[2] = {3.0, 0.0};
    CHECK(std::abs(char_function(m, axis, 1.0) - char_function(p, axis, 1.0)) < 1e-15);
    const double both[2] = {3.0, 2.0};
    // off-diagonal rho s1 s2 = 0.01 versus s1^2 s2^2 rho = 0.0002
    const Complex ratio = char_function(p, both, 1.0) / char_function(m, both, 1.0);
    CHECK(close(std::log(std::abs(ratio)), (0.01 - 0.0002) * 3.0 * 2.0, 1e-12));
}

TEST_CASE("Levy-Khintchine exponent examples") {
    const Complex y2[2] = {1.0, 0.0};
    LevyTriplet zero{{{0.0, 0.0}, {0.0, 0.0}}, {0.0, 0.0}, {}};
    CHECK(std::abs(levy_khintchine_exponent(zero, y2)) == 0.0);

    LevyTriplet gauss{{{1.0, 0.0}, {0.0, 1.0}}, {0.0, 0.0}, {}};
    CHECK(std::abs(levy_khintchine_exponent(gauss, y2) - (-0.5)) < 1e-15);
    CHECK(std::abs(char_function(make_model(gauss), y2, 1.0) - std::exp(-0.5)) < 1e-15);

    LevyTriplet jump{{{0.0, 0.0}, {0.0, 0.0}}, {0.0, 0.0}, {{{0.5, 0.0}, 1.0}}};
    const Complex y[2] = {2.0, 0.0};
    // <y, x> = 1 and |x| <= 1, so the summand is 1 - e^{i} + i
    const Complex want = -(1.0 - std::exp(I) + I);
    CHECK(std::abs(levy_khintchine_exponent(jump, y) - want) < 1e-15);

    LevyTriplet far{{{0.0, 0.0}, {0.0, 0.0}}, {0.0, 0.0}, {{{3.0, 0.0}, 2.0}}};
    const Complex want_far = -2.0 * (1.0 - std::exp(6.0 * I));
    CHECK(std::abs(levy_khintchine_exponent(far, y) - want_far) < 1e-14);
}

TEST_CASE("a Gaussian triplet reproduces the GBM characteristic function") {
    const GbmParams g = example_gbm();
    const double c12 = g.rho * g.sigma1 * g.sigma2;
    // drift enters as -i<b, y>, so b is minus the log-price drift
    LevyTriplet tr{{{g.sigma1 * g.sigma1, c12}, {c12, g.sigma2 * g.sigma2}},
                   {-(g.r - 0.5 * g.sigma1 * g.sigma1), -(g.r - 0.5 * g.sigma2 * g.sigma2)},
                   {}};
    const auto gm = make_model(g), tm = make_model(tr);
    for (double a = -20.0; a <= 20.0; a += 2.5)
        for (double b = -20.0; b <= 20.0; b += 2.5) {
            const double z[2] = {a, b};
            CHECK(std::abs(char_function(gm, z, 1.0) - char_function(tm, z, 1.0)) < 1e-12);
        }
}

TEST_CASE("analyticity tubes") {
    const auto gbm = analyticity_tube(make_model(example_gbm()));
    CHECK(gbm == RealVec{8.0, 8.0});
    ModelSpec capped = make_model(example_gbm());
    capped.tube_cap = 5.0;
    CHECK(analyticity_tube(capped) == RealVec{5.0, 5.0});

    const auto vg = analyticity_tube(make_model(VgParams{}));
    CHECK(vg == RealVec{1.0, 1.0});

    LevyTriplet tr{{{1.0}}, {0.0}, {{{0.4}, 1.0}}};
    CHECK(analyticity_tube(make_model(tr)) == RealVec{8.0});
    CHECK(analyticity_tube(make_model(example_sv())) == RealVec{0.5, 0.5});
}

TEST_CASE("VG diverges at the zero of its first factor") {
    const auto m = make_model(VgParams{});
    // 1 - i u / a_plus vanishes at u = -2i and the marginal exponent is lambda T = 1.
    // The library refuses arguments beyond its tube, so the blow-up is shown on the
    // factored marginal, which is then matched to the library inside the tube.
    auto factor = [](Complex u) { return 1.0 / ((1.0 - I * u / 2.0) * (1.0 + I * u / 3.0)); };
    CHECK(std::abs(factor({0.0, -(2.0 - 1e-6)})) > 1e5);
    // and inside the tube the library's value is finite and matches the factor form
    const Complex z[2] = {{0.3, -0.9}, {0.0, 0.0}};
    CHECK(std::abs(char_function(m, z, 1.0) - factor(z[0])) < 1e-13);
}

TEST_CASE("tube violations name the coordinate") {
    const auto vg = make_model(VgParams{});
    const Complex bad[2] = {{0.0, 0.1}, {0.0, 1.2}};
    try {
        (void)char_function(vg, bad, 1.0);
        FAIL("expected a domain error");
    } catch (const DomainError& e) {
        CHECK(e.coordinate() == 1);
    }
    const Complex edge[2] = {{0.0, 1.0}, {0.0, 0.0}};
    CHECK_THROWS_AS((void)char_function(vg, edge, 1.0), DomainError);

    const auto gbm = make_model(example_gbm());
    const Complex far[2] = {{0.0, 0.0}, {0.0, -8.5}};
    CHECK_THROWS_AS((void)char_function(gbm, far, 1.0), DomainError);
}

TEST_CASE("tube consistency: shifted arguments evaluate finitely") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-10.0, 10.0), s(-0.9, 0.9);
    for (const auto& m : example_models()) {
        const RealVec d = analyticity_tube(m);
        for (int i = 0; i < 100; ++i) {
            const Complex z[2] = {{u(rng), s(rng) * d[0]}, {u(rng), s(rng) * d[1]}};
            const Complex v = char_function(m, z, m.maturity());
            CHECK(std::isfinite(v.real()));
            CHECK(std::isfinite(v.imag()));
        }
    }
}

TEST_CASE("SV: branch tracking keeps the function continuous along a ray") {
    SvParams p = example_sv();
    p.sigma_v = 0.3;  // 2 kappa mu / sigma_v^2 is not an integer, so tracking is active
    p.T = 5.0;
    p.s10 = p.s20 = 1.0;  // no ln S0 phase rotation, so steps can be compared directly
    const auto m = make_model(p);
    Complex prev = 1.0;
    double worst = 0.0;
    for (int j = 1; j <= 2000; ++j) {
        const double s = 0.01 * j;
        const double z[2] = {s, 0.7 * s};
        const Complex v = char_function(m, z, 5.0);
        worst = std::max(worst, std::abs(v - prev));
        prev = v;
    }
    CHECK(worst < 0.05);
}

TEST_CASE("SV: the literal printed form is refused") {
    ModelSpec m = make_model(example_sv());
    m.reading = FormReading::printed;
    const double z[2] = {1.0, 1.0};
    CHECK_THROWS_AS((void)char_function(m, z, 1.0), ConfigError);
}

TEST_CASE("SV tube probe accepts the default strip") {
    CHECK_NOTHROW(probe_tube(make_model(example_sv()), 1.0));
}

TEST_CASE("triplet overflow is reported") {
    LevyTriplet tr{{{1.0}}, {0.0}, {}};
    const Complex z[1] = {{0.0, 60.0}};
    ModelSpec m = make_model(tr);
    m.tube_cap = 100.0;
    CHECK_THROWS_AS((void)char_function(m, z, 1.0), OverflowError);
}

TEST_CASE("log moments of GBM") {
    GbmParams g = example_gbm();
    g.s10 = 100.0;
    g.s20 = 80.0;
    const auto mom = log_moments(make_model(g), 2.0);
    CHECK(close(mom.mean[0], std::log(100.0) + (0.1 - 0.02) * 2.0, 1e-7));
    CHECK(close(mom.mean[1], std::log(80.0) + (0.1 - 0.005) * 2.0, 1e-7));
    CHECK(close(mom.stddev[0], 0.2 * std::sqrt(2.0), 1e-6));
    CHECK(close(mom.stddev[1], 0.1 * std::sqrt(2.0), 1e-6));
    const auto c = default_center(make_model(g), 2.0);
    CHECK(close(c[0], mom.mean[0], 1e-12));

    VgParams v;
    v.x10 = 0.3;
    v.x20 = -0.2;
    CHECK(default_center(make_model(v), 1.0) == RealVec{0.3, -0.2});
}

TEST_CASE("model JSON: parse, defaults and round trip") {
    const auto m = model_from_json(R"({"gbm": {"r": 0.1, "rho": 0.5, "sigma1": 0.2, "sigma2": 0.1}})");
    REQUIRE(m.family() == "gbm");
    const auto& g = std::get<GbmParams>(m.params);
    CHECK(g.T == 1.0);
    CHECK(g.sigma2 == 0.1);
    const auto again = model_from_json(model_to_json(m));
    CHECK(model_hash(again) == model_hash(m));
    CHECK(model_hash(m).size() == 16);

    const auto v = model_from_json(R"({"vg": {"a_plus": 2, "a_minus": 3, "lam": 1, "alpha_mix": 0.5}})");
    CHECK(v.family() == "vg");
    const auto t = model_from_json(
        R"({"triplet": {"cov": [[1, 0], [0, 1]], "drift": [0, 0], "jumps": [{"point": [0.5, 0], "mass": 1}]}})");
    CHECK(t.dimension() == 2);
}

TEST_CASE("model JSON: every violation is reported") {
    try {
        (void)model_from_json(R"({"gbm": {"rho": 1.5, "sigma1": -1, "colour": 3}})");
        FAIL("expected a configuration error");
    } catch (const ConfigError& e) {
        const auto& v = e.violations();
        CHECK(v.size() >= 3);
        bool rho = false, key = false;
        for (const auto& s : v) {
            rho = rho || s.find("rho out of [-1,1]") != std::string::npos;
            key = key || s.find("colour") != std::string::npos;
        }
        CHECK(rho);
        CHECK(key);
    }
    CHECK_THROWS_AS((void)model_from_json(R"({"heston": {}})"), ConfigError);
    CHECK_THROWS_AS((void)model_from_json(R"({"gbm": {}, "vg": {}})"), ConfigError);
    CHECK_THROWS_AS((void)model_from_json("not json"), ConfigError);
}
