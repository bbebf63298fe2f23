#include <cardinal/bounds.hpp>
#include <cardinal/errors.hpp>

#include <cmath>
#include <numbers>

#include "testing.hpp"

using namespace cardinal;
using testing::close;

namespace {

constexpr double pi = std::numbers::pi;

double mu_ref(double delta, double xi) { return 1.0 / (pi * std::cosh(delta * xi)); }

double s_ref(double a, double delta) {
    return 2.0 * delta * a * (1.0 / (2.0 * delta) + mu_ref(delta, 2.0 * a) + mu_ref(delta, a));
}

TubeSpec unit_tube(std::size_t n, double delta = 1.0) { return TubeSpec{RealVec(n, delta), 1.0, 1.0}; }

}  // namespace

TEST_CASE("mu, S and their independent re-evaluation") {
    for (double d : {0.3, 1.0, 4.0}) CHECK(close(bound_ingredients(2.0, d).mu(0.0), 1.0 / pi, 1e-16));
    const auto b = bound_ingredients(3.0, 1.0);
    const double want = 6.0 * (0.5 + 1.0 / (pi * std::cosh(6.0)) + 1.0 / (pi * std::cosh(3.0)));
    CHECK(close(b.S, want, 1e-14));
    for (double xi : {0.0, 0.5, 3.0, 40.0, 400.0}) CHECK(close(b.mu(xi), mu_ref(1.0, xi), 1e-15 * mu_ref(1.0, xi)));
    CHECK(close(bound_ingredients(0.7, 2.5).S, s_ref(0.7, 2.5), 1e-14));
}

TEST_CASE("C series: first-term bound and truncation stability") {
    for (double a : {0.5, 2.0, 6.0})
        for (double d : {0.5, 1.0, 2.0}) {
            const auto b = bound_ingredients(a, d);
            for (double xi : {0.0, 0.3, 1.0, 4.0}) {
                const double c = b.C(xi);
                CHECK(c >= 0.0);
                CHECK(c <= b.mu(a + xi) * (1.0 + 1e-15));
                const int n = b.terms_used(xi);
                CHECK(n >= 1);
                CHECK(std::abs(b.C(xi, 2 * n) - b.C(xi, n)) < 1e-15);
            }
        }
}

TEST_CASE("vartheta is even and bounded by S") {
    const auto b = bound_ingredients(3.0, 1.0);
    for (double x : {0.0, 1.0, 10.0, 0.37, 4.4}) {
        const double v = vartheta_eval(3.0, 1.0, x);
        CHECK(std::abs(v) <= b.S);
        CHECK(close(v, vartheta_eval(3.0, 1.0, -x), 1e-13));
    }
    for (double a : {0.5, 1.5, 8.0})
        for (double x = -20.0; x <= 20.0; x += 1.3) CHECK(std::abs(vartheta_eval(a, 0.7, x)) <= bound_ingredients(a, 0.7).S);
}

TEST_CASE("vartheta / (2 delta) approaches the kernel K1 as a grows") {
    auto l1 = [](double a) {
        // both functions are even; a rectangle rule on [0, 15] is enough to rank them
        const double h = 0.05;
        double s = 0.0;
        for (int i = 0; i <= 300; ++i) s += std::abs(kernel_k1(1.0, i * h) - vartheta_eval(a, 1.0, i * h) / 2.0);
        return s * h;
    };
    const double e2 = l1(2.0), e4 = l1(4.0), e6 = l1(6.0);
    CHECK(e4 < e2);
    CHECK(e6 < e4);
    CHECK(close(kernel_k1(1.0, 0.0), 0.5, 1e-16));
}

TEST_CASE("approximation bound compositions") {
    const auto b10 = bound_ingredients(10.0, 1.0);
    const auto best = approximation_bound(BoundMode::best_sup, unit_tube(1), {10.0});
    CHECK(close(best.total, 2.0 * (b10.S / 2.0) * std::exp(-10.0), 1e-15));
    CHECK(close(best.prefactor, 2.0, 1e-15));
    CHECK(best.s_factors.size() == 1);

    TubeSpec t2{{1.0, 0.5}, 3.0, 7.0};
    const auto samp = approximation_bound(BoundMode::sampling_sup, t2, {10.0, 20.0});
    const double chain = 1.0 + 2.0 * 2.834 * 2.834;
    CHECK(close(chain, 17.063112, 1e-6));
    CHECK(close(samp.prefactor, 2.0 * 3.0 * 2.0 * chain, 1e-12));
    CHECK(close(samp.exponential, std::exp(-10.0), 1e-18));
    const auto l1 = approximation_bound(BoundMode::sampling_l1, t2, {10.0, 20.0});
    CHECK(close(l1.total / samp.total, 7.0 / 3.0, 1e-12));
    CHECK(close(samp.total, samp.prefactor * samp.product * samp.exponential, 1e-15 * samp.total));
}

TEST_CASE("bound decreases with the band once the exponential dominates") {
    for (double a = 2.0; a <= 64.0; a *= 2.0) {
        const double t1 = approximation_bound(BoundMode::sampling_sup, unit_tube(1), {a}).total;
        const double t2 = approximation_bound(BoundMode::sampling_sup, unit_tube(1), {2.0 * a}).total;
        CHECK(t2 < t1);
        CHECK(std::isfinite(t1));
        CHECK(t1 > 0.0);
    }
}

TEST_CASE("log-slope of the bound in a delta") {
    // with delta = 1, log(total) = const + log c + log(1/2 + mu(c) + mu(2c)) - c,
    // a slope of -1 + 1/c plus a small correction from the mu terms
    auto lt = [](double c) { return std::log(approximation_bound(BoundMode::best_sup, unit_tube(1), {c}).total); };
    for (double c : {5.0, 10.0, 20.0, 30.0}) {
        const double h = 1e-3;
        const double slope = (lt(c + h) - lt(c - h)) / (2.0 * h);
        auto dmu = [](double xi) { return -std::tanh(xi) / (pi * std::cosh(xi)); };
        const double want =
            -1.0 + 1.0 / c + (dmu(c) + 2.0 * dmu(2.0 * c)) / (0.5 + mu_ref(1.0, c) + mu_ref(1.0, 2.0 * c));
        CHECK(close(slope, want, 1e-6));
        CHECK(slope > -1.0);
    }
    // at and beyond a delta = 20 the slope is within 0.05 of -1
    CHECK((lt(40.0) - lt(20.0)) / 20.0 <= -1.0 + 0.05);
}

TEST_CASE("choose_band contracts") {
    const auto easy = choose_band(10.0, unit_tube(1), BoundMode::best_sup);
    CHECK(close(easy.c, 0.5, 1e-15));

    const auto pick = choose_band(1e-8, unit_tube(1), BoundMode::best_sup);
    const double at = approximation_bound(BoundMode::best_sup, unit_tube(1), pick.a).total;
    const double below = approximation_bound(BoundMode::best_sup, unit_tube(1), {0.99 * pick.a[0]}).total;
    CHECK(at <= 1e-8);
    CHECK(below > 1e-8);
    CHECK(close(pick.bound.total, at, 1e-20));

    const auto half = choose_band(1e-8, unit_tube(1, 0.5), BoundMode::best_sup);
    const double ratio = half.a[0] / pick.a[0];
    CHECK(ratio > 1.8);
    CHECK(ratio < 2.6);

    const auto two = choose_band(1e-6, TubeSpec{{1.0, 0.25}, 2.0, 1.0}, BoundMode::sampling_sup);
    CHECK(close(two.a[0] * 1.0, two.a[1] * 0.25, 1e-12));
    CHECK(two.bound.total <= 1e-6);
}

TEST_CASE("unreachable targets report the best bound") {
    BandSearch s;
    s.c_max = 30.0;
    try {
        (void)choose_band(1e-30, unit_tube(1), BoundMode::best_sup, s);
        FAIL("expected a capacity error");
    } catch (const CapacityError& e) {
        const double best = approximation_bound(BoundMode::best_sup, unit_tube(1), {30.0}).total;
        CHECK(close(e.best_achievable(), best, 1e-25));
    }
    CHECK_THROWS_AS((void)choose_band(0.0, unit_tube(1), BoundMode::best_sup), ConfigError);
}

TEST_CASE("tube validation and mode names") {
    CHECK_THROWS_AS(TubeSpec({-1.0}, 1.0, 1.0).validate(), ConfigError);
    CHECK_THROWS_AS(TubeSpec({1.0}, 0.0, 1.0).validate(), ConfigError);
    for (auto m : {BoundMode::best_sup, BoundMode::best_l1, BoundMode::sampling_sup, BoundMode::sampling_l1})
        CHECK(parse_bound_mode(bound_mode_name(m)) == m);
    CHECK_THROWS_AS((void)parse_bound_mode("nope"), ConfigError);
}
