#include "cardinal/oracles.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <limits>
#include <functional>
#include <numbers>
#include <random>
#include <thread>

#include "cardinal/errors.hpp"

namespace cardinal {

namespace {

constexpr double pi = std::numbers::pi;
constexpr std::size_t kBlock = 1 << 15;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

struct Moments {
    double n = 0.0, mean = 0.0, m2 = 0.0;

    void add(double x) {
        n += 1.0;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    void merge(const Moments& o) {
        if (o.n == 0.0) return;
        const double tot = n + o.n, d = o.mean - mean;
        mean += d * o.n / tot;
        m2 += o.m2 + d * d * n * o.n / tot;
        n = tot;
    }
};

// Runs block(b, rng, count) for every block, each block seeded from
// (seed, b) alone, and merges in block order.
McResult run_blocks(std::size_t paths, std::uint64_t seed,
                    const std::function<void(std::mt19937_64&, std::size_t, Moments&)>& block) {
    const std::size_t blocks = (paths + kBlock - 1) / kBlock;
    std::vector<Moments> parts(blocks);
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), blocks));
    auto work = [&](unsigned w) {
        for (std::size_t b = w; b < blocks; b += workers) {
            std::mt19937_64 rng(splitmix64(seed ^ splitmix64(b + 1)));
            const std::size_t count = std::min(kBlock, paths - b * kBlock);
            block(rng, count, parts[b]);
        }
    };
    if (workers <= 1) work(0);
    else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    Moments total;
    for (const auto& p : parts) total.merge(p);
    McResult out;
    out.estimate = total.mean;
    out.standard_error = total.n > 1.0 ? std::sqrt(total.m2 / (total.n - 1.0) / total.n) : 0.0;
    out.paths = paths;
    out.seed = seed;
    return out;
}

void require_paths(std::size_t paths) {
    if (paths < 10000) throw ConfigError("Monte Carlo needs at least 1e4 paths");
}

double gamma_or_zero(std::mt19937_64& rng, double shape, double rate) {
    if (shape <= 0.0) return 0.0;
    return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

}  // namespace

double gaussian_log_density(const GbmParams& g, std::span<const double> x, FormReading reading) {
    const double T = g.T;
    const double m1 = std::log(g.s10) + (g.r - 0.5 * g.sigma1 * g.sigma1) * T;
    const double m2 = std::log(g.s20) + (g.r - 0.5 * g.sigma2 * g.sigma2) * T;
    const double c11 = g.sigma1 * g.sigma1 * T, c22 = g.sigma2 * g.sigma2 * T;
    const double c12 = (reading == FormReading::printed ? g.sigma1 * g.sigma1 * g.sigma2 * g.sigma2 * g.rho
                                                        : g.rho * g.sigma1 * g.sigma2) *
                       T;
    const double det = c11 * c22 - c12 * c12;
    const double d1 = x[0] - m1, d2 = x[1] - m2;
    const double q = (c22 * d1 * d1 - 2.0 * c12 * d1 * d2 + c11 * d2 * d2) / det;
    return std::exp(-0.5 * q) / (2.0 * pi * std::sqrt(det));
}

McResult mc_gbm_spread(const GbmParams& g, double K, std::size_t paths, std::uint64_t seed) {
    require_paths(paths);
    const double T = g.T, sq = std::sqrt(T), disc = std::exp(-g.r * T);
    const double m1 = std::log(g.s10) + (g.r - 0.5 * g.sigma1 * g.sigma1) * T;
    const double m2 = std::log(g.s20) + (g.r - 0.5 * g.sigma2 * g.sigma2) * T;
    const double rho = g.rho, rc = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    return run_blocks(paths, seed, [&](std::mt19937_64& rng, std::size_t count, Moments& acc) {
        std::normal_distribution<double> nd;
        for (std::size_t i = 0; i < count; ++i) {
            const double z1 = nd(rng), z2 = rho * z1 + rc * nd(rng);
            const double s1 = std::exp(m1 + g.sigma1 * sq * z1);
            const double s2 = std::exp(m2 + g.sigma2 * sq * z2);
            acc.add(disc * std::max(0.0, s1 - s2 - K));
        }
    });
}

TerminalSample sample_vg_terminal(const VgParams& vg, std::size_t paths, std::uint64_t seed) {
    TerminalSample out;
    out.x1.resize(paths);
    out.x2.resize(paths);
    const double own = (1.0 - vg.alpha_mix) * vg.lam * vg.T, common = vg.alpha_mix * vg.lam * vg.T;
    const std::size_t blocks = (paths + kBlock - 1) / kBlock;
    for (std::size_t b = 0; b < blocks; ++b) {
        std::mt19937_64 rng(splitmix64(seed ^ splitmix64(b + 1)));
        const std::size_t count = std::min(kBlock, paths - b * kBlock);
        for (std::size_t i = 0; i < count; ++i) {
            const double y1 = gamma_or_zero(rng, own, vg.a_plus) - gamma_or_zero(rng, own, vg.a_minus);
            const double y2 = gamma_or_zero(rng, own, vg.a_plus) - gamma_or_zero(rng, own, vg.a_minus);
            const double y3 = gamma_or_zero(rng, common, vg.a_plus) - gamma_or_zero(rng, common, vg.a_minus);
            out.x1[b * kBlock + i] = vg.x10 + y1 + y3;
            out.x2[b * kBlock + i] = vg.x20 + y2 + y3;
        }
    }
    return out;
}

McResult mc_vg_spread(const VgParams& vg, double K, std::size_t paths, std::uint64_t seed, double s10, double s20,
                      double r) {
    require_paths(paths);
    const double own = (1.0 - vg.alpha_mix) * vg.lam * vg.T, common = vg.alpha_mix * vg.lam * vg.T;
    const double disc = std::exp(-r * vg.T);
    return run_blocks(paths, seed, [&](std::mt19937_64& rng, std::size_t count, Moments& acc) {
        for (std::size_t i = 0; i < count; ++i) {
            const double y1 = gamma_or_zero(rng, own, vg.a_plus) - gamma_or_zero(rng, own, vg.a_minus);
            const double y2 = gamma_or_zero(rng, own, vg.a_plus) - gamma_or_zero(rng, own, vg.a_minus);
            const double y3 = gamma_or_zero(rng, common, vg.a_plus) - gamma_or_zero(rng, common, vg.a_minus);
            const double s1 = s10 * std::exp(y1 + y3), s2 = s20 * std::exp(y2 + y3);
            acc.add(disc * std::max(0.0, s1 - s2 - K));
        }
    });
}

McResult mc_sv_spread(const SvParams& p, double K, std::size_t paths, std::uint64_t seed, int steps_per_year) {
    require_paths(paths);
    const int steps = std::max(1, static_cast<int>(std::ceil(steps_per_year * p.T)));
    const double dt = p.T / steps, sdt = std::sqrt(dt), disc = std::exp(-p.r * p.T);
    // Cholesky factor of corr(W1, W2, Wv)
    const double l11 = 1.0;
    const double l21 = p.rho, l22 = std::sqrt(1.0 - p.rho * p.rho);
    const double l31 = p.rho1, l32 = (p.rho2 - p.rho * p.rho1) / l22;
    const double l33sq = 1.0 - l31 * l31 - l32 * l32;
    if (!(l33sq > 0.0)) throw ConfigError("SV correlations (rho, rho1, rho2) are not positive definite");
    const double l33 = std::sqrt(l33sq);
    return run_blocks(paths, seed, [&](std::mt19937_64& rng, std::size_t count, Moments& acc) {
        std::normal_distribution<double> nd;
        for (std::size_t i = 0; i < count; ++i) {
            double x1 = std::log(p.s10), x2 = std::log(p.s20), v = p.v0;
            for (int s = 0; s < steps; ++s) {
                const double e1 = nd(rng), e2 = nd(rng), e3 = nd(rng);
                const double w1 = l11 * e1, w2 = l21 * e1 + l22 * e2, wv = l31 * e1 + l32 * e2 + l33 * e3;
                const double vp = std::max(v, 0.0), sv = std::sqrt(vp);
                x1 += (p.r - p.delta1 - 0.5 * p.sigma1 * p.sigma1 * vp) * dt + p.sigma1 * sv * sdt * w1;
                x2 += (p.r - p.delta2 - 0.5 * p.sigma2 * p.sigma2 * vp) * dt + p.sigma2 * sv * sdt * w2;
                v += p.kappa * (p.mu - vp) * dt + p.sigma_v * sv * sdt * wv;
            }
            acc.add(disc * std::max(0.0, std::exp(x1) - std::exp(x2) - K));
        }
    });
}

std::vector<double> quadrature_inversion(const ModelSpec& model, double T, const std::vector<RealVec>& xs,
                                         double box_radius, std::size_t points_per_axis) {
    const std::size_t n = model.dimension();
    const std::size_t N = points_per_axis;
    if (N < 3 || !(box_radius > 0.0)) throw ConfigError("quadrature inversion needs R > 0 and at least 3 points");
    for (const auto& x : xs)
        if (x.size() != n) throw ConfigError("quadrature inversion: point dimension does not match the model");
    const double h = 2.0 * box_radius / (N - 1);
    std::vector<double> nodes(N), weights(N, h);
    for (std::size_t j = 0; j < N; ++j) nodes[j] = -box_radius + j * h;
    weights.front() = weights.back() = 0.5 * h;

    std::size_t total = 1;
    for (std::size_t k = 0; k < n; ++k) total *= N;

    // boundary check: every node of every face for n <= 2, a strided subset beyond
    const std::size_t stride = n <= 2 ? 1 : std::max<std::size_t>(1, N / 16);
    std::vector<double> z(n);
    double boundary = 0.0;
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        bool face = false, on_stride = true;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t j = rest % N;
            rest /= N;
            z[k] = nodes[j];
            if (j == 0 || j == N - 1) face = true;
            else if (j % stride) on_stride = false;
        }
        if (!face || !on_stride) continue;
        boundary = std::max(boundary, std::abs(char_function(model, std::span<const double>(z), T)));
    }
    if (!(boundary < 1e-12))
    {
        std::ostringstream msg;
        msg << "quadrature box too small: |Phi| on the boundary reaches " << std::scientific << boundary;
        throw BoxTooSmallError(msg.str());
    }

    const std::size_t P = xs.size();
    // per-axis phases e^{-i z_j x_k} for each point
    std::vector<std::vector<Complex>> phase(P * n, std::vector<Complex>(N));
    for (std::size_t p = 0; p < P; ++p)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < N; ++j) phase[p * n + k][j] = std::polar(1.0, -nodes[j] * xs[p][k]);
    std::vector<Complex> acc(P, Complex{0.0, 0.0});
    std::vector<std::size_t> idx(n);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        double w = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            idx[k] = rest % N;
            rest /= N;
            z[k] = nodes[idx[k]];
            w *= weights[idx[k]];
        }
        const Complex phi = w * char_function(model, std::span<const double>(z), T);
        for (std::size_t p = 0; p < P; ++p) {
            Complex term = phi;
            for (std::size_t k = 0; k < n; ++k) term *= phase[p * n + k][idx[k]];
            acc[p] += term;
        }
    }
    std::vector<double> out(P);
    const double scale = std::pow(2.0 * pi, -static_cast<double>(n));
    for (std::size_t p = 0; p < P; ++p) out[p] = scale * acc[p].real();
    return out;
}

double quadrature_inversion(const ModelSpec& model, double T, std::span<const double> x, double box_radius,
                            std::size_t points_per_axis) {
    const std::vector<RealVec> one{RealVec(x.begin(), x.end())};
    return quadrature_inversion(model, T, one, box_radius, points_per_axis).front();
}

double bilateral_gamma_density(double nu, double ap, double am, double y) {
    if (!(nu > 0.0)) throw DomainError("bilateral gamma shape must be positive", 0);
    const double ay = std::abs(y);
    const double order = nu - 0.5;
    const double arg = 0.5 * (ap + am) * ay;
    const double logc = nu * std::log(ap * am) - 0.5 * std::log(pi) - std::lgamma(nu) - order * std::log(ap + am);
    if (ay == 0.0) {
        if (nu < 0.5) return std::numeric_limits<double>::infinity();
        if (nu == 0.5) return std::numeric_limits<double>::infinity();
        // |y|^{nu - 1/2} K_{nu - 1/2}(c |y|) -> Gamma(nu - 1/2) 2^{nu - 3/2} c^{1/2 - nu}
        const double c = 0.5 * (ap + am);
        return std::exp(logc + std::lgamma(order) + (order - 1.0) * std::log(2.0) - order * std::log(c));
    }
    if (arg > 700.0) return 0.0;
    const double base = logc + order * std::log(ay) + 0.5 * (am - ap) * y;
    try {
        return std::exp(base) * boost::math::cyl_bessel_k(order, arg);
    } catch (const std::overflow_error&) {
        // K overflows only for tiny arguments, where its leading term is exact to
        // many digits: K_mu(z) ~ Gamma(mu) / 2 * (2 / z)^mu
        const double mu = std::abs(order);
        return std::exp(base + std::lgamma(mu) - std::log(2.0) + mu * std::log(2.0 / arg));
    }
}

double vg_conditional_density(const VgParams& vg, double T, std::span<const double> x, double tolerance) {
    const double own = (1.0 - vg.alpha_mix) * vg.lam * T, common = vg.alpha_mix * vg.lam * T;
    const double y1 = x[0] - vg.x10, y2 = x[1] - vg.x20;
    if (own <= 0.0) throw DomainError("VG with alpha_mix = 1 has no joint density", 0);
    auto f = [&](double nu, double y) { return bilateral_gamma_density(nu, vg.a_plus, vg.a_minus, y); };
    if (common <= 0.0) return f(own, y1) * f(own, y2);

    auto integrand = [&](double s) {
        const double v = f(common, s) * f(own, y1 - s) * f(own, y2 - s);
        return std::isfinite(v) ? v : 0.0;
    };
    std::vector<double> cuts{0.0, y1, y2};
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    boost::math::quadrature::tanh_sinh<double> ts(15);
    boost::math::quadrature::exp_sinh<double> es(9);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += ts.integrate(integrand, cuts[i], cuts[i + 1], tolerance);
    const double right = cuts.back(), left = cuts.front();
    total += es.integrate([&](double t) { return integrand(right + t); }, tolerance);
    total += es.integrate([&](double t) { return integrand(left - t); }, tolerance);
    return total;
}

}  // namespace cardinal
