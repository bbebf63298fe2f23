#include "cardinal/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cardinal/errors.hpp"
#include "cardinal/quadrature.hpp"
#include <nlohmann/json.hpp>

namespace cardinal {

namespace {

constexpr double pi = std::numbers::pi;
constexpr Complex I{0.0, 1.0};

// out[m + M] = exp(-i theta m) for m in [-M, M]; resynchronised every 64
// steps so the recurrence error stays at a few ulps.
void fill_phases(double theta, int M, Complex* out) {
    const Complex step = std::polar(1.0, -theta);
    Complex cur = std::polar(1.0, theta * M);
    for (int m = -M; m <= M; ++m) {
        if ((m + M) % 64 == 0) cur = std::polar(1.0, -theta * m);
        out[m + M] = cur;
        cur *= step;
    }
}

// 1 / (2 cosh u) evaluated without forming cosh.
double half_sech(double u) {
    const double e = std::exp(-std::abs(u));
    return e / (1.0 + e * e);
}

Complex centered_spectrum(const ModelSpec& model, const RealVec& alpha, const RealVec& x0, double T,
                          std::span<const Complex> w) {
    const std::size_t n = w.size();
    ComplexVec up(n), dn(n);
    Complex phase_up{0.0, 0.0}, phase_dn{0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
        up[k] = w[k] + I * alpha[k];
        dn[k] = w[k] - I * alpha[k];
        phase_up += up[k] * x0[k];
        phase_dn += dn[k] * x0[k];
    }
    const Complex a = char_function(model, std::span<const Complex>(up), T) * std::exp(-I * phase_up);
    const Complex b = char_function(model, std::span<const Complex>(dn), T) * std::exp(-I * phase_dn);
    return a + b;
}

double support_radius(const Window& w) { return window_support(w); }

double coverage_radius(const Window& w) {
    const double p = window_plateau(w);
    return p > 0.0 ? p : window_support(w);
}

}  // namespace

Complex symmetrized_spectrum(const ModelSpec& model, const ContourShift& shift, double T, std::span<const double> z) {
    const std::size_t n = model.dimension();
    if (z.size() != n || shift.alpha.size() != n)
        throw ConfigError("symmetrized_spectrum: argument, shift and model dimensions differ");
    ComplexVec w(z.begin(), z.end());
    return centered_spectrum(model, shift.alpha, RealVec(n, 0.0), T, w);
}

double DensityApproximant::prefactor(std::span<const double> y) const {
    double dot = 0.0, w = 1.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        dot += shift_.alpha[k] * y[k];
        w *= window_eval(axes_[k], y[k]) / (2.0 * plan_.a[k]);
    }
    return w * half_sech(dot);
}

void DensityApproximant::prepare_dense() {
    extent_ = table_.max_abs_index();
    dense_.clear();
    if (dimension() != 2 || table_.size() == 0) return;
    const std::size_t w1 = 2 * extent_[0] + 1, w2 = 2 * extent_[1] + 1;
    if (w1 * w2 > 60'000'000) return;
    dense_.assign(w1 * w2, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < table_.size(); ++i) {
        auto m = table_.index(i);
        dense_[(m[0] + extent_[0]) * w2 + (m[1] + extent_[1])] = table_.values[i];
    }
}

DensityValue DensityApproximant::eval(std::span<const double> x) const {
    const std::size_t n = dimension();
    if (x.size() != n) throw ConfigError("density_eval: point dimension does not match the approximant");
    DensityValue out;
    RealVec y(n);
    for (std::size_t k = 0; k < n; ++k) {
        y[k] = x[k] - x0_[k];
        if (std::abs(y[k]) >= support_radius(axes_[k])) {
            out.structural_zero = true;
            return out;
        }
    }
    const double w = prefactor(y);
    if (w == 0.0) {
        out.structural_zero = true;
        return out;
    }
    std::vector<ComplexVec> ph(n);
    for (std::size_t k = 0; k < n; ++k) {
        ph[k].resize(2 * extent_[k] + 1);
        fill_phases(pi * y[k] / plan_.a[k], extent_[k], ph[k].data());
    }
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < table_.size(); ++i) {
        auto m = table_.index(i);
        Complex term = table_.values[i];
        for (std::size_t k = 0; k < n; ++k) term *= ph[k][m[k] + extent_[k]];
        s += term;
    }
    out.value = w * s.real();
    out.imag_residue = std::abs(w * s.imag());
    out.imag_warning = out.imag_residue > 1e-6;
    return out;
}

std::vector<double> DensityApproximant::eval_grid(std::span<const double> xs1, std::span<const double> xs2,
                                                  double* max_imag) const {
    if (dimension() != 2) throw ConfigError("eval_grid needs a two-dimensional approximant");
    const std::size_t n1 = xs1.size(), n2 = xs2.size();
    std::vector<double> out(n1 * n2, 0.0);
    if (max_imag) *max_imag = 0.0;
    if (table_.size() == 0) return out;
    if (dense_.empty()) {
        for (std::size_t j = 0; j < n2; ++j)
            for (std::size_t i = 0; i < n1; ++i) {
                const double x[2] = {xs1[i], xs2[j]};
                const DensityValue v = eval(x);
                out[j * n1 + i] = v.value;
                if (max_imag) *max_imag = std::max(*max_imag, v.imag_residue);
            }
        return out;
    }
    const int M1 = extent_[0], M2 = extent_[1];
    const std::size_t w1 = 2 * M1 + 1, w2 = 2 * M2 + 1;
    const double r1 = support_radius(axes_[0]), r2 = support_radius(axes_[1]);
    ComplexVec ph1(n1 * w1);
    for (std::size_t i = 0; i < n1; ++i) fill_phases(pi * (xs1[i] - x0_[0]) / plan_.a[0], M1, ph1.data() + i * w1);
    std::vector<double> imag(n2, 0.0);
    parallel_for(n2, 0, [&](std::size_t lo, std::size_t hi) {
        ComplexVec ph2(w2), row(w1);
        for (std::size_t j = lo; j < hi; ++j) {
            const double y2 = xs2[j] - x0_[1];
            if (std::abs(y2) >= r2) continue;
            fill_phases(pi * y2 / plan_.a[1], M2, ph2.data());
            for (std::size_t m1 = 0; m1 < w1; ++m1) {
                const Complex* c = dense_.data() + m1 * w2;
                Complex acc{0.0, 0.0};
                for (std::size_t m2 = 0; m2 < w2; ++m2) acc += c[m2] * ph2[m2];
                row[m1] = acc;
            }
            for (std::size_t i = 0; i < n1; ++i) {
                const double y1 = xs1[i] - x0_[0];
                if (std::abs(y1) >= r1) continue;
                const double y[2] = {y1, y2};
                const double w = prefactor(y);
                if (w == 0.0) continue;
                const Complex* p = ph1.data() + i * w1;
                Complex acc{0.0, 0.0};
                for (std::size_t m1 = 0; m1 < w1; ++m1) acc += row[m1] * p[m1];
                out[j * n1 + i] = w * acc.real();
                imag[j] = std::max(imag[j], std::abs(w * acc.imag()));
            }
        }
    });
    if (max_imag) *max_imag = *std::max_element(imag.begin(), imag.end());
    return out;
}

std::string DensityApproximant::header_json() const {
    nlohmann::json h;
    h["model_hash"] = model_hash(model_);
    h["model"] = nlohmann::json::parse(model_to_json(model_));
    h["T"] = T_;
    h["a"] = plan_.a;
    h["alpha"] = shift_.alpha;
    h["x0"] = x0_;
    h["window"] = window_.kind == WindowKind::trapezoid ? "trapezoid" : "smooth";
    h["retained"] = table_.size();
    h["dropped_mass"] = table_.dropped_mass();
    h["budget"] = {{"analytic_M", budget_.analytic_M}, {"analytic_L", budget_.analytic_L},
                   {"tail", budget_.tail},             {"M", budget_.M},
                   {"L", budget_.L},                   {"width", budget_.width}};
    return h.dump();
}

std::string DensityApproximant::to_json() const {
    nlohmann::json doc;
    doc["header"] = nlohmann::json::parse(header_json());
    SamplingPlan p = plan_;
    p.x0 = x0_;
    doc["table"] = nlohmann::json::parse(table_to_json(table_, p));
    return doc.dump();
}

namespace {

// Checks sum c_m J_m(z) against the quadrature transform of the windowed
// Fourier series at a few random z; returns the worst relative mismatch.
double verify_closed_form(const CoefficientTable& table, const std::vector<Window>& axes, const RealVec& a,
                          const std::vector<int>& extent) {
    const std::size_t n = a.size();
    std::mt19937_64 rng(0x5eed2026ull);
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        RealVec z(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double zmax = extent[k] > 0 ? 0.5 * pi * extent[k] / a[k] : 1.0;
            z[k] = std::uniform_real_distribution<double>(-zmax, zmax)(rng);
        }
        std::vector<ComplexVec> tk(n);
        for (std::size_t k = 0; k < n; ++k) {
            const int M = extent[k];
            const double r = window_support(axes[k]);
            const double omega = pi * M / a[k] + std::abs(z[k]) + 1.0;
            const std::size_t panels = static_cast<std::size_t>(std::ceil(omega * r / pi)) + 1;
            std::vector<double> breaks;
            for (std::size_t j = 0; j <= 2 * panels; ++j) breaks.push_back(-r + r * j / panels);
            const double p = window_plateau(axes[k]);
            if (p > 0.0) {
                breaks.push_back(-p);
                breaks.push_back(p);
                std::sort(breaks.begin(), breaks.end());
            }
            const QuadratureRule rule = composite_gauss_legendre(breaks, 16);
            tk[k].assign(2 * M + 1, Complex{0.0, 0.0});
            ComplexVec ph(2 * M + 1);
            for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
                const double y = rule.nodes[j];
                const double lam = window_eval(axes[k], y);
                if (lam == 0.0) continue;
                const Complex base = rule.weights[j] * lam * std::polar(1.0, z[k] * y) / (2.0 * a[k]);
                fill_phases(pi * y / a[k], M, ph.data());
                for (int m = 0; m <= 2 * M; ++m) tk[k][m] += base * ph[m];
            }
        }
        Complex direct{0.0, 0.0}, quad{0.0, 0.0};
        for (std::size_t i = 0; i < table.size(); ++i) {
            auto m = table.index(i);
            Complex q = table.values[i];
            double j = 1.0;
            for (std::size_t k = 0; k < n; ++k) {
                q *= tk[k][m[k] + extent[k]];
                j *= cardinal_axis(axes[k], m[k], z[k]);
            }
            quad += q;
            direct += table.values[i] * j;
        }
        worst = std::max(worst, std::abs(direct - quad) / std::max(1.0, std::abs(direct)));
    }
    return worst;
}

ErrorBudget compute_budget(const ModelSpec& model, const RealVec& alpha, const RealVec& x0, double T,
                           const SamplingPlan& plan, const std::vector<Window>& axes, const CoefficientTable& table,
                           const std::vector<int>& extent) {
    const std::size_t n = plan.dimension();
    const RealVec tube = analyticity_tube(model);
    double cell = 1.0, volume = 1.0, kernel_l1 = 1.0;
    RealVec l1(n), edge(n);
    for (std::size_t k = 0; k < n; ++k) {
        cell *= pi / plan.a[k];
        edge[k] = pi * (extent[k] + 0.5) / plan.a[k];
        volume *= 2.0 * edge[k];
        l1[k] = cardinal_l1(axes[k]);
        kernel_l1 *= l1[k];
    }
    double leak = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        auto m = table.index(i);
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double zeta = pi * m[k] / plan.a[k];
            const double a2 = plan.a[k] * plan.a[k];
            double term = 4.0 / (a2 * (edge[k] - zeta)) + 4.0 / (a2 * (edge[k] + zeta));
            for (std::size_t j = 0; j < n; ++j)
                if (j != k) term *= l1[j];
            s += term;
        }
        leak += std::abs(table.values[i]) * s;
    }
    const double dropped = table.dropped_mass();
    const double norm = 0.5 * std::pow(2.0 * pi, -static_cast<double>(n));

    const std::size_t stride = std::max<std::size_t>(1, table.size() / 20000);
    std::vector<std::size_t> subset;
    for (std::size_t i = 0; i < table.size(); i += stride) subset.push_back(i);

    std::size_t patterns = 1;
    for (std::size_t k = 0; k < n; ++k) patterns *= 3;

    ErrorBudget best;
    bool have = false;
    ComplexVec w(n);
    RealVec half(n);
    for (std::size_t k = 0; k < n; ++k) half[k] = 0.5 * plan.a[k];
    for (double f : {0.0125, 0.025, 0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 0.9, 0.95}) {
        RealVec width(n);
        for (std::size_t k = 0; k < n; ++k) width[k] = f * (tube[k] - alpha[k]);
        double mmax = 0.0, lmax = 0.0;
        bool finite = true;
        for (std::size_t pat = 0; pat < patterns && finite; ++pat) {
            std::size_t rest = pat;
            RealVec sign(n);
            for (std::size_t k = 0; k < n; ++k) {
                sign[k] = static_cast<double>(rest % 3) - 1.0;
                rest /= 3;
            }
            double sum = 0.0;
            for (std::size_t i : subset) {
                auto m = table.index(i);
                for (std::size_t k = 0; k < n; ++k) w[k] = Complex{m[k] * pi / plan.a[k], sign[k] * width[k]};
                double v;
                try {
                    v = std::abs(centered_spectrum(model, alpha, x0, T, w));
                } catch (const Error&) {
                    finite = false;
                    break;
                }
                if (!std::isfinite(v)) {
                    finite = false;
                    break;
                }
                mmax = std::max(mmax, v);
                sum += v;
            }
            lmax = std::max(lmax, cell * stride * sum);
        }
        if (!finite) continue;
        TubeSpec spec{width, 1.1 * mmax, 1.1 * (lmax + cell * dropped)};
        if (!(spec.M > 0.0)) continue;
        const double bm = approximation_bound(BoundMode::sampling_sup, spec, half).total;
        const double bl = approximation_bound(BoundMode::sampling_l1, spec, half).total;
        ErrorBudget cand;
        cand.M = spec.M;
        cand.L = spec.L;
        cand.width = width;
        cand.volume = volume;
        cand.kernel_leak = leak;
        cand.analytic_M = norm * (volume * bm + dropped * (cell + kernel_l1) + leak);
        cand.analytic_L = norm * (bl + dropped * kernel_l1);
        if (!std::isfinite(cand.analytic())) continue;
        if (!have || cand.analytic() < best.analytic()) {
            best = cand;
            have = true;
        }
    }
    if (!have) throw NumericError("error budget: spectrum is not finite on any trial strip");
    double inv = 0.5;
    for (std::size_t k = 0; k < n; ++k) inv /= 2.0 * plan.a[k];
    best.tail = inv * dropped;
    return best;
}

}  // namespace

DensityApproximant build_density_approximant(const ModelSpec& model, const SamplingPlan& plan, const WindowSpec& window,
                                             const ContourShift& shift, double T, const BuildOptions& options) {
    model.validate();
    plan.validate();
    const std::size_t n = model.dimension();
    std::vector<std::string> bad;
    if (plan.dimension() != n) bad.push_back("plan dimension does not match the model");
    if (window.dimension() != plan.dimension()) bad.push_back("window dimension does not match the plan");
    else
        for (std::size_t k = 0; k < window.dimension(); ++k)
            if (std::abs(window.a[k] - plan.a[k]) > 1e-12 * plan.a[k])
                bad.push_back("window band a[" + std::to_string(k) + "] does not match the plan");
    if (shift.alpha.size() != n) bad.push_back("contour shift dimension does not match the model");
    if (!(T > 0.0)) bad.push_back("maturity must be positive");
    if (!bad.empty()) throw ConfigError(std::move(bad));

    const RealVec tube = analyticity_tube(model);
    for (std::size_t k = 0; k < n; ++k) {
        if (!(shift.alpha[k] >= 0.0) || !(shift.alpha[k] < tube[k])) {
            std::ostringstream msg;
            msg << "alpha[" << k << "] = " << shift.alpha[k] << " must satisfy 0 <= alpha < delta = " << tube[k]
                << " (contour shift outside the analyticity tube)";
            bad.push_back(msg.str());
        }
    }
    if (!bad.empty()) throw ConfigError(std::move(bad));
    if (std::holds_alternative<SvParams>(model.params)) probe_tube(model, T);

    DensityApproximant out;
    out.model_ = model;
    out.T_ = T;
    out.plan_ = plan;
    out.window_ = window;
    out.shift_ = shift;
    out.axes_ = window.axes();
    out.x0_ = plan.x0.empty() ? default_center(model, T) : plan.x0;
    out.plan_.x0 = out.x0_;

    if (options.coverage_sigmas > 0.0 && !options.spectrum_override) {
        const LogMoments mom = log_moments(model, T);
        for (std::size_t k = 0; k < n; ++k) {
            const double need = options.coverage_sigmas * mom.stddev[k] + std::abs(out.x0_[k] - mom.mean[k]);
            const double have = coverage_radius(out.axes_[k]);
            if (have < need) {
                std::ostringstream msg;
                msg << "coordinate " << k << ": window plateau radius " << have << " does not cover "
                    << options.coverage_sigmas << " standard deviations around the centre (needs " << need << ")";
                bad.push_back(msg.str());
            }
        }
        if (!bad.empty()) throw ConfigError(std::move(bad));
    }

    SampledFunction f = options.spectrum_override;
    if (!f) {
        const RealVec alpha = shift.alpha, x0 = out.x0_;
        f = [&model, alpha, x0, T](std::span<const double> z) {
            ComplexVec w(z.begin(), z.end());
            return centered_spectrum(model, alpha, x0, T, w);
        };
    }
    SampleOptions so;
    so.hermitian = true;
    so.threads = options.threads;
    out.table_ = sample_coefficients(f, out.plan_, so);
    out.tail_ = tail_estimate(out.table_, out.plan_);
    out.prepare_dense();

    if (options.verify_closed_form && out.table_.size() > 0) {
        out.verification_error_ = verify_closed_form(out.table_, out.axes_, plan.a, out.extent_);
        if (!(out.verification_error_ <= 1e-8)) {
            std::ostringstream msg;
            msg << "closed-form evaluation disagrees with quadrature of the cardinal series (relative error "
                << out.verification_error_ << ")";
            throw NumericError(msg.str());
        }
    }
    if (options.compute_budget && out.table_.size() > 0 && !options.spectrum_override)
        out.budget_ = compute_budget(model, shift.alpha, out.x0_, T, out.plan_, out.axes_, out.table_, out.extent_);
    return out;
}

DensityValue density_eval(const DensityApproximant& approx, std::span<const double> x) { return approx.eval(x); }

namespace {

QuadratureRule axis_rule(const DensityApproximant& approx, std::size_t k, std::size_t points) {
    const Window w = approx.window().axis(k);
    const double r = window_support(w), p = window_plateau(w);
    const double c = approx.center()[k];
    const std::size_t per_side = std::max<std::size_t>(1, points / 32);
    std::vector<double> extra;
    if (p > 0.0) extra = {c - p, c + p};
    return composite_gauss_legendre(graded_breaks(c, r, per_side, extra), 16);
}

}  // namespace

double integrate_against(const DensityApproximant& approx, std::size_t points_per_axis,
                         const std::function<double(double, double)>& g) {
    if (approx.dimension() != 2) throw ConfigError("integrate_against needs a two-dimensional approximant");
    const QuadratureRule q1 = axis_rule(approx, 0, points_per_axis), q2 = axis_rule(approx, 1, points_per_axis);
    const std::vector<double> vals = approx.eval_grid(q1.nodes, q2.nodes);
    double s = 0.0;
    for (std::size_t j = 0; j < q2.nodes.size(); ++j) {
        double row = 0.0;
        for (std::size_t i = 0; i < q1.nodes.size(); ++i)
            row += q1.weights[i] * g(q1.nodes[i], q2.nodes[j]) * vals[j * q1.nodes.size() + i];
        s += q2.weights[j] * row;
    }
    return s;
}

double mass_check(const DensityApproximant& approx, std::size_t quadrature_points_per_axis) {
    const std::size_t pts = std::max<std::size_t>(quadrature_points_per_axis, 32);
    const std::size_t n = approx.dimension();
    if (approx.table().size() == 0) return 0.0;
    if (n == 2) return integrate_against(approx, pts, [](double, double) { return 1.0; });
    std::vector<QuadratureRule> rules;
    std::size_t total = 1;
    for (std::size_t k = 0; k < n; ++k) {
        rules.push_back(axis_rule(approx, k, pts));
        total *= rules.back().nodes.size();
    }
    double s = 0.0;
    RealVec x(n);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        double w = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t j = rest % rules[k].nodes.size();
            rest /= rules[k].nodes.size();
            x[k] = rules[k].nodes[j];
            w *= rules[k].weights[j];
        }
        s += w * approx.eval(x).value;
    }
    return s;
}

}  // namespace cardinal
