#include "cardinal/models.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "cardinal/errors.hpp"
#include <nlohmann/json.hpp>

namespace cardinal {

namespace {

using json = nlohmann::json;
constexpr Complex I{0.0, 1.0};

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(std::vector<std::string>& out, bool ok, const std::string& msg) {
    if (!ok) out.push_back(msg);
}

bool finite_all(std::initializer_list<double> xs) {
    for (double x : xs)
        if (!std::isfinite(x)) return false;
    return true;
}

// ---------------------------------------------------------------- GBM

Complex gbm_cf(const GbmParams& p, FormReading reading, std::span<const Complex> z, double t) {
    const double s1 = p.sigma1, s2 = p.sigma2;
    const double c12 = reading == FormReading::printed ? s1 * s1 * s2 * s2 * p.rho : p.rho * s1 * s2;
    const double m1 = std::log(p.s10) + (p.r - 0.5 * s1 * s1) * t;
    const double m2 = std::log(p.s20) + (p.r - 0.5 * s2 * s2) * t;
    const Complex quad = s1 * s1 * z[0] * z[0] + 2.0 * c12 * z[0] * z[1] + s2 * s2 * z[1] * z[1];
    return std::exp(I * (z[0] * m1 + z[1] * m2) - 0.5 * t * quad);
}

// ---------------------------------------------------------------- SV

struct SvPieces {
    Complex b;  // coefficient of v0
    Complex e;  // 2 log(D / (2 theta)) + (theta - gamma) t, principal log
};

SvPieces sv_pieces(const SvParams& p, Complex u1, Complex u2, double t) {
    const double s1 = p.sigma1, s2 = p.sigma2, sv = p.sigma_v;
    const Complex omega = -0.5 * ((s1 * s1 * u1 * u1 + s2 * s2 * u2 * u2 + 2.0 * p.rho * s1 * s2 * u1 * u2) +
                                  I * (s1 * s1 * u1 + s2 * s2 * u2));
    const Complex gamma = p.kappa - I * (p.rho1 * s1 * u1 + p.rho2 * s2 * u2) * sv;
    const Complex theta = std::sqrt(gamma * gamma - 2.0 * sv * sv * omega);
    const Complex decay = std::exp(-theta * t);
    const Complex d = theta + gamma + (theta - gamma) * decay;
    SvPieces out;
    out.b = 2.0 * omega * (1.0 - decay) / d;
    out.e = 2.0 * std::log(d / (2.0 * theta)) + (theta - gamma) * t;
    return out;
}

// The e-term is single valued up to multiples of 4 pi i (it is even in theta
// modulo that lattice), so continuity along s -> s z from the origin, where
// it vanishes, fixes the branch.  When 2 kappa mu / sigma_v^2 is an integer
// the ambiguity drops out of exp(...) and no tracking is needed.
Complex sv_tracked_e(const SvParams& p, Complex u1, Complex u2, double t) {
    const double order = 2.0 * p.kappa * p.mu / (p.sigma_v * p.sigma_v);
    if (std::abs(order - std::round(order)) < 1e-12 * std::max(1.0, order))
        return sv_pieces(p, u1, u2, t).e;

    constexpr double lattice = 4.0 * std::numbers::pi;
    for (int steps = 8; steps <= (1 << 14); steps *= 2) {
        Complex prev{0.0, 0.0};
        bool ok = true;
        for (int j = 1; j <= steps; ++j) {
            const double s = static_cast<double>(j) / steps;
            Complex e = sv_pieces(p, s * u1, s * u2, t).e;
            if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) {
                ok = false;
                break;
            }
            const double k = std::round((prev.imag() - e.imag()) / lattice);
            e += Complex{0.0, k * lattice};
            if (std::abs(e.imag() - prev.imag()) > 0.25 * lattice) {
                ok = false;
                break;
            }
            prev = e;
        }
        if (ok) return prev;
    }
    throw BranchError("SV characteristic function: logarithm branch could not be tracked");
}

Complex sv_cf(const SvParams& p, FormReading reading, std::span<const Complex> z, double t) {
    if (reading == FormReading::printed)
        throw ConfigError(
            "the literal SV form (no outer exponential, no square root in theta) is not a "
            "characteristic function; refusing to evaluate it");
    const Complex u1 = z[0], u2 = z[1];
    const SvPieces pc = sv_pieces(p, u1, u2, t);
    const Complex e = sv_tracked_e(p, u1, u2, t);
    const Complex drift = u1 * (std::log(p.s10) + (p.r - p.delta1) * t) + u2 * (std::log(p.s20) + (p.r - p.delta2) * t);
    const double ratio = p.kappa * p.mu / (p.sigma_v * p.sigma_v);
    return std::exp(I * drift + pc.b * p.v0 - ratio * e);
}

// ---------------------------------------------------------------- VG

// Log of (1 - i v/a+)(1 + i v/a-).  Inside the tube both factors have
// positive real part, so the principal logarithm is already continuous.
Complex vg_log_q(const VgParams& p, Complex v) {
    return std::log(1.0 - I * v / p.a_plus) + std::log(1.0 + I * v / p.a_minus);
}

Complex vg_cf(const VgParams& p, std::span<const Complex> z, double t) {
    const Complex u1 = z[0], u2 = z[1];
    const double common = p.alpha_mix * p.lam * t;
    const double own = (1.0 - p.alpha_mix) * p.lam * t;
    Complex log_phi = I * (u1 * p.x10 + u2 * p.x20);
    if (common > 0.0) log_phi -= common * vg_log_q(p, u1 + u2);
    if (own > 0.0) log_phi -= own * (vg_log_q(p, u1) + vg_log_q(p, u2));
    return std::exp(log_phi);
}

void check_tube(const ModelSpec& model, std::span<const Complex> z) {
    const RealVec tube = analyticity_tube(model);
    const bool open = std::holds_alternative<VgParams>(model.params);
    for (std::size_t k = 0; k < z.size(); ++k) {
        const double im = std::abs(z[k].imag());
        const bool outside = open ? im >= tube[k] : im > tube[k];
        if (outside) {
            std::ostringstream msg;
            msg << "coordinate " << k << " has |Im z| = " << im << " outside the analyticity tube (half-width "
                << tube[k] << ")";
            throw DomainError(msg.str(), k);
        }
    }
    if (const auto* vg = std::get_if<VgParams>(&model.params)) {
        const double s = (z[0] + z[1]).imag();
        if (s <= -vg->a_plus || s >= vg->a_minus)
            throw DomainError("Im(z1 + z2) outside the VG strip (-a_plus, a_minus)", 0);
    }
}

double get_number(const json& obj, const char* key, double fallback, bool required, std::vector<std::string>& out,
                  const std::string& family) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (required) out.push_back(family + "." + key + " is required");
        return fallback;
    }
    if (!it->is_number()) {
        out.push_back(family + "." + key + " must be a number");
        return fallback;
    }
    return it->get<double>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, std::vector<std::string>& out,
                    const std::string& family) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) ok = true;
        if (!ok) out.push_back("unknown key " + family + "." + it.key());
    }
}

RealVec number_array(const json& v, const std::string& what, std::vector<std::string>& out) {
    RealVec r;
    if (!v.is_array()) {
        out.push_back(what + " must be an array of numbers");
        return r;
    }
    for (const auto& e : v) {
        if (!e.is_number()) {
            out.push_back(what + " must be an array of numbers");
            return {};
        }
        r.push_back(e.get<double>());
    }
    return r;
}

}  // namespace

// ---------------------------------------------------------------- validation

std::vector<std::string> GbmParams::violations() const {
    std::vector<std::string> v;
    require(v, finite_all({r, T, rho, sigma1, sigma2, s10, s20}), "gbm parameters must be finite");
    require(v, T > 0.0, "T must be positive");
    require(v, sigma1 > 0.0, "sigma1 must be positive");
    require(v, sigma2 > 0.0, "sigma2 must be positive");
    require(v, std::abs(rho) <= 1.0, "rho out of [-1,1]");
    require(v, s10 > 0.0, "s10 must be positive");
    require(v, s20 > 0.0, "s20 must be positive");
    return v;
}

std::vector<std::string> SvParams::violations() const {
    std::vector<std::string> v;
    require(v, finite_all({r, T, rho, rho1, rho2, delta1, delta2, sigma1, sigma2, v0, kappa, mu, sigma_v, s10, s20}),
            "sv parameters must be finite");
    require(v, T > 0.0, "T must be positive");
    require(v, kappa > 0.0, "kappa must be positive");
    require(v, sigma_v > 0.0, "sigma_v must be positive");
    require(v, v0 > 0.0, "v0 must be positive");
    require(v, mu > 0.0, "mu must be positive");
    require(v, std::abs(rho) <= 1.0, "rho out of [-1,1]");
    require(v, std::abs(rho1) <= 1.0, "rho1 out of [-1,1]");
    require(v, std::abs(rho2) <= 1.0, "rho2 out of [-1,1]");
    require(v, sigma1 > 0.0 && sigma2 > 0.0, "sigma1 and sigma2 must be positive");
    require(v, s10 > 0.0 && s20 > 0.0, "s10 and s20 must be positive");
    return v;
}

std::vector<std::string> VgParams::violations() const {
    std::vector<std::string> v;
    require(v, finite_all({T, a_plus, a_minus, lam, alpha_mix, x10, x20}), "vg parameters must be finite");
    require(v, T > 0.0, "T must be positive");
    require(v, a_plus > 0.0, "a_plus must be positive");
    require(v, a_minus > 0.0, "a_minus must be positive");
    require(v, lam > 0.0, "lam must be positive");
    require(v, alpha_mix >= 0.0 && alpha_mix <= 1.0, "alpha_mix out of [0,1]");
    return v;
}

std::vector<std::string> LevyTriplet::violations() const {
    std::vector<std::string> v;
    const std::size_t n = drift.size();
    if (n == 0) {
        v.push_back("triplet dimension must be at least 1");
        return v;
    }
    if (cov.size() != n) {
        v.push_back("triplet cov must be n x n with n = drift size");
        return v;
    }
    Eigen::MatrixXd a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (cov[i].size() != n) {
            v.push_back("triplet cov must be n x n with n = drift size");
            return v;
        }
        for (std::size_t j = 0; j < n; ++j) a(i, j) = cov[i][j];
    }
    if (!a.allFinite()) v.push_back("triplet cov must be finite");
    else {
        const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
        if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) v.push_back("triplet cov must be symmetric");
        else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
            if (eig.eigenvalues().minCoeff() < -1e-12 * scale) v.push_back("triplet cov must be nonnegative-definite");
        }
    }
    for (double b : drift)
        if (!std::isfinite(b)) v.push_back("triplet drift must be finite");
    for (std::size_t j = 0; j < jumps.size(); ++j) {
        const auto& jp = jumps[j];
        const std::string tag = "jump " + std::to_string(j);
        if (jp.point.size() != n) {
            v.push_back(tag + " point has wrong dimension");
            continue;
        }
        if (!(jp.mass >= 0.0) || !std::isfinite(jp.mass)) v.push_back(tag + " mass must be nonnegative");
        bool zero = true;
        for (double x : jp.point) zero = zero && x == 0.0;
        if (zero) v.push_back(tag + " is an atom at the origin");
    }
    return v;
}

std::size_t ModelSpec::dimension() const {
    return std::visit(overloaded{[](const LevyTriplet& t) { return t.dimension(); },
                                 [](const auto&) { return std::size_t{2}; }},
                      params);
}

double ModelSpec::maturity() const {
    return std::visit(overloaded{[](const LevyTriplet&) { return 0.0; }, [](const auto& p) { return p.T; }}, params);
}

std::string ModelSpec::family() const {
    return std::visit(overloaded{[](const GbmParams&) { return std::string("gbm"); },
                                 [](const SvParams&) { return std::string("sv"); },
                                 [](const VgParams&) { return std::string("vg"); },
                                 [](const LevyTriplet&) { return std::string("triplet"); }},
                      params);
}

std::vector<std::string> ModelSpec::violations() const {
    auto v = std::visit([](const auto& p) { return p.violations(); }, params);
    if (!(tube_cap > 0.0)) v.push_back("tube_cap must be positive");
    if (!(sv_tube > 0.0)) v.push_back("sv_tube must be positive");
    return v;
}

void ModelSpec::validate() const {
    auto v = violations();
    if (!v.empty()) throw ConfigError(std::move(v));
}

ModelSpec make_model(GbmParams p) { return ModelSpec{std::move(p)}; }
ModelSpec make_model(SvParams p) { return ModelSpec{std::move(p)}; }
ModelSpec make_model(VgParams p) { return ModelSpec{std::move(p)}; }
ModelSpec make_model(LevyTriplet p) { return ModelSpec{std::move(p)}; }

// ---------------------------------------------------------------- evaluation

Complex levy_khintchine_exponent(const LevyTriplet& tr, std::span<const Complex> y) {
    const std::size_t n = tr.dimension();
    if (y.size() != n) throw DomainError("argument dimension does not match the triplet", 0);
    Complex quad{0.0, 0.0}, lin{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        lin += tr.drift[i] * y[i];
        for (std::size_t j = 0; j < n; ++j) quad += tr.cov[i][j] * y[i] * y[j];
    }
    Complex jumps{0.0, 0.0};
    for (const auto& jp : tr.jumps) {
        Complex dot{0.0, 0.0};
        double norm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dot += y[i] * jp.point[i];
            norm2 += jp.point[i] * jp.point[i];
        }
        const double chi = norm2 <= 1.0 ? 1.0 : 0.0;
        jumps += jp.mass * (1.0 - std::exp(I * dot) + I * dot * chi);
    }
    const Complex out = -0.5 * quad - I * lin - jumps;
    if (!std::isfinite(out.real()) || !std::isfinite(out.imag()))
        throw OverflowError("Levy-Khintchine exponent overflowed");
    return out;
}

Complex char_function(const ModelSpec& model, std::span<const Complex> z, double t) {
    if (z.size() != model.dimension())
        throw DomainError("argument dimension does not match the model", z.size());
    if (!(t > 0.0)) throw DomainError("time must be positive", 0);
    check_tube(model, z);
    const Complex out = std::visit(
        overloaded{[&](const GbmParams& p) { return gbm_cf(p, model.reading, z, t); },
                   [&](const SvParams& p) { return sv_cf(p, model.reading, z, t); },
                   [&](const VgParams& p) { return vg_cf(p, z, t); },
                   [&](const LevyTriplet& p) {
                       const Complex e = t * levy_khintchine_exponent(p, z);
                       if (e.real() > 709.0) throw OverflowError("triplet characteristic function overflowed");
                       return std::exp(e);
                   }},
        model.params);
    return out;
}

Complex char_function(const ModelSpec& model, std::span<const double> z, double t) {
    ComplexVec zc(z.begin(), z.end());
    return char_function(model, std::span<const Complex>(zc), t);
}

RealVec analyticity_tube(const ModelSpec& model) {
    const std::size_t n = model.dimension();
    return std::visit(overloaded{[&](const VgParams& p) { return RealVec(n, 0.5 * std::min(p.a_plus, p.a_minus)); },
                                 [&](const SvParams&) { return RealVec(n, model.sv_tube); },
                                 [&](const auto&) { return RealVec(n, model.tube_cap); }},
                      model.params);
}

void probe_tube(const ModelSpec& model, double t, int points_per_axis) {
    const RealVec tube = analyticity_tube(model);
    const std::size_t n = model.dimension();
    const bool open = std::holds_alternative<VgParams>(model.params);
    std::vector<int> idx(n, 0);
    ComplexVec z(n);
    const int side = std::max(points_per_axis, 2);
    std::size_t total = 1;
    for (std::size_t k = 0; k < n; ++k) total *= static_cast<std::size_t>(side);
    // corners and edges of the imaginary box, each paired with a small real grid
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        bool on_boundary = false;
        for (std::size_t k = 0; k < n; ++k) {
            idx[k] = static_cast<int>(rest % side);
            rest /= side;
            if (idx[k] == 0 || idx[k] == side - 1) on_boundary = true;
        }
        if (!on_boundary) continue;
        for (double re : {0.0, 1.0, 10.0}) {
            for (std::size_t k = 0; k < n; ++k) {
                double im = tube[k] * (2.0 * idx[k] / (side - 1) - 1.0);
                if (open) im *= 1.0 - 1e-9;
                z[k] = Complex{re, im};
            }
            Complex v;
            try {
                v = char_function(model, std::span<const Complex>(z), t);
            } catch (const DomainError&) {
                continue;  // VG corners outside the sum strip
            }
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw DomainError("characteristic function is not finite on the tube boundary", 0);
        }
    }
}

LogMoments log_moments(const ModelSpec& model, double t) {
    const std::size_t n = model.dimension();
    RealVec ref(n, 0.0);
    std::visit(overloaded{[&](const GbmParams& p) { ref = {std::log(p.s10), std::log(p.s20)}; },
                          [&](const SvParams& p) { ref = {std::log(p.s10), std::log(p.s20)}; },
                          [&](const VgParams& p) { ref = {p.x10, p.x20}; }, [](const LevyTriplet&) {}},
               model.params);
    const double h = 1e-3;
    LogMoments out{RealVec(n), RealVec(n)};
    ComplexVec z(n, Complex{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) {
        z.assign(n, Complex{0.0, 0.0});
        z[k] = h;
        const Complex lp = std::log(char_function(model, std::span<const Complex>(z), t) * std::exp(-I * h * ref[k]));
        z[k] = -h;
        const Complex lm = std::log(char_function(model, std::span<const Complex>(z), t) * std::exp(I * h * ref[k]));
        out.mean[k] = ref[k] + (lp.imag() - lm.imag()) / (2.0 * h);
        out.stddev[k] = std::sqrt(std::max(0.0, -(lp.real() + lm.real()) / (h * h)));
    }
    return out;
}

RealVec default_center(const ModelSpec& model, double t) {
    if (const auto* vg = std::get_if<VgParams>(&model.params)) return {vg->x10, vg->x20};
    return log_moments(model, t).mean;
}

// ---------------------------------------------------------------- JSON

ModelSpec model_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("model JSON does not parse: ") + e.what());
    }
    std::vector<std::string> out;
    if (!doc.is_object() || doc.size() != 1) {
        throw ConfigError("model document must have exactly one key naming the family (gbm, sv, vg, triplet)");
    }
    const std::string family = doc.begin().key();
    const json& o = doc.begin().value();
    if (!o.is_object()) throw ConfigError("model." + family + " must be an object");

    ModelSpec spec;
    if (family == "gbm") {
        reject_unknown(o, {"r", "T", "rho", "sigma1", "sigma2", "s10", "s20"}, out, family);
        GbmParams p;
        p.r = get_number(o, "r", p.r, false, out, family);
        p.T = get_number(o, "T", p.T, false, out, family);
        p.rho = get_number(o, "rho", p.rho, true, out, family);
        p.sigma1 = get_number(o, "sigma1", p.sigma1, true, out, family);
        p.sigma2 = get_number(o, "sigma2", p.sigma2, true, out, family);
        p.s10 = get_number(o, "s10", p.s10, false, out, family);
        p.s20 = get_number(o, "s20", p.s20, false, out, family);
        spec.params = p;
    } else if (family == "sv") {
        reject_unknown(o, {"r", "T", "rho", "rho1", "rho2", "delta1", "delta2", "sigma1", "sigma2", "v0", "kappa", "mu",
                           "sigma_v", "s10", "s20"},
                       out, family);
        SvParams p;
        p.r = get_number(o, "r", p.r, false, out, family);
        p.T = get_number(o, "T", p.T, false, out, family);
        p.rho = get_number(o, "rho", p.rho, false, out, family);
        p.rho1 = get_number(o, "rho1", p.rho1, false, out, family);
        p.rho2 = get_number(o, "rho2", p.rho2, false, out, family);
        p.delta1 = get_number(o, "delta1", p.delta1, false, out, family);
        p.delta2 = get_number(o, "delta2", p.delta2, false, out, family);
        p.sigma1 = get_number(o, "sigma1", p.sigma1, true, out, family);
        p.sigma2 = get_number(o, "sigma2", p.sigma2, true, out, family);
        p.v0 = get_number(o, "v0", p.v0, true, out, family);
        p.kappa = get_number(o, "kappa", p.kappa, true, out, family);
        p.mu = get_number(o, "mu", p.mu, true, out, family);
        p.sigma_v = get_number(o, "sigma_v", p.sigma_v, true, out, family);
        p.s10 = get_number(o, "s10", p.s10, false, out, family);
        p.s20 = get_number(o, "s20", p.s20, false, out, family);
        spec.params = p;
    } else if (family == "vg") {
        reject_unknown(o, {"T", "a_plus", "a_minus", "lam", "alpha_mix", "x10", "x20"}, out, family);
        VgParams p;
        p.T = get_number(o, "T", p.T, false, out, family);
        p.a_plus = get_number(o, "a_plus", p.a_plus, true, out, family);
        p.a_minus = get_number(o, "a_minus", p.a_minus, true, out, family);
        p.lam = get_number(o, "lam", p.lam, true, out, family);
        p.alpha_mix = get_number(o, "alpha_mix", p.alpha_mix, true, out, family);
        p.x10 = get_number(o, "x10", p.x10, false, out, family);
        p.x20 = get_number(o, "x20", p.x20, false, out, family);
        spec.params = p;
    } else if (family == "triplet") {
        reject_unknown(o, {"cov", "drift", "jumps"}, out, family);
        LevyTriplet p;
        if (auto it = o.find("drift"); it != o.end()) p.drift = number_array(*it, "triplet.drift", out);
        else out.push_back("triplet.drift is required");
        if (auto it = o.find("cov"); it != o.end()) {
            if (!it->is_array()) out.push_back("triplet.cov must be an array of rows");
            else
                for (const auto& row : *it) p.cov.push_back(number_array(row, "triplet.cov row", out));
        } else {
            p.cov.assign(p.drift.size(), RealVec(p.drift.size(), 0.0));
        }
        if (auto it = o.find("jumps"); it != o.end()) {
            if (!it->is_array()) out.push_back("triplet.jumps must be an array");
            else
                for (const auto& j : *it) {
                    if (!j.is_object() || !j.contains("point") || !j.contains("mass") || !j["mass"].is_number()) {
                        out.push_back("each triplet jump needs a point array and a numeric mass");
                        continue;
                    }
                    reject_unknown(j, {"point", "mass"}, out, "triplet.jumps[]");
                    p.jumps.push_back({number_array(j["point"], "triplet jump point", out), j["mass"].get<double>()});
                }
        }
        spec.params = p;
    } else {
        throw ConfigError("unknown model family '" + family + "' (expected gbm, sv, vg or triplet)");
    }
    auto v = spec.violations();
    out.insert(out.end(), v.begin(), v.end());
    if (!out.empty()) throw ConfigError(std::move(out));
    return spec;
}

std::string model_to_json(const ModelSpec& model) {
    json o;
    std::visit(overloaded{[&](const GbmParams& p) {
                              o["gbm"] = {{"r", p.r},           {"T", p.T},           {"rho", p.rho},
                                          {"sigma1", p.sigma1}, {"sigma2", p.sigma2}, {"s10", p.s10},
                                          {"s20", p.s20}};
                          },
                          [&](const SvParams& p) {
                              o["sv"] = {{"r", p.r},           {"T", p.T},           {"rho", p.rho},
                                         {"rho1", p.rho1},     {"rho2", p.rho2},     {"delta1", p.delta1},
                                         {"delta2", p.delta2}, {"sigma1", p.sigma1}, {"sigma2", p.sigma2},
                                         {"v0", p.v0},         {"kappa", p.kappa},   {"mu", p.mu},
                                         {"sigma_v", p.sigma_v}, {"s10", p.s10},     {"s20", p.s20}};
                          },
                          [&](const VgParams& p) {
                              o["vg"] = {{"T", p.T},     {"a_plus", p.a_plus},       {"a_minus", p.a_minus},
                                         {"lam", p.lam}, {"alpha_mix", p.alpha_mix}, {"x10", p.x10},
                                         {"x20", p.x20}};
                          },
                          [&](const LevyTriplet& p) {
                              json jumps = json::array();
                              for (const auto& j : p.jumps) jumps.push_back({{"point", j.point}, {"mass", j.mass}});
                              o["triplet"] = {{"cov", p.cov}, {"drift", p.drift}, {"jumps", jumps}};
                          }},
               model.params);
    return o.dump();
}

std::string model_hash(const ModelSpec& model) {
    std::string text = model_to_json(model);
    text += model.reading == FormReading::printed ? "|printed" : "|corrected";
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace cardinal
