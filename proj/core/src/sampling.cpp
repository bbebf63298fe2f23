#include "cardinal/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "cardinal/errors.hpp"
#include <nlohmann/json.hpp>

namespace cardinal {

namespace {

using json = nlohmann::json;

RealVec shell_ratio(const SamplingPlan& plan) {
    const std::size_t n = plan.dimension();
    RealVec ratio(n, 1.0);
    if (const auto* box = std::get_if<BoxTruncation>(&plan.trunc)) {
        const int lo = *std::min_element(box->max_index.begin(), box->max_index.end());
        for (std::size_t k = 0; k < n; ++k) ratio[k] = static_cast<double>(box->max_index[k]) / lo;
    } else {
        const double lo = *std::min_element(plan.a.begin(), plan.a.end());
        for (std::size_t k = 0; k < n; ++k) ratio[k] = plan.a[k] / lo;
    }
    return ratio;
}

int shell_extent(int s, double ratio) {
    if (s < 0) return -1;
    return static_cast<int>(std::floor(s * ratio + 1e-9));
}

// Lexicographically ordered points of shell s, clipped to the caps.
void enumerate_shell(int s, const RealVec& ratio, const std::vector<int>& cap, std::vector<int>& out) {
    const std::size_t n = ratio.size();
    std::vector<int> outer(n), inner(n);
    for (std::size_t k = 0; k < n; ++k) {
        outer[k] = shell_extent(s, ratio[k]);
        inner[k] = shell_extent(s - 1, ratio[k]);
        if (!cap.empty()) {
            outer[k] = std::min(outer[k], cap[k]);
            inner[k] = std::min(inner[k], cap[k]);
        }
    }
    out.clear();
    std::vector<int> m(n);
    auto rec = [&](auto&& self, std::size_t k, bool outside) -> void {
        if (k + 1 == n) {
            for (int v = -outer[k]; v <= outer[k]; ++v) {
                if (!outside && std::abs(v) <= inner[k]) continue;
                m[k] = v;
                out.insert(out.end(), m.begin(), m.end());
            }
            return;
        }
        for (int v = -outer[k]; v <= outer[k]; ++v) {
            m[k] = v;
            self(self, k + 1, outside || std::abs(v) > inner[k]);
        }
    };
    rec(rec, 0, false);
}

bool canonical(const int* m, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
        if (m[k] > 0) return true;
        if (m[k] < 0) return false;
    }
    return true;  // origin
}

double extrapolate(const std::vector<double>& shell_mass, TailStatus& status) {
    const std::size_t k = shell_mass.size();
    if (k < 2) return 0.0;
    const double last = shell_mass[k - 1], prev = shell_mass[k - 2];
    if (last == 0.0) return 0.0;
    if (k < 3) {
        status = TailStatus::divergent;
        return std::numeric_limits<double>::infinity();
    }
    const double s = static_cast<double>(k - 1);
    const double r = last / prev;
    const double p = std::log(prev / last) / std::log(s / (s - 1.0));
    if (!(r < 1.0) || !(p > 1.0)) {
        status = TailStatus::divergent;
        return std::numeric_limits<double>::infinity();
    }
    const double geometric = last * r / (1.0 - r);
    const double power = last * s / (p - 1.0);
    return std::max(geometric, power);
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

double SamplingPlan::spacing(std::size_t k) const { return std::numbers::pi / a.at(k); }

void SamplingPlan::validate() const {
    std::vector<std::string> v;
    const std::size_t n = a.size();
    if (n == 0) v.push_back("plan band a must be nonempty");
    for (double ak : a)
        if (!(ak > 0.0) || !std::isfinite(ak)) v.push_back("plan band entries must be positive");
    if (!x0.empty() && x0.size() != n) v.push_back("plan x0 must match the band dimension");
    if (const auto* box = std::get_if<BoxTruncation>(&trunc)) {
        if (box->max_index.size() != n) v.push_back("box truncation needs one max index per coordinate");
        for (int mk : box->max_index)
            if (mk < 1) v.push_back("box truncation max index must be at least 1");
    } else {
        const auto& th = std::get<ThresholdTruncation>(trunc);
        if (!(th.tau > 0.0)) v.push_back("threshold tau must be positive");
        if (th.max_shell < 1) v.push_back("max_shell must be at least 1");
        if (!th.cap.empty() && th.cap.size() != n) v.push_back("index cap must have one entry per coordinate");
        for (int c : th.cap)
            if (c < 1) v.push_back("index cap entries must be at least 1");
    }
    if (!v.empty()) throw ConfigError(std::move(v));
}

double CoefficientTable::retained_mass() const {
    double s = 0.0;
    for (const auto& c : values) s += std::abs(c);
    return s;
}

std::vector<int> CoefficientTable::max_abs_index() const {
    std::vector<int> out(dim, 0);
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t k = 0; k < dim; ++k) out[k] = std::max(out[k], std::abs(indices[i * dim + k]));
    return out;
}

int shell_of(std::span<const int> m, std::span<const double> ratio) {
    int s = 0;
    for (std::size_t k = 0; k < m.size(); ++k)
        s = std::max(s, static_cast<int>(std::ceil(std::abs(m[k]) / ratio[k] - 1e-9)));
    return s;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    unsigned t = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    t = static_cast<unsigned>(std::min<std::size_t>(t, (n + 1023) / 1024));
    if (t <= 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + t - 1) / t;
    for (unsigned w = 0; w < t; ++w) {
        const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo < hi) pool.emplace_back(body, lo, hi);
    }
    for (auto& th : pool) th.join();
}

CoefficientTable sample_coefficients(const SampledFunction& f, const SamplingPlan& plan, const SampleOptions& options) {
    plan.validate();
    const std::size_t n = plan.dimension();
    const RealVec ratio = shell_ratio(plan);

    const auto* box = std::get_if<BoxTruncation>(&plan.trunc);
    const auto* thr = std::get_if<ThresholdTruncation>(&plan.trunc);
    std::vector<int> cap;
    int last_shell = 0;
    double tau = 0.0;
    if (box) {
        cap = box->max_index;
        last_shell = *std::min_element(box->max_index.begin(), box->max_index.end());
    } else {
        cap = thr->cap;
        tau = thr->tau;
        last_shell = thr->max_shell;
    }

    CoefficientTable table;
    table.dim = n;
    table.hermitian = options.hermitian;

    std::vector<int> pts;
    ComplexVec vals;
    int quiet_shells = 0;
    bool stopped_by_rule = false;
    for (int s = 0; s <= last_shell; ++s) {
        enumerate_shell(s, ratio, cap, pts);
        const std::size_t count = pts.size() / n;
        if (count == 0) {
            // every coordinate hit its cap; only box truncation counts that as complete
            stopped_by_rule = box != nullptr;
            break;
        }
        vals.assign(count, Complex{});
        parallel_for(count, options.threads, [&](std::size_t lo, std::size_t hi) {
            RealVec z(n);
            for (std::size_t i = lo; i < hi; ++i) {
                const int* m = pts.data() + i * n;
                if (options.hermitian && !canonical(m, n)) continue;
                for (std::size_t k = 0; k < n; ++k) z[k] = m[k] * plan.spacing(k);
                vals[i] = f(std::span<const double>(z));
            }
        });
        for (std::size_t i = 0; i < count; ++i) {
            const int* m = pts.data() + i * n;
            if (options.hermitian && !canonical(m, n)) vals[i] = std::conj(vals[count - 1 - i]);
            if (!std::isfinite(vals[i].real()) || !std::isfinite(vals[i].imag()))
                throw EvaluationError("sampled function is not finite", std::vector<int>(m, m + n));
        }
        double mass = 0.0;
        bool all_small = true;
        for (std::size_t i = 0; i < count; ++i) {
            const double mag = std::abs(vals[i]);
            mass += mag;
            const bool keep = box ? mag > 0.0 : mag >= tau;
            if (!box && mag >= tau) all_small = false;
            if (keep) {
                table.indices.insert(table.indices.end(), pts.begin() + i * n, pts.begin() + (i + 1) * n);
                table.values.push_back(vals[i]);
                table.shell.push_back(s);
            } else {
                table.below_threshold_mass += mag;
            }
        }
        table.shell_mass.push_back(mass);
        if (thr) {
            quiet_shells = all_small ? quiet_shells + 1 : 0;
            if (s >= 1 && quiet_shells >= 2) {
                stopped_by_rule = true;
                break;
            }
        }
    }

    if (thr && !stopped_by_rule) table.status = TailStatus::capped;
    bool capped_axes = !cap.empty();
    if (box) capped_axes = true;
    TailStatus status = table.status;
    if (capped_axes || table.status == TailStatus::capped) {
        table.extrapolated_mass = extrapolate(table.shell_mass, status);
        if (status == TailStatus::divergent) table.status = TailStatus::divergent;
    } else {
        // two silent shells: continue the decay the last two shells show
        TailStatus ignored = TailStatus::ok;
        const double e = extrapolate(table.shell_mass, ignored);
        table.extrapolated_mass = std::isfinite(e) ? e : table.shell_mass.back();
    }
    return table;
}

Complex reconstruct(const CoefficientTable& table, const SamplingPlan& plan, const WindowSpec& w,
                    std::span<const double> x) {
    if (w.dimension() != plan.dimension() || table.dim != plan.dimension() || x.size() != plan.dimension())
        throw ConfigError("reconstruct: table, plan, window and point dimensions differ");
    for (std::size_t k = 0; k < plan.dimension(); ++k)
        if (std::abs(w.a[k] - plan.a[k]) > 1e-12 * plan.a[k])
            throw ConfigError("reconstruct: window band does not match the sampling plan");
    const auto axes = w.axes();
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < table.size(); ++i) s += table.values[i] * cardinal_eval(axes, table.index(i), x);
    return s;
}

TailEstimate tail_estimate(const CoefficientTable& table, const SamplingPlan& plan, std::optional<double> norm_per_axis) {
    TailEstimate out;
    out.status = table.status;
    const double norm = std::pow(norm_per_axis.value_or(kOperatorNormConstant), static_cast<double>(plan.dimension()));
    out.value = table.dropped_mass() * norm;
    if (table.status == TailStatus::divergent) out.value = std::numeric_limits<double>::infinity();
    return out;
}

std::string table_to_json(const CoefficientTable& table, const SamplingPlan& plan) {
    json doc;
    doc["dim"] = table.dim;
    doc["a"] = plan.a;
    doc["x0"] = plan.x0;
    doc["hermitian"] = table.hermitian;
    doc["below_threshold_mass"] = table.below_threshold_mass;
    doc["extrapolated_mass"] = table.extrapolated_mass;
    doc["shell_mass"] = table.shell_mass;
    doc["status"] = table.status == TailStatus::ok ? "ok" : table.status == TailStatus::capped ? "capped" : "divergent";
    json coeffs = json::array();
    for (std::size_t i = 0; i < table.size(); ++i) {
        auto m = table.index(i);
        coeffs.push_back({{"m", std::vector<int>(m.begin(), m.end())},
                          {"c", {table.values[i].real(), table.values[i].imag()}},
                          {"shell", table.shell[i]}});
    }
    doc["coefficients"] = std::move(coeffs);
    return doc.dump();
}

CoefficientTable table_from_json(const std::string& text) {
    const json doc = json::parse(text);
    CoefficientTable t;
    t.dim = doc.at("dim").get<std::size_t>();
    t.hermitian = doc.value("hermitian", false);
    t.below_threshold_mass = doc.value("below_threshold_mass", 0.0);
    t.extrapolated_mass = doc.value("extrapolated_mass", 0.0);
    t.shell_mass = doc.value("shell_mass", std::vector<double>{});
    const std::string st = doc.value("status", std::string("ok"));
    t.status = st == "ok" ? TailStatus::ok : st == "capped" ? TailStatus::capped : TailStatus::divergent;
    for (const auto& e : doc.at("coefficients")) {
        const auto m = e.at("m").get<std::vector<int>>();
        if (m.size() != t.dim) throw ConfigError("coefficient index has the wrong dimension");
        t.indices.insert(t.indices.end(), m.begin(), m.end());
        t.values.emplace_back(e.at("c").at(0).get<double>(), e.at("c").at(1).get<double>());
        t.shell.push_back(e.value("shell", 0));
    }
    return t;
}

std::string table_to_csv(const CoefficientTable& table) {
    std::ostringstream out;
    for (std::size_t k = 0; k < table.dim; ++k) out << 'm' << (k + 1) << ',';
    out << "re,im\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
        for (int mk : table.index(i)) out << mk << ',';
        out << fmt17(table.values[i].real()) << ',' << fmt17(table.values[i].imag()) << '\n';
    }
    return out.str();
}

}  // namespace cardinal
