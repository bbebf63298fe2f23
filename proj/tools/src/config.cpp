#include "cardinal_cli/config.hpp"

#include <cardinal/errors.hpp>

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace cardinal::cli {

namespace {

using json = nlohmann::json;

class Reader {
public:
    std::vector<std::string> errors;

    void allow_only(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
        std::set<std::string> ok(keys.begin(), keys.end());
        for (auto it = obj.begin(); it != obj.end(); ++it)
            if (!ok.count(it.key())) errors.push_back(where + ": unknown key '" + it.key() + "'");
    }

    const json* object(const json& parent, const char* key, const std::string& where) {
        auto it = parent.find(key);
        if (it == parent.end()) return nullptr;
        if (!it->is_object()) {
            errors.push_back(where + "." + key + " must be an object");
            return nullptr;
        }
        return &*it;
    }

    std::optional<double> number(const json& obj, const char* key, const std::string& where) {
        auto it = obj.find(key);
        if (it == obj.end()) return std::nullopt;
        if (!it->is_number()) {
            errors.push_back(where + "." + key + " must be a number");
            return std::nullopt;
        }
        return it->get<double>();
    }

    std::optional<long long> integer(const json& obj, const char* key, const std::string& where, long long min) {
        auto it = obj.find(key);
        if (it == obj.end()) return std::nullopt;
        if (!it->is_number_integer() || it->get<long long>() < min) {
            errors.push_back(where + "." + key + " must be an integer >= " + std::to_string(min));
            return std::nullopt;
        }
        return it->get<long long>();
    }

    // A number, broadcast to n entries, or an array of n numbers.
    std::optional<RealVec> vector(const json& obj, const char* key, const std::string& where, std::size_t n) {
        auto it = obj.find(key);
        if (it == obj.end()) return std::nullopt;
        if (it->is_number()) return RealVec(n, it->get<double>());
        if (it->is_array() && it->size() == n) {
            RealVec v;
            for (const auto& e : *it) {
                if (!e.is_number()) break;
                v.push_back(e.get<double>());
            }
            if (v.size() == n) return v;
        }
        errors.push_back(where + "." + key + " must be a number or an array of " + std::to_string(n) + " numbers");
        return std::nullopt;
    }

    std::optional<std::vector<int>> int_vector(const json& obj, const char* key, const std::string& where,
                                               std::size_t n) {
        auto v = vector(obj, key, where, n);
        if (!v) return std::nullopt;
        std::vector<int> out;
        for (double d : *v) {
            if (d < 0 || d != std::floor(d) || d > 1e7) {
                errors.push_back(where + "." + key + " entries must be nonnegative integers");
                return std::nullopt;
            }
            out.push_back(static_cast<int>(d));
        }
        return out;
    }

    std::optional<std::vector<double>> list(const json& obj, const char* key, const std::string& where) {
        auto it = obj.find(key);
        if (it == obj.end()) return std::nullopt;
        std::vector<double> v;
        if (it->is_number()) return std::vector<double>{it->get<double>()};
        if (it->is_array() && !it->empty()) {
            for (const auto& e : *it)
                if (e.is_number()) v.push_back(e.get<double>());
            if (v.size() == it->size()) return v;
        }
        errors.push_back(where + "." + key + " must be a number or a non-empty array of numbers");
        return std::nullopt;
    }

    std::optional<std::string> string(const json& obj, const char* key, const std::string& where) {
        auto it = obj.find(key);
        if (it == obj.end()) return std::nullopt;
        if (!it->is_string()) {
            errors.push_back(where + "." + key + " must be a string");
            return std::nullopt;
        }
        return it->get<std::string>();
    }
};

std::string fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void apply_overrides(json& doc, const Overrides& o) {
    if (o.strike) doc["price"]["strikes"] = json::array({*o.strike});
    if (o.a) doc["plan"]["a"] = *o.a;
    if (o.tau) {
        doc["plan"]["tau"] = *o.tau;
        if (doc["plan"].contains("M")) doc["plan"].erase("M");
    }
    if (o.seed) {
        doc["price"]["seed"] = *o.seed;
        doc["validate"]["seed"] = *o.seed;
    }
    if (o.output) doc["output"] = *o.output;
    if (o.strict_paper) doc["strict_paper"] = true;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const Overrides& overrides) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    apply_overrides(doc, overrides);

    Reader rd;
    RunConfig cfg;
    rd.allow_only(doc, "config",
                  {"model", "T", "window", "plan", "density", "price", "bound", "converge", "validate", "output",
                   "strict_paper"});

    if (auto it = doc.find("strict_paper"); it != doc.end()) {
        if (it->is_boolean()) cfg.strict_paper = it->get<bool>();
        else rd.errors.push_back("config.strict_paper must be a boolean");
    }
    if (auto s = rd.string(doc, "output", "config")) cfg.output = *s;

    // model first: its dimension and tube drive the remaining checks
    bool have_model = false;
    if (auto it = doc.find("model"); it == doc.end()) {
        rd.errors.push_back("config.model is required");
    } else {
        try {
            cfg.model = model_from_json(it->dump());
            have_model = true;
        } catch (const ConfigError& e) {
            for (const auto& v : e.violations()) rd.errors.push_back("model: " + v);
        }
    }
    if (cfg.strict_paper) cfg.model.reading = FormReading::printed;
    const std::size_t n = have_model ? cfg.model.dimension() : 2;

    if (have_model) {
        const bool triplet = std::holds_alternative<LevyTriplet>(cfg.model.params);
        auto t = rd.number(doc, "T", "config");
        if (triplet && !t) rd.errors.push_back("config.T is required for a triplet model");
        if (!triplet && t) rd.errors.push_back("config.T is only used for triplet models; set the model's own T");
        cfg.T = triplet ? t.value_or(1.0) : cfg.model.maturity();
        if (!(cfg.T > 0.0)) rd.errors.push_back("maturity T must be positive");
        std::visit(
            [&](const auto& p) {
                if constexpr (requires { p.r; }) cfg.rate = p.r;
            },
            cfg.model.params);
    }

    if (const json* w = rd.object(doc, "window", "config")) {
        rd.allow_only(*w, "window", {"kind"});
        if (auto k = rd.string(*w, "kind", "window")) {
            if (*k == "trapezoid") cfg.window = WindowKind::trapezoid;
            else if (*k == "smooth") cfg.window = WindowKind::smooth;
            else rd.errors.push_back("window.kind must be 'trapezoid' or 'smooth'");
        }
    }

    cfg.plan.a = RealVec(n, 12.0);
    cfg.alpha = RealVec(n, 0.0);
    ThresholdTruncation thr;
    std::optional<std::vector<int>> box;
    if (const json* p = rd.object(doc, "plan", "config")) {
        rd.allow_only(*p, "plan", {"a", "tau", "M", "cap", "max_shell", "alpha", "x0", "coverage_sigmas", "threads"});
        if (auto a = rd.vector(*p, "a", "plan", n)) cfg.plan.a = *a;
        if (auto t = rd.number(*p, "tau", "plan")) thr.tau = *t;
        if (auto c = rd.int_vector(*p, "cap", "plan", n)) thr.cap = *c;
        if (auto s = rd.integer(*p, "max_shell", "plan", 1)) thr.max_shell = static_cast<int>(*s);
        box = rd.int_vector(*p, "M", "plan", n);
        if (box && p->contains("tau")) rd.errors.push_back("plan: give either tau (threshold) or M (box), not both");
        if (auto al = rd.vector(*p, "alpha", "plan", n)) cfg.alpha = *al;
        if (auto x0 = rd.vector(*p, "x0", "plan", n)) cfg.plan.x0 = *x0;
        if (auto c = rd.number(*p, "coverage_sigmas", "plan")) cfg.coverage_sigmas = *c;
        if (auto t = rd.integer(*p, "threads", "plan", 0)) cfg.threads = static_cast<unsigned>(*t);
    }
    if (box) cfg.plan.trunc = BoxTruncation{*box};
    else cfg.plan.trunc = thr;
    for (std::size_t k = 0; k < n; ++k)
        if (!(cfg.plan.a[k] > 0.0)) rd.errors.push_back("plan.a[" + std::to_string(k) + "] must be positive");
    if (!box && !(thr.tau > 0.0)) rd.errors.push_back("plan.tau must be positive");
    if (!(cfg.coverage_sigmas >= 0.0)) rd.errors.push_back("plan.coverage_sigmas must be nonnegative");
    if (have_model) {
        try {
            const RealVec tube = analyticity_tube(cfg.model);
            for (std::size_t k = 0; k < n; ++k)
                if (!(cfg.alpha[k] >= 0.0 && cfg.alpha[k] < tube[k])) {
                    std::ostringstream msg;
                    msg << "plan.alpha[" << k << "] = " << cfg.alpha[k] << " must satisfy 0 <= alpha < delta = "
                        << tube[k] << " (contour shift outside the analyticity tube)";
                    rd.errors.push_back(msg.str());
                }
        } catch (const Error& e) {
            rd.errors.push_back(std::string("model tube: ") + e.what());
        }
    }

    if (const json* d = rd.object(doc, "density", "config")) {
        rd.allow_only(*d, "density", {"x1", "x2"});
        for (const char* key : {"x1", "x2"}) {
            auto it = d->find(key);
            if (it == d->end()) continue;
            const std::string where = std::string("density.") + key;
            if (!it->is_object()) {
                rd.errors.push_back(where + " must be an object with lo, hi, n");
                continue;
            }
            rd.allow_only(*it, where, {"lo", "hi", "n"});
            GridAxis g;
            auto lo = rd.number(*it, "lo", where), hi = rd.number(*it, "hi", where);
            auto pts = rd.integer(*it, "n", where, 2);
            if (!lo || !hi) {
                rd.errors.push_back(where + " needs lo and hi");
                continue;
            }
            g.lo = *lo;
            g.hi = *hi;
            if (pts) g.n = static_cast<int>(*pts);
            if (!(g.hi > g.lo)) rd.errors.push_back(where + ": hi must exceed lo");
            cfg.grid.push_back(g);
        }
        if (cfg.grid.size() == 1) rd.errors.push_back("density: give both x1 and x2 or neither");
    }

    if (const json* p = rd.object(doc, "price", "config")) {
        rd.allow_only(*p, "price", {"strikes", "r", "panels", "mc_paths", "seed"});
        if (auto k = rd.list(*p, "strikes", "price")) cfg.strikes = *k;
        if (auto r = rd.number(*p, "r", "price")) cfg.rate = *r;
        if (auto v = rd.integer(*p, "panels", "price", 1)) cfg.panels = static_cast<std::size_t>(*v);
        if (auto v = rd.integer(*p, "mc_paths", "price", 0)) cfg.mc_paths = static_cast<std::size_t>(*v);
        if (auto v = rd.integer(*p, "seed", "price", 0)) cfg.seed = static_cast<std::uint64_t>(*v);
        if (cfg.mc_paths > 0 && cfg.mc_paths < 10000) rd.errors.push_back("price.mc_paths must be 0 or at least 10000");
    }
    for (double K : cfg.strikes)
        if (!(K >= 0.0)) rd.errors.push_back("price.strikes must be nonnegative");

    if (const json* b = rd.object(doc, "bound", "config")) {
        rd.allow_only(*b, "bound", {"eps", "mode", "delta", "M", "L"});
        if (auto e = rd.number(*b, "eps", "bound")) cfg.eps = *e;
        if (auto m = rd.string(*b, "mode", "bound")) {
            try {
                cfg.bound_mode = parse_bound_mode(*m);
            } catch (const ConfigError& e) {
                for (const auto& v : e.violations()) rd.errors.push_back("bound.mode: " + v);
            }
        }
        if (auto d = rd.vector(*b, "delta", "bound", n)) cfg.bound_delta = *d;
        if (auto m = rd.number(*b, "M", "bound")) cfg.bound_M = *m;
        if (auto l = rd.number(*b, "L", "bound")) cfg.bound_L = *l;
    }
    if (!(cfg.eps > 0.0)) rd.errors.push_back("bound.eps must be positive");
    if (!(cfg.bound_M > 0.0) || !(cfg.bound_L > 0.0)) rd.errors.push_back("bound.M and bound.L must be positive");
    for (double d : cfg.bound_delta)
        if (!(d > 0.0)) rd.errors.push_back("bound.delta entries must be positive");

    if (const json* c = rd.object(doc, "converge", "config")) {
        rd.allow_only(*c, "converge", {"a", "points"});
        if (auto a = rd.list(*c, "a", "converge")) cfg.sweep = *a;
        if (auto p = rd.integer(*c, "points", "converge", 1)) cfg.sweep_points = static_cast<int>(*p);
    }
    for (double a : cfg.sweep)
        if (!(a > 0.0)) rd.errors.push_back("converge.a entries must be positive");

    if (const json* v = rd.object(doc, "validate", "config")) {
        rd.allow_only(*v, "validate", {"paths", "seed", "tolerance", "radius", "points"});
        if (auto p = rd.integer(*v, "paths", "validate", 10000)) cfg.validate_paths = static_cast<std::size_t>(*p);
        if (auto s = rd.integer(*v, "seed", "validate", 0)) cfg.seed = static_cast<std::uint64_t>(*s);
        if (auto t = rd.number(*v, "tolerance", "validate")) cfg.validate_tolerance = *t;
        if (auto r = rd.number(*v, "radius", "validate")) cfg.oracle_radius = *r;
        if (auto p = rd.integer(*v, "points", "validate", 3)) cfg.oracle_points = static_cast<std::size_t>(*p);
    }

    if (!rd.errors.empty()) throw ConfigError(std::move(rd.errors));
    cfg.canonical = doc.dump();
    cfg.hash = fnv1a(cfg.canonical);
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path, const Overrides& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), overrides);
}

}  // namespace cardinal::cli
