#include "cardinal_cli/commands.hpp"

#include <cardinal/errors.hpp>
#include <cardinal/inversion.hpp>
#include <cardinal/oracles.hpp>
#include <cardinal/pricing.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace cardinal::cli {

namespace {

using json = nlohmann::json;

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* tail_status_name(TailStatus s) {
    switch (s) {
        case TailStatus::ok: return "ok";
        case TailStatus::divergent: return "divergent";
        case TailStatus::capped: return "capped";
    }
    return "unknown";
}

DensityApproximant build(const RunConfig& cfg, const RealVec& a) {
    SamplingPlan plan = cfg.plan;
    plan.a = a;
    BuildOptions o;
    o.coverage_sigmas = cfg.coverage_sigmas;
    o.threads = cfg.threads;
    return build_density_approximant(cfg.model, plan, cfg.window_spec(a), ContourShift{cfg.alpha}, cfg.T, o);
}

json approximant_summary(const DensityApproximant& ap) {
    const ErrorBudget& b = ap.budget();
    return {{"coefficients", ap.table().size()},
            {"tail", ap.tail().value},
            {"tail_status", tail_status_name(ap.tail().status)},
            {"analytic_budget", b.analytic()},
            {"analytic_sup_chain", b.analytic_M},
            {"analytic_l1_chain", b.analytic_L},
            {"center", ap.center()}};
}

json quote_json(const PriceQuote& q) {
    json j{{"value", q.value}, {"method", q.method}, {"analytic_budget", q.analytic_budget}};
    if (q.standard_error > 0.0) j["standard_error"] = q.standard_error;
    if (!q.diagnostics.empty()) j["diagnostics"] = q.diagnostics;
    if (!q.note.empty()) j["note"] = q.note;
    return j;
}

json mc_json(const McResult& r) {
    return {{"estimate", r.estimate}, {"standard_error", r.standard_error}, {"paths", r.paths}, {"seed", r.seed}};
}

json header(const RunConfig& cfg, const char* command) {
    return {{"command", command},
            {"config_hash", cfg.hash},
            {"model_hash", model_hash(cfg.model)},
            {"family", cfg.model.family()},
            {"reading", cfg.model.reading == FormReading::printed ? "printed" : "corrected"}};
}

std::string csv_comment(const RunConfig& cfg, const char* command) {
    return "# command=" + std::string(command) + " config_hash=" + cfg.hash + " model_hash=" + model_hash(cfg.model) +
           "\n";
}

void require_two_dimensions(const RunConfig& cfg, const char* command) {
    if (cfg.model.dimension() != 2)
        throw ConfigError(std::string(command) + " needs a two-dimensional model");
}

// Monte Carlo for the families that have a path sampler.
std::optional<McResult> monte_carlo(const RunConfig& cfg, double K, std::size_t paths) {
    if (paths == 0) return std::nullopt;
    if (const auto* g = std::get_if<GbmParams>(&cfg.model.params)) return mc_gbm_spread(*g, K, paths, cfg.seed);
    if (const auto* s = std::get_if<SvParams>(&cfg.model.params)) return mc_sv_spread(*s, K, paths, cfg.seed);
    if (const auto* v = std::get_if<VgParams>(&cfg.model.params))
        return mc_vg_spread(*v, K, paths, cfg.seed, std::exp(v->x10), std::exp(v->x20), cfg.rate);
    return std::nullopt;
}

// Reference density at each point; name receives the oracle used.
std::vector<double> oracle_density(const RunConfig& cfg, const std::vector<RealVec>& xs, std::string& name) {
    std::vector<double> out;
    if (const auto* g = std::get_if<GbmParams>(&cfg.model.params)) {
        name = "gaussian";
        for (const auto& x : xs) out.push_back(gaussian_log_density(*g, x, cfg.model.reading));
    } else if (const auto* v = std::get_if<VgParams>(&cfg.model.params)) {
        name = "vg_conditional";
        for (const auto& x : xs) out.push_back(vg_conditional_density(*v, cfg.T, x));
    } else {
        name = "quadrature";
        out = quadrature_inversion(cfg.model, cfg.T, xs, cfg.oracle_radius, cfg.oracle_points);
    }
    return out;
}

// points^n oracle points within min(2 std, plateau) of the centre; cell centred and
// nudged off-centre so that no point sits exactly on a cusp at the centre
std::vector<RealVec> oracle_stencil(const DensityApproximant& ap, const ModelSpec& model, double T, int points) {
    const std::size_t n = ap.dimension();
    const LogMoments mom = log_moments(model, T);
    std::vector<double> radius(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Window w = ap.window().axis(k);
        const double plateau = window_plateau(w) > 0.0 ? window_plateau(w) : 0.5 * window_support(w);
        radius[k] = std::min(2.0 * mom.stddev[k], plateau);
    }
    std::vector<RealVec> pts;
    std::vector<int> idx(n, 0);
    while (true) {
        RealVec x(n);
        for (std::size_t k = 0; k < n; ++k)
            x[k] = ap.center()[k] + radius[k] * (-1.0 + (2.0 * idx[k] + 1.1) / points);
        pts.push_back(x);
        std::size_t k = 0;
        while (k < n && ++idx[k] == points) idx[k++] = 0;
        if (k == n) break;
    }
    return pts;
}

double max_error(const DensityApproximant& ap, const std::vector<RealVec>& xs, const std::vector<double>& want) {
    double err = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) err = std::max(err, std::abs(ap.eval(xs[i]).value - want[i]));
    return err;
}

// ---------------------------------------------------------------- commands

void run_density(const RunConfig& cfg, std::ostream& out) {
    require_two_dimensions(cfg, "density");
    const auto ap = build(cfg, cfg.plan.a);
    std::vector<GridAxis> grid = cfg.grid;
    if (grid.empty())
        for (std::size_t k = 0; k < 2; ++k) {
            const Window w = ap.window().axis(k);
            const double r = window_plateau(w) > 0.0 ? window_plateau(w) : window_support(w);
            grid.push_back({ap.center()[k] - r, ap.center()[k] + r, 41});
        }
    std::vector<double> xs1(grid[0].n), xs2(grid[1].n);
    for (int i = 0; i < grid[0].n; ++i) xs1[i] = grid[0].lo + (grid[0].hi - grid[0].lo) * i / (grid[0].n - 1);
    for (int j = 0; j < grid[1].n; ++j) xs2[j] = grid[1].lo + (grid[1].hi - grid[1].lo) * j / (grid[1].n - 1);
    const auto values = ap.eval_grid(xs1, xs2);
    std::ostringstream s;
    s << csv_comment(cfg, "density") << "x1,x2,density\n";
    for (std::size_t j = 0; j < xs2.size(); ++j)
        for (std::size_t i = 0; i < xs1.size(); ++i)
            s << fmt17(xs1[i]) << ',' << fmt17(xs2[j]) << ',' << fmt17(values[j * xs1.size() + i]) << '\n';
    out << s.str();
}

void run_price(const RunConfig& cfg, std::ostream& out) {
    require_two_dimensions(cfg, "price");
    const auto ap = build(cfg, cfg.plan.a);
    json doc = header(cfg, "price");
    doc["T"] = cfg.T;
    doc["r"] = cfg.rate;
    doc["approximant"] = approximant_summary(ap);
    json quotes = json::array();
    const auto* gbm = std::get_if<GbmParams>(&cfg.model.params);
    for (double K : cfg.strikes) {
        json q{{"K", K}};
        q["density"] = quote_json(price_spread_density(SpreadOption{K, cfg.T, cfg.rate}, ap, cfg.panels));
        if (gbm) {
            if (K == 0.0) {
                q["margrabe"] = quote_json(margrabe_price(*gbm, 0.0, 0.0));
                if (cfg.strict_paper) q["margrabe_printed"] = quote_json(margrabe_price(*gbm, 0.0, 0.0, FormReading::printed));
            }
            q["kirk"] = quote_json(kirk_price(*gbm, K));
        }
        if (auto mc = monte_carlo(cfg, K, cfg.mc_paths)) q["monte_carlo"] = mc_json(*mc);
        quotes.push_back(std::move(q));
    }
    doc["quotes"] = std::move(quotes);
    if (cfg.strict_paper)
        doc["note"] = "strict_paper: density built from the printed covariance reading; compare with the corrected run";
    out << doc.dump(2) << '\n';
}

void run_bound(const RunConfig& cfg, std::ostream& out) {
    TubeSpec tube{cfg.bound_delta.empty() ? analyticity_tube(cfg.model) : cfg.bound_delta, cfg.bound_M, cfg.bound_L};
    const BandChoice band = choose_band(cfg.eps, tube, cfg.bound_mode);
    RealVec shrunk = band.a;
    for (double& a : shrunk) a *= 0.99;
    const double at = approximation_bound(cfg.bound_mode, tube, band.a).total;
    const double below = approximation_bound(cfg.bound_mode, tube, shrunk).total;
    const BoundBreakdown& b = band.bound;
    json doc = header(cfg, "bound");
    doc["eps"] = cfg.eps;
    doc["mode"] = bound_mode_name(cfg.bound_mode);
    doc["tube"] = {{"delta", tube.delta}, {"M", tube.M}, {"L", tube.L}};
    doc["a"] = band.a;
    doc["c"] = band.c;
    doc["bound"] = {{"s_factors", b.s_factors}, {"prefactor", b.prefactor}, {"product", b.product},
                    {"exponential", b.exponential}, {"total", b.total}};
    doc["bound_at_0.99a"] = below;
    doc["contract_satisfied"] = at <= cfg.eps && (cfg.eps < below || band.c <= BandSearch{}.c_min);
    out << doc.dump(2) << '\n';
}

void run_converge(const RunConfig& cfg, std::ostream& out) {
    std::vector<double> sweep = cfg.sweep;
    std::sort(sweep.begin(), sweep.end());
    const std::size_t n = cfg.model.dimension();
    std::vector<RealVec> pts;
    std::vector<double> want;
    std::string oracle;
    std::ostringstream s;
    std::ostringstream rows;
    for (double a : sweep) {
        const auto ap = build(cfg, RealVec(n, a));
        if (pts.empty()) {
            // the same stencil, on the smallest plateau, for every band
            pts = oracle_stencil(ap, cfg.model, cfg.T, cfg.sweep_points);
            want = oracle_density(cfg, pts, oracle);
        }
        rows << fmt17(a) << ',' << fmt17(ap.budget().analytic()) << ',' << fmt17(ap.tail().value) << ','
             << fmt17(max_error(ap, pts, want)) << ',' << ap.table().size() << '\n';
    }
    s << csv_comment(cfg, "converge") << "# oracle=" << oracle << "\n"
      << "a,analytic_bound,tail,realized_error,coefficients\n"
      << rows.str();
    out << s.str();
}

bool run_validate(const RunConfig& cfg, std::ostream& out) {
    json doc = header(cfg, "validate");
    bool ok = true;
    const std::size_t n = cfg.model.dimension();

    {
        RealVec zero(n, 0.0);
        const double origin = std::abs(char_function(cfg.model, std::span<const double>(zero), cfg.T) - 1.0);
        double herm = 0.0;
        for (double s : {0.3, 1.7, 6.0}) {
            RealVec zp(n), zm(n);
            for (std::size_t k = 0; k < n; ++k) zp[k] = s * (k % 2 ? -0.6 : 1.0), zm[k] = -zp[k];
            const Complex a = char_function(cfg.model, std::span<const double>(zp), cfg.T);
            const Complex b = char_function(cfg.model, std::span<const double>(zm), cfg.T);
            herm = std::max(herm, std::abs(a - std::conj(b)));
        }
        const bool pass = origin <= 1e-14 && herm <= 1e-12;
        doc["characteristic_function"] = {{"origin_error", origin}, {"hermitian_error", herm}, {"pass", pass}};
        ok = ok && pass;
    }

    const auto ap = build(cfg, cfg.plan.a);
    json summary = approximant_summary(ap);
    if (n == 2) {
        const double mass = mass_check(ap, 512);
        summary["mass"] = mass;
        summary["pass"] = std::abs(mass - 1.0) <= 1e-3;
        ok = ok && std::abs(mass - 1.0) <= 1e-3;
    }
    doc["approximant"] = summary;

    {
        const auto pts = oracle_stencil(ap, cfg.model, cfg.T, 5);
        std::string oracle;
        json d;
        try {
            const auto want = oracle_density(cfg, pts, oracle);
            const double err = max_error(ap, pts, want);
            d = {{"oracle", oracle}, {"max_error", err}, {"tolerance", cfg.validate_tolerance},
                 {"pass", err <= cfg.validate_tolerance}};
            ok = ok && err <= cfg.validate_tolerance;
        } catch (const BoxTooSmallError& e) {
            d = {{"oracle", oracle}, {"error", e.what()}, {"pass", false}};
            ok = false;
        }
        doc["density_oracle"] = d;
    }

    if (n == 2 && !std::holds_alternative<LevyTriplet>(cfg.model.params)) {
        const PriceQuote q = price_spread_density(SpreadOption{0.0, cfg.T, cfg.rate}, ap, cfg.panels);
        json p{{"K", 0.0}, {"density", quote_json(q)}};
        bool pass = true;
        if (const auto* g = std::get_if<GbmParams>(&cfg.model.params)) {
            const double m = margrabe_price(*g, 0.0, 0.0).value;
            p["margrabe"] = m;
            p["relative_difference"] = std::abs(q.value - m) / m;
            pass = std::abs(q.value - m) <= 1e-3 * m;
        } else if (auto mc = monte_carlo(cfg, 0.0, cfg.validate_paths)) {
            p["monte_carlo"] = mc_json(*mc);
            pass = std::abs(q.value - mc->estimate) <= 3.0 * mc->standard_error + q.analytic_budget;
        }
        p["pass"] = pass;
        doc["pricing"] = p;
        ok = ok && pass;
    }
    doc["pass"] = ok;
    out << doc.dump(2) << '\n';
    return ok;
}

json error_doc(const char* status, int code, const std::vector<std::string>& errors) {
    return {{"status", status}, {"exit_code", code}, {"errors", errors}};
}

}  // namespace

Command parse_command(const std::string& name) {
    if (name == "density") return Command::density;
    if (name == "price") return Command::price;
    if (name == "bound") return Command::bound;
    if (name == "converge") return Command::converge;
    if (name == "validate") return Command::validate;
    throw ConfigError("unknown command '" + name + "' (expected density, price, bound, converge or validate)");
}

bool execute(const RunConfig& cfg, Command command, std::ostream& out) {
    std::ostringstream buffer;
    bool ok = true;
    switch (command) {
        case Command::density: run_density(cfg, buffer); break;
        case Command::price: run_price(cfg, buffer); break;
        case Command::bound: run_bound(cfg, buffer); break;
        case Command::converge: run_converge(cfg, buffer); break;
        case Command::validate: ok = run_validate(cfg, buffer); break;
    }
    if (cfg.output.empty()) {
        out << buffer.str();
    } else {
        std::ofstream file(cfg.output, std::ios::binary);
        if (!file) throw ConfigError("cannot write output file '" + cfg.output + "'");
        file << buffer.str();
    }
    return ok;
}

int run(const std::string& command, const std::string& config_path, const Overrides& overrides, std::ostream& out,
        std::ostream& err) {
    try {
        const Command c = parse_command(command);
        const RunConfig cfg = parse_config(config_path, overrides);
        if (execute(cfg, c, out)) return 0;
        err << error_doc("validation_failed", 1, {"one or more validation checks failed; see the report"}).dump(2)
            << '\n';
        return 1;
    } catch (const ConfigError& e) {
        err << error_doc("config_error", 2, e.violations()).dump(2) << '\n';
        return 2;
    } catch (const Error& e) {
        err << error_doc("numeric_error", 1, {e.what()}).dump(2) << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << error_doc("numeric_error", 1, {e.what()}).dump(2) << '\n';
        return 1;
    }
}

}  // namespace cardinal::cli
