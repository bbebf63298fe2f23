#pragma once

#include <cardinal/bounds.hpp>
#include <cardinal/models.hpp>
#include <cardinal/sampling.hpp>
#include <cardinal/windows.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cardinal::cli {

struct GridAxis {
    double lo = 0.0;
    double hi = 0.0;
    int n = 41;
};

// Command-line values that replace the matching config entries before validation.
struct Overrides {
    std::optional<double> strike;
    std::optional<double> a;
    std::optional<double> tau;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output;
    bool strict_paper = false;
};

struct RunConfig {
    ModelSpec model;
    double T = 1.0;  // the model's maturity; a top-level "T" is required for triplets
    bool strict_paper = false;

    WindowKind window = WindowKind::trapezoid;
    SamplingPlan plan;  // x0 empty means the model's default centre
    RealVec alpha;
    double coverage_sigmas = 6.0;
    unsigned threads = 0;

    // density: empty means the plateau around the centre, 41 points per axis
    std::vector<GridAxis> grid;

    std::vector<double> strikes{0.0};
    double rate = 0.0;
    std::size_t panels = 64;
    std::size_t mc_paths = 0;
    std::uint64_t seed = 42;

    double eps = 1e-8;
    BoundMode bound_mode = BoundMode::sampling_sup;
    RealVec bound_delta;  // empty means the model's analyticity tube
    double bound_M = 1.0;
    double bound_L = 1.0;

    std::vector<double> sweep{4.0, 6.0, 8.0, 10.0};
    int sweep_points = 9;

    std::size_t validate_paths = 200000;
    double validate_tolerance = 1e-6;
    double oracle_radius = 100.0;
    std::size_t oracle_points = 401;

    std::string output;       // empty means standard output
    std::string canonical;    // validated config, re-serialised with sorted keys
    std::string hash;         // FNV-1a of canonical

    WindowSpec window_spec(const RealVec& a) const { return WindowSpec{window, a}; }
};

// Throws ConfigError listing every violation found.
RunConfig parse_config_text(const std::string& text, const Overrides& overrides = {});
RunConfig parse_config(const std::filesystem::path& path, const Overrides& overrides = {});

}  // namespace cardinal::cli
