#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cardinal/models.hpp"
#include "cardinal/windows.hpp"

namespace cardinal {

// |m_k| <= max_index[k] for every coordinate.
struct BoxTruncation {
    std::vector<int> max_index;
};

// Shell-by-shell expansion until two consecutive shells are entirely below
// tau.  Optional caps bound the largest shell and the per-axis index.
struct ThresholdTruncation {
    double tau = 1e-12;
    int max_shell = 4096;
    std::vector<int> cap;
};

using Truncation = std::variant<BoxTruncation, ThresholdTruncation>;

struct SamplingPlan {
    RealVec a;
    Truncation trunc = ThresholdTruncation{};
    RealVec x0;

    std::size_t dimension() const { return a.size(); }
    double spacing(std::size_t k) const;
    void validate() const;
};

enum class TailStatus { ok, divergent, capped };

struct TailEstimate {
    double value = 0.0;
    TailStatus status = TailStatus::ok;
};

struct CoefficientTable {
    std::size_t dim = 0;
    std::vector<int> indices;  // dim entries per coefficient, shell order
    ComplexVec values;
    std::vector<int> shell;        // shell of each retained coefficient
    std::vector<double> shell_mass;  // sum |f| over every visited point of shell s
    double below_threshold_mass = 0.0;  // sampled but dropped inside visited shells
    double extrapolated_mass = 0.0;     // estimate for shells never visited
    TailStatus status = TailStatus::ok;
    bool hermitian = false;

    std::size_t size() const { return values.size(); }
    std::span<const int> index(std::size_t i) const { return {indices.data() + i * dim, dim}; }
    double dropped_mass() const { return below_threshold_mass + extrapolated_mass; }
    double retained_mass() const;
    std::vector<int> max_abs_index() const;
};

using SampledFunction = std::function<Complex(std::span<const double>)>;

struct SampleOptions {
    // f(-z) = conj(f(z)): evaluate half the grid and mirror.
    bool hermitian = false;
    unsigned threads = 0;
};

CoefficientTable sample_coefficients(const SampledFunction& f, const SamplingPlan& plan,
                                     const SampleOptions& options = {});

Complex reconstruct(const CoefficientTable& table, const SamplingPlan& plan, const WindowSpec& w,
                    std::span<const double> x);

// Upper estimate of sum over discarded m of |c_m| sup|J|, using an
// operator-norm constant per axis (defaults to the proven trapezoid constant 2.834).
TailEstimate tail_estimate(const CoefficientTable& table, const SamplingPlan& plan,
                           std::optional<double> norm_per_axis = std::nullopt);

inline constexpr double kOperatorNormConstant = 2.834;

std::string table_to_json(const CoefficientTable& table, const SamplingPlan& plan);
std::string table_to_csv(const CoefficientTable& table);
CoefficientTable table_from_json(const std::string& text);

// Shell number of m in the sampling order: max_k ceil(|m_k| / ratio_k).
int shell_of(std::span<const int> m, std::span<const double> ratio);

// Deterministic chunked loop over [0, n); each index is owned by exactly one
// worker, so results do not depend on the worker count.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace cardinal
