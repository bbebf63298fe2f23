#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cardinal/bounds.hpp"
#include "cardinal/models.hpp"
#include "cardinal/sampling.hpp"
#include "cardinal/windows.hpp"

namespace cardinal {

struct ContourShift {
    RealVec alpha;
};

// Phi(z + i alpha, T) + Phi(z - i alpha, T) for real z.
Complex symmetrized_spectrum(const ModelSpec& model, const ContourShift& shift, double T, std::span<const double> z);

struct BuildOptions {
    // Required plateau coverage a_k / 2 >= coverage_sigmas * std_k + |x0_k - mean_k|.
    double coverage_sigmas = 6.0;
    bool verify_closed_form = true;
    bool compute_budget = true;
    unsigned threads = 0;
    // Replaces the model spectrum; used to build degenerate approximants in tests.
    SampledFunction spectrum_override;
};

struct ErrorBudget {
    double analytic_M = 0.0;  // sup-chain bound times the retained frequency volume
    double analytic_L = 0.0;  // L1-chain bound
    double tail = 0.0;        // truncated coefficients, in density units
    double M = 0.0;
    double L = 0.0;
    RealVec width;            // strip half-widths used for the bound
    double volume = 0.0;      // volume of the retained frequency box
    double kernel_leak = 0.0;  // mass of the retained kernels outside that box

    double analytic() const { return analytic_M > analytic_L ? analytic_M : analytic_L; }
    double total() const { return analytic() + tail; }
};

struct DensityValue {
    double value = 0.0;
    double imag_residue = 0.0;
    bool structural_zero = false;
    bool imag_warning = false;
};

class DensityApproximant {
public:
    const ModelSpec& model() const { return model_; }
    double maturity() const { return T_; }
    const SamplingPlan& plan() const { return plan_; }
    const WindowSpec& window() const { return window_; }
    const ContourShift& shift() const { return shift_; }
    const CoefficientTable& table() const { return table_; }
    const RealVec& center() const { return x0_; }
    const ErrorBudget& budget() const { return budget_; }
    TailEstimate tail() const { return tail_; }
    double verification_error() const { return verification_error_; }
    std::size_t dimension() const { return plan_.dimension(); }

    DensityValue eval(std::span<const double> x) const;

    // n = 2 only: p* on the tensor grid, out[j * xs1.size() + i] = p*(xs1[i], xs2[j]).
    std::vector<double> eval_grid(std::span<const double> xs1, std::span<const double> xs2,
                                  double* max_imag = nullptr) const;

    std::string header_json() const;
    std::string to_json() const;

private:
    friend DensityApproximant build_density_approximant(const ModelSpec&, const SamplingPlan&, const WindowSpec&,
                                                        const ContourShift&, double, const BuildOptions&);
    DensityApproximant() = default;
    void prepare_dense();
    double prefactor(std::span<const double> y) const;

    ModelSpec model_;
    double T_ = 0.0;
    SamplingPlan plan_;
    WindowSpec window_;
    ContourShift shift_;
    CoefficientTable table_;
    RealVec x0_;
    std::vector<Window> axes_;
    ErrorBudget budget_;
    TailEstimate tail_;
    double verification_error_ = 0.0;
    std::vector<int> extent_;  // max |m_k|
    ComplexVec dense_;         // n = 2: (2 M1 + 1) x (2 M2 + 1), row-major in m1
};

DensityApproximant build_density_approximant(const ModelSpec& model, const SamplingPlan& plan, const WindowSpec& window,
                                             const ContourShift& shift, double T, const BuildOptions& options = {});

DensityValue density_eval(const DensityApproximant& approx, std::span<const double> x);

// Tensor Gauss-Legendre integral of p* over the window support, with panels
// graded toward the centre.
double mass_check(const DensityApproximant& approx, std::size_t quadrature_points_per_axis);

// ∫ g(x) p*(x) dx on the same grid (n = 2); used for forward checks.
double integrate_against(const DensityApproximant& approx, std::size_t points_per_axis,
                         const std::function<double(double, double)>& g);

}  // namespace cardinal
