#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cardinal {

using Complex = std::complex<double>;
using RealVec = std::vector<double>;
using ComplexVec = std::vector<Complex>;
using IndexVec = std::vector<int>;

struct GbmParams {
    double r = 0.0;
    double T = 1.0;
    double rho = 0.0;
    double sigma1 = 0.2;
    double sigma2 = 0.2;
    double s10 = 1.0;
    double s20 = 1.0;

    std::vector<std::string> violations() const;
};

struct SvParams {
    double r = 0.0;
    double T = 1.0;
    double rho = 0.0;
    double rho1 = 0.0;
    double rho2 = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    double v0 = 0.04;
    double kappa = 1.0;
    double mu = 0.04;
    double sigma_v = 0.1;
    double s10 = 1.0;
    double s20 = 1.0;

    std::vector<std::string> violations() const;
};

struct VgParams {
    double T = 1.0;
    double a_plus = 2.0;
    double a_minus = 3.0;
    double lam = 1.0;
    double alpha_mix = 0.5;
    double x10 = 0.0;
    double x20 = 0.0;

    std::vector<std::string> violations() const;
};

struct LevyJump {
    RealVec point;
    double mass = 0.0;
};

// Generating triplet (A, b, jumps) with a finite atomic Levy measure.
struct LevyTriplet {
    std::vector<RealVec> cov;
    RealVec drift;
    std::vector<LevyJump> jumps;

    std::size_t dimension() const { return drift.size(); }
    std::vector<std::string> violations() const;
};

// Which printed form of the example models to evaluate.  `corrected` is the
// dimensionally consistent one; `printed` keeps the literal GBM covariance
// off-diagonal (sigma1^2 sigma2^2 rho) for side-by-side comparison.
enum class FormReading { corrected, printed };

struct ModelSpec {
    std::variant<GbmParams, SvParams, VgParams, LevyTriplet> params;
    FormReading reading = FormReading::corrected;
    double tube_cap = 8.0;
    double sv_tube = 0.5;

    std::size_t dimension() const;
    // Maturity recorded in the parameters; triplets have none and report 0.
    double maturity() const;
    std::string family() const;
    std::vector<std::string> violations() const;
    void validate() const;
};

ModelSpec make_model(GbmParams p);
ModelSpec make_model(SvParams p);
ModelSpec make_model(VgParams p);
ModelSpec make_model(LevyTriplet p);

// Phi(z, t) = E[exp(i <z, X_t>)] for complex z inside the tube.
Complex char_function(const ModelSpec& model, std::span<const Complex> z, double t);
Complex char_function(const ModelSpec& model, std::span<const double> z, double t);

// -1/2 <Ay,y> - i <b,y> - sum_j mass_j (1 - e^{i<y,x_j>} + i<y,x_j> 1{|x_j| <= 1}).
Complex levy_khintchine_exponent(const LevyTriplet& triplet, std::span<const Complex> y);

RealVec analyticity_tube(const ModelSpec& model);

// Evaluates |Phi| on a grid over the boundary of the tube and throws
// DomainError if anything is non-finite.
void probe_tube(const ModelSpec& model, double t, int points_per_axis = 9);

struct LogMoments {
    RealVec mean;
    RealVec stddev;
};

// Mean and standard deviation of each log-price coordinate, from finite
// differences of log Phi at the origin.
LogMoments log_moments(const ModelSpec& model, double t);

// Default recentring point: mean log-price for GBM, SV and triplets, the
// initial log-price for VG.
RealVec default_center(const ModelSpec& model, double t);

// Parses {"gbm": {...}} style documents.  Unknown keys are violations.
ModelSpec model_from_json(std::string_view text);
std::string model_to_json(const ModelSpec& model);

// Stable 64-bit hash of the canonical JSON form.
std::string model_hash(const ModelSpec& model);

}  // namespace cardinal
