#pragma once

#include <string>
#include <vector>

#include "cardinal/models.hpp"

namespace cardinal {

// Functions analytic and bounded in the strip |Im z_k| < delta_k: M bounds
// |g| there, L bounds the L1 norm on horizontal lines.
struct TubeSpec {
    RealVec delta;
    double M = 1.0;
    double L = 1.0;

    std::size_t dimension() const { return delta.size(); }
    void validate() const;
};

struct BoundIngredients {
    double a = 0.0;
    double delta = 0.0;
    double S = 0.0;

    double mu(double xi) const;
    // Alternating tail sum; max_terms = 0 runs until a term drops below 1e-16.
    double C(double xi, int max_terms = 0) const;
    // Number of terms the untruncated C(xi) uses.
    int terms_used(double xi) const;
};

BoundIngredients bound_ingredients(double a_k, double delta_k);

// 2 delta int_0^a (mu(xi) - C(a - xi) - C(a + xi)) cos(xi x) d xi.
double vartheta_eval(double a_k, double delta_k, double x);

// (1 / (2 delta)) sech(pi x / (2 delta)); vartheta / (2 delta) approximates it.
double kernel_k1(double delta_k, double x);

enum class BoundMode { best_sup, best_l1, sampling_sup, sampling_l1 };

BoundMode parse_bound_mode(const std::string& name);
std::string bound_mode_name(BoundMode mode);

struct BoundBreakdown {
    BoundMode mode = BoundMode::sampling_sup;
    RealVec s_factors;
    double prefactor = 0.0;
    double product = 0.0;      // prod S_k / (2 delta_k)
    double exponential = 0.0;  // exp(-min a_k delta_k)
    double total = 0.0;
};

// total = prefactor * prod(S_k / (2 delta_k)) * exp(-min a_k delta_k).  In the
// isotropic parametrisation a_k = c / delta_k the total is strictly
// decreasing once c exceeds the dimension n.
BoundBreakdown approximation_bound(BoundMode mode, const TubeSpec& tube, const RealVec& a);

struct BandChoice {
    RealVec a;
    double c = 0.0;
    BoundBreakdown bound;
};

struct BandSearch {
    double c_min = 0.5;
    double c_max = 400.0;
    double rel_tol = 1e-3;
};

// Smallest a_k = c / delta_k (c by bisection) with bound <= target_eps.
BandChoice choose_band(double target_eps, const TubeSpec& tube, BoundMode mode, const BandSearch& search = {});

}  // namespace cardinal
