#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "lncmi/dataset.hpp"
#include "lncmi/errors.hpp"

namespace lncmi {

// Synthetic relationships Y = f(X) + noise with noise uniform on
// [-sigma/2, sigma/2]. The 2-D forms and the 5-D constructions are documented
// reconstructions (see family_description); gaussian_rho and
// independent_uniform are the usual closed-form references.
enum class Family {
    linear,            // f(x) = x
    quadratic,         // f(x) = 4 (x - 1/2)^2
    cubic,             // f(x) = (2x - 1)^3
    sine_low_freq,     // f(x) = sin(2 pi x)
    sine_high_freq,    // f(x) = sin(16 pi x)
    sqrt_root,         // f(x) = sqrt(x)
    exponential,       // f(x) = e^x
    step,              // f(x) = [x >= 1/2]
    linear_5d,         // Y = X1 + X2 + X3 + X4 + noise, unit weights
    quadratic_5d,      // Y = X1^2 + X2^2 + X3^2 + X4^2 + noise
    gaussian_rho,      // standard bivariate normal with correlation rho
    independent_uniform  // X, Y i.i.d. U(0,1)
};

Family family_from_name(const std::string& name);
std::string family_name(Family family);
std::string family_description(Family family);
std::size_t family_dimension(Family family);

struct RelationshipSpec {
    Family family = Family::linear;
    double noise_sigma = 0.0;
    std::size_t n = 5000;
    std::uint64_t seed = 0;
    double rho = 0.0;  // gaussian_rho only
};

// X (or X1..X4) i.i.d. U(0,1); deterministic given the seed.
Dataset generate(const RelationshipSpec& spec);

struct TruthValue {
    enum class Method { closed_form, quadrature };
    double value = 0.0;
    Method method = Method::closed_form;
    double est_error = 0.0;  // bound on the oracle's own error
};

struct truth_unavailable : error {
    explicit truth_unavailable(const std::string& what) : error(what) {}
};

// Ground-truth (multi-)information. Functional families use
// I = H(Y) - ln(sigma) with H(Y) integrated from the exact mixture density of
// f(U) + noise; linear additionally has the closed form sigma/2 - ln(sigma).
// quadratic_5d is quadrature-only and slow; it throws truth_unavailable
// unless allow_slow is set.
TruthValue true_mi(const RelationshipSpec& spec, bool allow_slow = false);

// Forces the quadrature route even where a closed form exists, so the two
// can be checked against each other.
TruthValue true_mi_quadrature(const RelationshipSpec& spec, bool allow_slow = false);

// Closed form for the linear family, sigma/2 - ln(sigma), valid for
// 0 < sigma <= 1.
double linear_true_mi(double sigma);

// Inverse of linear_true_mi on (0, 1]: the sigma whose linear-family MI is I
// (requires I >= 0.5).
double sigma_for_linear_mi(double i_target);

// Spearman rank correlation with averaged tied ranks. Throws on length
// mismatch or zero rank variance.
double spearman(std::span<const double> xs, std::span<const double> ys);

}  // namespace lncmi
