#pragma once

#include <cstddef>
#include <vector>

namespace lncmi {

// psi(x) for x > 0, absolute error below 1e-12 for x >= 1.
// Recurrence up the argument, then the Bernoulli asymptotic series.
double digamma(double x);

// gamma_k = psi(k) - log(k); the naive kNN entropy bias term. Always <= 0,
// increasing toward 0 as k grows.
double gamma_k(std::size_t k);

// Volume of the d-dimensional unit L2 ball, pi^(d/2) / Gamma(d/2 + 1).
double unit_ball_volume_coeff(std::size_t d);

// Eigendecomposition of a small symmetric matrix (cyclic Jacobi).
// Eigenvalues descending; each eigenvector's largest-magnitude component is
// made positive so results are reproducible across platforms.
struct SymmetricEigenResult {
    std::size_t d = 0;
    std::vector<double> eigenvalues;    // size d, descending
    std::vector<double> eigenvectors;   // d x d row-major, column q = eigenvector q

    double vec(std::size_t row, std::size_t q) const { return eigenvectors[row * d + q]; }
};

// A is d x d row-major and must be symmetric within 1e-12 relative to its
// largest entry.
SymmetricEigenResult eigh(const std::vector<double>& a, std::size_t d);

// Sums per-point terms in a canonical order: values are sorted ascending and
// reduced by a pairwise tree. The result depends only on the multiset of
// terms, so shuffling sample order or changing the worker count cannot move
// the estimate by even one ulp.
double deterministic_sum(std::vector<double> terms);

}  // namespace lncmi
