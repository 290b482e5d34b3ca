#include "lncmi/mathcore.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lncmi/errors.hpp"

namespace lncmi {

double digamma(double x) {
    if (!(x > 0.0)) {
        throw error("digamma: domain error, x must be positive (got " + std::to_string(x) + ")");
    }
    double result = 0.0;
    // Shift until the asymptotic series is accurate to well below 1e-13.
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    // psi(x) ~ ln x - 1/(2x) - sum B_2n / (2n x^2n), terms through x^-12.
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double series = 0.0;
    series += inv2 * (1.0 / 12.0);
    series -= inv2 * inv2 * (1.0 / 120.0);
    series += inv2 * inv2 * inv2 * (1.0 / 252.0);
    series -= inv2 * inv2 * inv2 * inv2 * (1.0 / 240.0);
    series += inv2 * inv2 * inv2 * inv2 * inv2 * (1.0 / 132.0);
    series -= inv2 * inv2 * inv2 * inv2 * inv2 * inv2 * (691.0 / 32760.0);
    return result + std::log(x) - 0.5 * inv - series;
}

double gamma_k(std::size_t k) {
    if (k < 1) throw error("gamma_k: k must be >= 1");
    return digamma(static_cast<double>(k)) - std::log(static_cast<double>(k));
}

double unit_ball_volume_coeff(std::size_t d) {
    if (d < 1) throw error("unit_ball_volume_coeff: d must be >= 1");
    const double dd = static_cast<double>(d);
    return std::exp(0.5 * dd * std::log(M_PI) - std::lgamma(0.5 * dd + 1.0));
}

namespace {

void check_symmetric(const std::vector<double>& a, std::size_t d) {
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    const double tol = 1e-12 * std::max(scale, 1.0);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = r + 1; c < d; ++c) {
            if (std::abs(a[r * d + c] - a[c * d + r]) > tol) {
                throw error("eigh: matrix is not symmetric");
            }
        }
    }
}

}  // namespace

SymmetricEigenResult eigh(const std::vector<double>& a, std::size_t d) {
    if (d < 1 || a.size() != d * d) throw error("eigh: bad dimensions");
    check_symmetric(a, d);

    std::vector<double> m = a;
    std::vector<double> q(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) q[i * d + i] = 1.0;

    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    const double stop = 1e-15 * std::max(scale, 1e-300);

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t r = p + 1; r < d; ++r) off = std::max(off, std::abs(m[p * d + r]));
        if (off <= stop) break;

        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t r = p + 1; r < d; ++r) {
                const double apq = m[p * d + r];
                if (std::abs(apq) <= stop) continue;
                const double app = m[p * d + p];
                const double aqq = m[r * d + r];
                const double theta = 0.5 * (aqq - app) / apq;
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = (theta >= 0.0 ? 1.0 : -1.0) /
                        (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < d; ++i) {
                    const double mip = m[i * d + p];
                    const double miq = m[i * d + r];
                    m[i * d + p] = c * mip - s * miq;
                    m[i * d + r] = s * mip + c * miq;
                }
                for (std::size_t i = 0; i < d; ++i) {
                    const double mpi = m[p * d + i];
                    const double mqi = m[r * d + i];
                    m[p * d + i] = c * mpi - s * mqi;
                    m[r * d + i] = s * mpi + c * mqi;
                }
                for (std::size_t i = 0; i < d; ++i) {
                    const double qip = q[i * d + p];
                    const double qiq = q[i * d + r];
                    q[i * d + p] = c * qip - s * qiq;
                    q[i * d + r] = s * qip + c * qiq;
                }
            }
        }
    }

    // Order descending and fix signs.
    std::vector<std::size_t> order(d);
    for (std::size_t i = 0; i < d; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return m[x * d + x] > m[y * d + y]; });

    SymmetricEigenResult out;
    out.d = d;
    out.eigenvalues.resize(d);
    out.eigenvectors.assign(d * d, 0.0);
    for (std::size_t col = 0; col < d; ++col) {
        const std::size_t src = order[col];
        out.eigenvalues[col] = m[src * d + src];
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double v = std::abs(q[i * d + src]);
            if (v > best) {
                best = v;
                arg = i;
            }
        }
        const double sign = q[arg * d + src] < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < d; ++i) out.eigenvectors[i * d + col] = sign * q[i * d + src];
    }
    return out;
}

double deterministic_sum(std::vector<double> terms) {
    if (terms.empty()) return 0.0;
    std::sort(terms.begin(), terms.end());
    // Pairwise tree reduction in place.
    std::size_t n = terms.size();
    while (n > 1) {
        std::size_t half = n / 2;
        for (std::size_t i = 0; i < half; ++i) terms[i] = terms[2 * i] + terms[2 * i + 1];
        if (n % 2 == 1) {
            terms[half] = terms[n - 1];
            ++half;
        }
        n = half;
    }
    return terms[0];
}

}  // namespace lncmi
