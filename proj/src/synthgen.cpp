#include "lncmi/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "lncmi/errors.hpp"
#include "lncmi/quadrature.hpp"
#include "lncmi/rng.hpp"

namespace lncmi {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

struct FamilyMeta {
    Family family;
    const char* name;
    const char* description;
    std::size_t dimension;
};

constexpr FamilyMeta kFamilies[] = {
    {Family::linear, "linear", "Y = X + noise", 2},
    {Family::quadratic, "quadratic", "Y = 4(X - 1/2)^2 + noise", 2},
    {Family::cubic, "cubic", "Y = (2X - 1)^3 + noise", 2},
    {Family::sine_low_freq, "sine-low-freq", "Y = sin(2 pi X) + noise", 2},
    {Family::sine_high_freq, "sine-high-freq", "Y = sin(16 pi X) + noise", 2},
    {Family::sqrt_root, "sqrt", "Y = sqrt(X) + noise", 2},
    {Family::exponential, "exponential", "Y = exp(X) + noise", 2},
    {Family::step, "step", "Y = [X >= 1/2] + noise", 2},
    {Family::linear_5d, "5d-linear", "Y = X1 + X2 + X3 + X4 + noise, unit weights", 5},
    {Family::quadratic_5d, "5d-quadratic", "Y = X1^2 + X2^2 + X3^2 + X4^2 + noise", 5},
    {Family::gaussian_rho, "gaussian-rho", "standard bivariate normal, correlation rho", 2},
    {Family::independent_uniform, "independent-uniform", "X, Y i.i.d. U(0,1)", 2},
};

const FamilyMeta& meta(Family family) {
    for (const auto& m : kFamilies) {
        if (m.family == family) return m;
    }
    throw error("unknown family");
}

double f_of_x(Family family, double x) {
    switch (family) {
        case Family::linear: return x;
        case Family::quadratic: return 4.0 * (x - 0.5) * (x - 0.5);
        case Family::cubic: {
            const double t = 2.0 * x - 1.0;
            return t * t * t;
        }
        case Family::sine_low_freq: return std::sin(2.0 * kPi * x);
        case Family::sine_high_freq: return std::sin(16.0 * kPi * x);
        case Family::sqrt_root: return std::sqrt(x);
        case Family::exponential: return std::exp(x);
        case Family::step: return x >= 0.5 ? 1.0 : 0.0;
        default: throw error("not a 1-D functional family");
    }
}

}  // namespace

Family family_from_name(const std::string& name) {
    for (const auto& m : kFamilies) {
        if (name == m.name) return m.family;
    }
    throw error("unknown family: " + name);
}

std::string family_name(Family family) { return meta(family).name; }
std::string family_description(Family family) { return meta(family).description; }
std::size_t family_dimension(Family family) { return meta(family).dimension; }

Dataset generate(const RelationshipSpec& spec) {
    if (spec.n < 1) throw error("generate: n must be >= 1");
    if (spec.noise_sigma < 0.0) throw error("generate: sigma must be >= 0");
    Rng rng(spec.seed);
    const std::size_t n = spec.n;
    const double sigma = spec.noise_sigma;

    switch (spec.family) {
        case Family::gaussian_rho: {
            if (std::abs(spec.rho) >= 1.0) throw error("generate: |rho| must be < 1");
            std::vector<double> vals(n * 2);
            const double mix = std::sqrt(1.0 - spec.rho * spec.rho);
            for (std::size_t i = 0; i < n; ++i) {
                const double z1 = rng.normal();
                const double z2 = rng.normal();
                vals[2 * i] = z1;
                vals[2 * i + 1] = spec.rho * z1 + mix * z2;
            }
            return Dataset(std::move(vals), {"x", "y"});
        }
        case Family::independent_uniform: {
            std::vector<double> vals(n * 2);
            for (std::size_t i = 0; i < n; ++i) {
                vals[2 * i] = rng.uniform01();
                vals[2 * i + 1] = rng.uniform01();
            }
            return Dataset(std::move(vals), {"x", "y"});
        }
        case Family::linear_5d:
        case Family::quadratic_5d: {
            const bool squared = spec.family == Family::quadratic_5d;
            std::vector<double> vals(n * 5);
            for (std::size_t i = 0; i < n; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < 4; ++j) {
                    const double x = rng.uniform01();
                    vals[5 * i + j] = x;
                    s += squared ? x * x : x;
                }
                vals[5 * i + 4] = s + sigma * (rng.uniform01() - 0.5);
            }
            return Dataset(std::move(vals), {"x1", "x2", "x3", "x4", "y"});
        }
        default: {
            std::vector<double> vals(n * 2);
            for (std::size_t i = 0; i < n; ++i) {
                const double x = rng.uniform01();
                vals[2 * i] = x;
                vals[2 * i + 1] = f_of_x(spec.family, x) + sigma * (rng.uniform01() - 0.5);
            }
            return Dataset(std::move(vals), {"x", "y"});
        }
    }
}

namespace {

// Distribution of f(U), U ~ U(0,1): the CDF G and the points where G or its
// derivative is irregular, so the entropy quadrature can split there.
struct ResponseCdf {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> breakpoints;
    std::function<double(double)> cdf;
};

double irwin_hall4_cdf(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 4.0) return 1.0;
    static const double binom[5] = {1.0, 4.0, 6.0, 4.0, 1.0};
    double s = 0.0;
    double sign = 1.0;
    for (int j = 0; j <= static_cast<int>(t); ++j) {
        const double base = t - j;
        s += sign * binom[j] * base * base * base * base;
        sign = -sign;
    }
    return s / 24.0;
}

// CDF of X1^2 + X2^2 for i.i.d. U(0,1): piecewise closed form.
double sum2_squares_cdf(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 2.0) return 1.0;
    if (s <= 1.0) return kPi * s / 4.0;
    const auto anti = [](double u) {
        const double w = (2.0 - u) / u;
        return u * (std::asin(w) + std::sqrt(std::max(0.0, 1.0 - w * w)));
    };
    return kPi / 4.0 + 0.5 * (anti(s) - anti(1.0));
}

ResponseCdf response_cdf(Family family, bool allow_slow) {
    ResponseCdf out;
    switch (family) {
        case Family::linear:
            out = {0.0, 1.0, {0.0, 1.0}, [](double t) { return std::clamp(t, 0.0, 1.0); }};
            break;
        case Family::quadratic:
            out = {0.0, 1.0, {0.0, 1.0},
                   [](double t) { return std::sqrt(std::clamp(t, 0.0, 1.0)); }};
            break;
        case Family::cubic:
            out = {-1.0, 1.0, {-1.0, 0.0, 1.0}, [](double t) {
                       return 0.5 * (std::cbrt(std::clamp(t, -1.0, 1.0)) + 1.0);
                   }};
            break;
        case Family::sine_low_freq:
        case Family::sine_high_freq:
            // Full periods, so the arcsine law holds exactly for both.
            out = {-1.0, 1.0, {-1.0, 1.0}, [](double t) {
                       return 0.5 + std::asin(std::clamp(t, -1.0, 1.0)) / kPi;
                   }};
            break;
        case Family::sqrt_root:
            out = {0.0, 1.0, {0.0, 1.0}, [](double t) {
                       const double c = std::clamp(t, 0.0, 1.0);
                       return c * c;
                   }};
            break;
        case Family::exponential:
            out = {1.0, std::exp(1.0), {1.0, std::exp(1.0)}, [](double t) {
                       if (t <= 1.0) return 0.0;
                       return std::min(std::log(t), 1.0);
                   }};
            break;
        case Family::step:
            out = {0.0, 1.0, {0.0, 1.0}, [](double t) {
                       if (t < 0.0) return 0.0;
                       if (t < 1.0) return 0.5;
                       return 1.0;
                   }};
            break;
        case Family::linear_5d:
            out = {0.0, 4.0, {0.0, 1.0, 2.0, 3.0, 4.0}, irwin_hall4_cdf};
            break;
        case Family::quadratic_5d: {
            if (!allow_slow) {
                throw truth_unavailable(
                    "5d-quadratic truth requires the slow quadrature path; pass allow_slow");
            }
            // CDF of the 4-term sum: convolve the closed-form 2-term pieces.
            auto g2 = [](double s) {
                if (s <= 0.0 || s >= 2.0) return 0.0;
                if (s <= 1.0) return kPi / 4.0;
                return 0.5 * std::asin((2.0 - s) / s);
            };
            auto cdf4 = [g2](double t) {
                if (t <= 0.0) return 0.0;
                if (t >= 4.0) return 1.0;
                // P(S2 + S2' <= t); below u = t-2 the inner CDF saturates at 1.
                const double lo = std::max(0.0, t - 2.0);
                const double hi = std::min(2.0, t);
                double acc = sum2_squares_cdf(lo);
                std::vector<double> cuts{lo, hi};
                for (double c : {1.0, t - 1.0}) {
                    if (c > lo && c < hi) cuts.push_back(c);
                }
                std::sort(cuts.begin(), cuts.end());
                for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
                    acc += integrate(
                               [&](double u) { return g2(u) * sum2_squares_cdf(t - u); },
                               cuts[s], cuts[s + 1], 1e-11)
                               .value;
                }
                return std::min(acc, 1.0);
            };
            out = {0.0, 4.0, {0.0, 1.0, 2.0, 3.0, 4.0}, cdf4};
            break;
        }
        default:
            throw truth_unavailable("no truth oracle for family " + family_name(family));
    }
    return out;
}

TruthValue entropy_minus_noise(const ResponseCdf& g, double sigma) {
    // p(y) = (G(y + s/2) - G(y - s/2)) / s; H(Y) = -int p log p.
    const double half = 0.5 * sigma;
    const auto p = [&](double y) { return (g.cdf(y + half) - g.cdf(y - half)) / sigma; };
    const auto integrand = [&](double y) {
        const double v = p(y);
        return v > 1e-300 ? -v * std::log(v) : 0.0;
    };

    std::vector<double> cuts;
    cuts.push_back(g.lo - half);
    cuts.push_back(g.hi + half);
    for (double b : g.breakpoints) {
        cuts.push_back(b - half);
        cuts.push_back(b + half);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    TruthValue out;
    out.method = TruthValue::Method::quadrature;
    double h = 0.0;
    double err = 0.0;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double a = std::max(cuts[s], g.lo - half);
        const double b = std::min(cuts[s + 1], g.hi + half);
        if (!(b > a)) continue;
        const QuadResult q = integrate(integrand, a, b, 1e-10);
        h += q.value;
        err += q.est_error;
    }
    out.value = h - std::log(sigma);
    out.est_error = std::max(err, 1e-12);
    return out;
}

}  // namespace

double linear_true_mi(double sigma) {
    if (sigma <= 0.0 || sigma > 1.0) throw error("linear_true_mi: need 0 < sigma <= 1");
    return 0.5 * sigma - std::log(sigma);
}

double sigma_for_linear_mi(double i_target) {
    if (i_target < 0.5) throw error("sigma_for_linear_mi: linear-family MI is >= 0.5");
    double lo = std::log(1e-300);
    double hi = 0.0;  // log sigma
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double s = std::exp(mid);
        if (0.5 * s - std::log(s) > i_target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::exp(0.5 * (lo + hi));
}

TruthValue true_mi_quadrature(const RelationshipSpec& spec, bool allow_slow) {
    if (spec.family == Family::gaussian_rho || spec.family == Family::independent_uniform) {
        throw truth_unavailable("no mixture-density quadrature route for this family");
    }
    if (spec.noise_sigma <= 0.0) {
        throw truth_unavailable("mutual information diverges at sigma = 0");
    }
    return entropy_minus_noise(response_cdf(spec.family, allow_slow), spec.noise_sigma);
}

TruthValue true_mi(const RelationshipSpec& spec, bool allow_slow) {
    switch (spec.family) {
        case Family::gaussian_rho: {
            TruthValue out;
            out.value = -0.5 * std::log(1.0 - spec.rho * spec.rho);
            return out;
        }
        case Family::independent_uniform: {
            return TruthValue{};
        }
        case Family::linear: {
            TruthValue out;
            out.value = linear_true_mi(spec.noise_sigma);
            return out;
        }
        default: {
            if (spec.noise_sigma <= 0.0) {
                throw truth_unavailable("mutual information diverges at sigma = 0");
            }
            return entropy_minus_noise(response_cdf(spec.family, allow_slow), spec.noise_sigma);
        }
    }
}

namespace {

std::vector<double> average_ranks(std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw error("spearman: length mismatch");
    if (xs.size() < 2) throw error("spearman: need at least 2 observations");
    const std::vector<double> rx = average_ranks(xs);
    const std::vector<double> ry = average_ranks(ys);
    const std::size_t n = rx.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = rx[i] - mx;
        const double dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw error("spearman: zero rank variance, coefficient undefined");
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace lncmi
