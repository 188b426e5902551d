#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "complex_matrix.hpp"
#include "errors.hpp"
#include "jacobi.hpp"

namespace opfree {

namespace detail {

// Levels lo..hi of the continued fraction, evaluated innermost-first with a
// zero tail: 1/(xi - a_lo - w_lo/(xi - a_{lo+1} - ...)). Indices are 0-based
// here; callers expose 1-based levels.
inline Complex cf_levels(const JacobiCoefficients& jc, Complex xi, std::size_t lo,
                         std::size_t hi) {
    Complex value = 0.0;
    for (std::size_t k = hi + 1; k-- > lo;) {
        Complex den = xi - jc.alphas[k];
        if (k < hi) den -= jc.omegas[k] * value;
        if (den == Complex(0.0, 0.0))
            throw std::logic_error("continued fraction: zero denominator off the real axis");
        value = Complex(1.0, 0.0) / den;
    }
    return value;
}

inline void require_upper_half(Complex xi, const char* who) {
    if (!(xi.imag() > 0.0))
        throw DomainError(std::string(who) + ": evaluation point must satisfy Im > 0");
}

} // namespace detail

// Truncated continued fraction for the Cauchy transform. For an exhausted
// coefficient set the fraction terminates on its own, so any requested depth
// beyond the data is clamped; otherwise asking deeper than the data is an
// error rather than a silently shallower answer.
inline Complex cf_eval(const JacobiCoefficients& jc, Complex xi, std::size_t depth) {
    detail::require_upper_half(xi, "cf_eval");
    if (depth == 0) throw DomainError("cf_eval: depth must be at least 1");
    const std::size_t m = jc.alphas.size();
    if (depth > m) {
        if (!jc.exhausted)
            throw DomainError("cf_eval: depth " + std::to_string(depth) + " exceeds the " +
                              std::to_string(m) + " available levels");
        depth = m;
    }
    return detail::cf_levels(jc, xi, 0, depth - 1);
}

// n-th convergent g_{n,n}: the fraction truncated after alpha_n. Unlike
// cf_eval this never clamps; the caller asked for a specific truncation.
inline Complex convergent(const JacobiCoefficients& jc, std::size_t n, Complex xi) {
    detail::require_upper_half(xi, "convergent");
    if (n == 0) throw DomainError("convergent: order must be at least 1");
    if (n > jc.alphas.size())
        throw DomainError("convergent: order " + std::to_string(n) + " exceeds the " +
                          std::to_string(jc.alphas.size()) + " available levels");
    return detail::cf_levels(jc, xi, 0, n - 1);
}

// Continued fraction starting at a deeper level: 1/(xi - a_start - ...),
// `depth` levels long. start is 1-based; start = 1 reproduces cf_eval.
inline Complex tail_fraction(const JacobiCoefficients& jc, std::size_t start, Complex xi,
                             std::size_t depth) {
    detail::require_upper_half(xi, "tail_fraction");
    if (start == 0) throw DomainError("tail_fraction: start is 1-based");
    if (depth == 0) throw DomainError("tail_fraction: depth must be at least 1");
    const std::size_t m = jc.alphas.size();
    if (start > m)
        throw DomainError("tail_fraction: start " + std::to_string(start) + " exceeds the " +
                          std::to_string(m) + " available levels");
    const std::size_t avail = m - start + 1;
    if (depth > avail) {
        if (!jc.exhausted)
            throw DomainError("tail_fraction: depth " + std::to_string(depth) +
                              " exceeds the " + std::to_string(avail) +
                              " levels available from start " + std::to_string(start));
        depth = avail;
    }
    return detail::cf_levels(jc, xi, start - 1, start + depth - 2);
}

// Pointwise density reconstruction on a grid.
struct DensityGrid {
    std::vector<double> xs;
    double epsilon = 0.0;
    std::vector<double> densities;
};

// Stieltjes inversion at a fixed offset above the real axis:
// density(x) = -Im G(x + i*epsilon) / pi, clamped to be nonnegative.
inline DensityGrid stieltjes_density(const std::function<Complex(Complex)>& g,
                                     std::vector<double> xs, double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw DomainError("stieltjes_density: epsilon must be positive and finite");
    if (xs.empty()) throw DomainError("stieltjes_density: empty grid");
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        if (!(xs[i] < xs[i + 1]))
            throw DomainError("stieltjes_density: grid must be strictly increasing");
    for (double x : xs)
        if (!std::isfinite(x)) throw DomainError("stieltjes_density: non-finite grid point");

    constexpr double pi = 3.14159265358979323846;
    DensityGrid out;
    out.epsilon = epsilon;
    out.densities.reserve(xs.size());
    for (double x : xs) {
        const Complex value = g(Complex(x, epsilon));
        out.densities.push_back(std::max(0.0, -value.imag() / pi));
    }
    out.xs = std::move(xs);
    return out;
}

} // namespace opfree
