#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "log.hpp"
#include "measure.hpp"

namespace opfree {

// Recurrence data for the monic orthogonal polynomials of a probability
// measure: p_{m+1}(t) = (t - alpha_{m+1}) p_m(t) - omega_m p_{m-1}(t).
// Stored as alpha_1..alpha_M and omega_1..omega_{M-1}, all omega > 0.
// exhausted means the recurrence genuinely terminates after these levels,
// i.e. the data belongs to a measure supported on exactly M points.
struct JacobiCoefficients {
    std::vector<double> alphas;
    std::vector<double> omegas;
    bool exhausted = false;
};

inline JacobiCoefficients jacobi_coefficients(std::vector<double> alphas,
                                              std::vector<double> omegas, bool exhausted) {
    if (alphas.empty()) throw SchemaError("jacobi: at least one alpha required");
    if (omegas.size() + 1 != alphas.size())
        throw SchemaError("jacobi: omegas must be one shorter than alphas");
    for (double a : alphas)
        if (!std::isfinite(a)) throw SchemaError("jacobi: non-finite alpha");
    for (double w : omegas)
        if (!std::isfinite(w) || !(w > 0.0))
            throw SchemaError("jacobi: omegas must be strictly positive");
    return JacobiCoefficients{std::move(alphas), std::move(omegas), exhausted};
}

// Recurrence coefficients of a discrete measure via the Lanczos iteration for
// the multiplication operator on L^2(mu), with full reorthogonalization.
// Always returns exactly N alphas and N-1 omegas for an N-point measure,
// unless the weights are so degenerate that the recurrence dies early.
inline JacobiCoefficients jacobi_from_discrete(const DiscreteMeasure& m) {
    const std::size_t n = m.points.size();
    std::vector<std::vector<double>> basis;
    {
        std::vector<double> q0(n);
        for (std::size_t i = 0; i < n; ++i) q0[i] = std::sqrt(m.weights[i]);
        basis.push_back(std::move(q0));
    }

    auto dot = [n](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
        return s;
    };

    JacobiCoefficients jc;
    jc.exhausted = true;
    for (std::size_t level = 0; level < n; ++level) {
        const std::vector<double>& cur = basis.back();
        std::vector<double> t(n);
        for (std::size_t i = 0; i < n; ++i) t[i] = m.points[i] * cur[i];
        jc.alphas.push_back(dot(cur, t));
        if (level + 1 == n) break;

        // Project out every previous basis vector; a second pass keeps the
        // basis orthogonal to machine precision.
        std::vector<double> r = std::move(t);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) {
                const double c = dot(b, r);
                for (std::size_t i = 0; i < n; ++i) r[i] -= c * b[i];
            }

        const double beta = std::sqrt(dot(r, r));
        if (beta < 1e-13)
            throw NumericError("jacobi_from_discrete: recurrence breakdown at level " +
                               std::to_string(level + 1) +
                               " (nearly coincident support points)");
        const double omega = beta * beta;
        if (omega < 1e-12) {
            log_info("jacobi_from_discrete: omega below 1e-12 at level " +
                     std::to_string(level + 1) + ", treating the measure as exhausted");
            break;
        }
        jc.omegas.push_back(omega);
        for (auto& v : r) v /= beta;
        basis.push_back(std::move(r));
    }
    return jc;
}

// Chebyshev algorithm on the raw moment sequence: maps M_0..M_{2d-1} to the
// first d levels of the recurrence. Needs at least 2*depth moments. When a
// pivot collapses, the result is truncated at the last reliable level; a
// collapse consistent with a zero omega marks the measure exhausted instead.
inline JacobiCoefficients jacobi_from_moments(const MomentSequence& ms, std::size_t depth) {
    if (depth == 0) throw DomainError("jacobi_from_moments: depth must be at least 1");
    if (ms.moments.size() < 2 * depth)
        throw DomainError("jacobi_from_moments: need at least 2*depth moments, have " +
                          std::to_string(ms.moments.size()));

    const std::size_t len = 2 * depth;
    const double scale = std::max(1.0, ms.support_bound * ms.support_bound);

    std::vector<double> row_prev(len, 0.0); // sigma_{k-2, l}
    std::vector<double> row_cur(len, 0.0);  // sigma_{k-1, l}
    for (std::size_t l = 0; l < len; ++l) row_cur[l] = ms.moments[l];

    JacobiCoefficients jc;
    jc.alphas.push_back(ms.moments[1]);
    double prev_beta = 1.0; // omega_{k-1}; the k = 1 step multiplies a zero row

    for (std::size_t k = 1; k < depth; ++k) {
        std::vector<double> row_next(len, 0.0);
        const double alpha_k = jc.alphas.back();
        for (std::size_t l = k; l + k < len; ++l)
            row_next[l] = row_cur[l + 1] - alpha_k * row_cur[l] - prev_beta * row_prev[l];

        const double pivot = row_next[k];
        const double prev_diag = row_cur[k - 1];
        const double omega = pivot / prev_diag;
        if (!std::isfinite(omega) || std::abs(omega) < 1e-12 * scale) {
            // A pivot this close to zero is what a finitely supported measure
            // produces exactly; treat it as genuine termination.
            jc.exhausted = true;
            log_info("jacobi_from_moments: omega collapsed at level " + std::to_string(k) +
                     ", measure exhausted at depth " + std::to_string(k));
            return jc;
        }
        if (omega < 1e-10 * scale) {
            // Small-but-not-zero or negative: precision ran out before the
            // recurrence did. Keep only the levels computed so far.
            log_info("jacobi_from_moments: Hankel pivot below 1e-10 at level " +
                     std::to_string(k) + ", returning maximal reliable depth " +
                     std::to_string(k));
            return jc;
        }
        jc.omegas.push_back(omega);
        jc.alphas.push_back(row_next[k + 1] / pivot - row_cur[k] / prev_diag);
        prev_beta = omega;
        row_prev = std::move(row_cur);
        row_cur = std::move(row_next);
    }
    return jc;
}

// Moments M_0..M_order of the unique measure with these coefficients, read off
// as the (1,1) entries of powers of the symmetric tridiagonal matrix with
// diagonal alpha and off-diagonal sqrt(omega).
inline std::vector<double> moments_from_jacobi(const JacobiCoefficients& jc, std::size_t order) {
    const std::size_t n = jc.alphas.size();
    if (n == 0) throw DomainError("moments_from_jacobi: empty coefficients");
    std::vector<double> sq(jc.omegas.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = std::sqrt(jc.omegas[i]);

    std::vector<double> v(n, 0.0), w(n, 0.0);
    v[0] = 1.0;
    std::vector<double> moments{1.0};
    moments.reserve(order + 1);
    for (std::size_t m = 1; m <= order; ++m) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = jc.alphas[i] * v[i];
            if (i > 0) s += sq[i - 1] * v[i - 1];
            if (i + 1 < n) s += sq[i] * v[i + 1];
            w[i] = s;
        }
        std::swap(v, w);
        moments.push_back(v[0]);
    }
    return moments;
}

} // namespace opfree
