#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "complex_matrix.hpp"
#include "errors.hpp"

namespace opfree {

// Finitely supported probability measure. Invariants: points strictly
// increasing, weights strictly positive and summing to one (within 1e-12).
struct DiscreteMeasure {
    std::vector<double> points;
    std::vector<double> weights;
};

inline double support_radius(const DiscreteMeasure& m) {
    double r = 0.0;
    for (double p : m.points) r = std::max(r, std::abs(p));
    return r;
}

// Builds a measure from raw data: drops exact zero weights, sorts by point,
// merges points closer than 1e-12 * max|point|, then checks the invariants.
inline DiscreteMeasure discrete_measure(std::vector<double> points, std::vector<double> weights) {
    if (points.size() != weights.size())
        throw SchemaError("measure: points and weights differ in length");
    double sum = 0.0;
    for (double p : points)
        if (!std::isfinite(p)) throw SchemaError("measure: non-finite point");
    for (double w : weights) {
        if (!std::isfinite(w)) throw SchemaError("measure: non-finite weight");
        if (w < 0.0) throw SchemaError("measure: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw SchemaError("measure: weights sum to " + std::to_string(sum) + ", expected 1");

    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&points](std::size_t a, std::size_t b) { return points[a] < points[b]; });

    double radius = 0.0;
    for (double p : points) radius = std::max(radius, std::abs(p));
    const double merge_tol = 1e-12 * radius;

    DiscreteMeasure out;
    for (std::size_t idx : order) {
        const double p = points[idx];
        const double w = weights[idx];
        if (w == 0.0) continue;
        if (!out.points.empty() && p - out.points.back() <= merge_tol) {
            const double wtot = out.weights.back() + w;
            out.points.back() = (out.points.back() * out.weights.back() + p * w) / wtot;
            out.weights.back() = wtot;
        } else {
            out.points.push_back(p);
            out.weights.push_back(w);
        }
    }
    if (out.points.empty()) throw SchemaError("measure: empty support");
    return out;
}

// Moment sequence of a compactly supported probability measure, together with
// a bound R on the support radius. Invariants: M_0 = 1, |M_m| <= R^m, and all
// Hankel matrices (M_{i+j}) positive semidefinite up to scaled roundoff.
struct MomentSequence {
    std::vector<double> moments;
    double support_bound = 1.0;
};

// Hankel matrix (M_{i+j})_{i,j=0..k}; needs moments up to order 2k.
inline ComplexMatrix hankel_matrix(const MomentSequence& ms, std::size_t k) {
    if (ms.moments.size() < 2 * k + 1) throw DomainError("hankel_matrix: not enough moments");
    ComplexMatrix h(k + 1);
    for (std::size_t i = 0; i <= k; ++i)
        for (std::size_t j = 0; j <= k; ++j) h(i, j) = ms.moments[i + j];
    return h;
}

inline MomentSequence moment_sequence(std::vector<double> moments, double support_bound) {
    if (moments.empty()) throw SchemaError("moments: empty sequence");
    if (!(support_bound > 0.0) || !std::isfinite(support_bound))
        throw SchemaError("moments: support_bound must be positive and finite");
    if (std::abs(moments[0] - 1.0) > 1e-12)
        throw SchemaError("moments: M_0 must be 1");
    double bound = 1.0;
    for (std::size_t m = 0; m < moments.size(); ++m) {
        if (!std::isfinite(moments[m])) throw SchemaError("moments: non-finite moment");
        if (m > 0) bound *= support_bound;
        if (std::abs(moments[m]) > bound * (1.0 + 1e-9))
            throw SchemaError("moments: |M_" + std::to_string(m) + "| exceeds support_bound^" +
                              std::to_string(m));
    }
    MomentSequence ms{std::move(moments), support_bound};
    const std::size_t kmax = (ms.moments.size() - 1) / 2;
    for (std::size_t k = 0; k <= kmax; ++k) {
        const ComplexMatrix h = hankel_matrix(ms, k);
        auto eig = eigen_hermitian(h);
        // Scale-aware floor: high-order Hankel entries reach R^{2k}, so a
        // fixed absolute cutoff would reject genuine moment vectors.
        if (eig.values.front() < -1e-9 * std::max(1.0, h.frobenius_norm()))
            throw SchemaError("moments: Hankel matrix of size " + std::to_string(k + 1) +
                              " is not positive semidefinite");
    }
    return ms;
}

// Power moments M_0..M_order of a discrete measure.
inline MomentSequence moments_of(const DiscreteMeasure& m, std::size_t order) {
    std::vector<double> mom(order + 1, 0.0);
    for (std::size_t k = 0; k < m.points.size(); ++k) {
        double cur = m.weights[k];
        mom[0] += cur;
        for (std::size_t j = 1; j <= order; ++j) {
            cur *= m.points[k];
            mom[j] += cur;
        }
    }
    mom[0] = 1.0; // exact by the weight invariant; avoids rounding drift
    const double radius = support_radius(m);
    MomentSequence ms;
    ms.moments = std::move(mom);
    ms.support_bound = radius > 0.0 ? radius : 1.0;
    return ms;
}

// G(xi) = sum w_k / (xi - p_k), defined off the real axis.
inline Complex cauchy_exact(const DiscreteMeasure& m, Complex xi) {
    if (xi.imag() == 0.0) throw DomainError("cauchy_exact: evaluation point on the real axis");
    Complex g = 0.0;
    for (std::size_t k = 0; k < m.points.size(); ++k) g += m.weights[k] / (xi - m.points[k]);
    return g;
}

} // namespace opfree
