#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "atoms.hpp"
#include "complex_matrix.hpp"
#include "errors.hpp"
#include "jacobi.hpp"
#include "measure.hpp"
#include "opval.hpp"

namespace opfree {

// Diagonal decomposition of an n-point measure through its tridiagonal
// matrix model: component k is the scalar distribution seen by the k-th
// vector state, the first component reproduces the input measure, and the
// trace-state distribution is the uniform mixture of all n components.
struct CoveringDecomposition {
    std::vector<DiscreteMeasure> components;
    DiscreteMeasure mixture;
};

namespace detail {

// Trailing block of the recurrence matrix over levels k..n. Its spectrum
// carries the support of component k.
inline ComplexMatrix tail_recurrence_matrix(const JacobiCoefficients& jc, std::size_t k) {
    const std::size_t m = jc.alphas.size() - k + 1;
    ComplexMatrix j(m);
    for (std::size_t i = 0; i < m; ++i) {
        j(i, i) = jc.alphas[k - 1 + i];
        if (i + 1 < m) {
            const double off = std::sqrt(jc.omegas[k - 1 + i]);
            j(i, i + 1) = off;
            j(i + 1, i) = off;
        }
    }
    return j;
}

} // namespace detail

// Components are purely atomic, so each one is pinned down by measuring the
// vector-state transform at the eigenvalues of its tail block. Masses below
// 1e-8 are treated as spurious and the rest renormalized.
inline CoveringDecomposition covering_decomposition(const JacobiCoefficients& jc,
                                                    const SolveOptions& opts = {}) {
    if (!jc.exhausted)
        throw DomainError("covering_decomposition: coefficients must describe the full measure");
    const std::size_t n = jc.alphas.size();
    const SemicircularModel model = model_from_jacobi(jc, n, 1);

    CoveringDecomposition out;
    out.components.reserve(n);
    for (std::size_t k = 1; k <= n; ++k) {
        const HermitianEigen eig = eigen_hermitian(detail::tail_recurrence_matrix(jc, k));
        const State state = vector_state(k);
        const auto transform = [&](Complex xi) {
            return scalar_transform(model, state, xi, opts);
        };
        std::vector<double> points;
        std::vector<double> weights;
        for (double loc : eig.values) {
            const double mass = atom_mass(transform, loc).mass;
            if (mass <= 1e-8) continue;
            points.push_back(loc);
            weights.push_back(mass);
        }
        if (points.empty())
            throw NumericError("covering_decomposition: component " + std::to_string(k) +
                               " retained no mass");
        double sum = 0.0;
        for (double w : weights) sum += w;
        for (double& w : weights) w /= sum;
        out.components.push_back(discrete_measure(std::move(points), std::move(weights)));
    }

    std::vector<double> mix_points;
    std::vector<double> mix_weights;
    for (const DiscreteMeasure& comp : out.components) {
        for (std::size_t i = 0; i < comp.points.size(); ++i) {
            mix_points.push_back(comp.points[i]);
            mix_weights.push_back(comp.weights[i] / static_cast<double>(n));
        }
    }
    out.mixture = discrete_measure(std::move(mix_points), std::move(mix_weights));
    return out;
}

} // namespace opfree
