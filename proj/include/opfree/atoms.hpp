#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "complex_matrix.hpp"
#include "errors.hpp"
#include "log.hpp"
#include "opval.hpp"

namespace opfree {

// Boundary estimate of a point mass: the values (xi - r) G(xi) along the
// vertical ray xi = r + i*eps, together with the extrapolated mass.
struct AtomReport {
    double location = 0.0;
    double mass = 0.0;
    std::vector<double> epsilons;
    std::vector<Complex> raw_estimates;
    bool truncated = false;
};

// Mass of the atom of the distribution behind G at r. The ray descends
// through eps = 1e-2..1e-6; if the evaluator gives out (slow solves near the
// real axis), the ladder is cut short and the report says so. The last two
// available rungs are combined by linear-in-eps extrapolation.
inline AtomReport atom_mass(const std::function<Complex(Complex)>& g, double r) {
    if (!std::isfinite(r)) throw DomainError("atom_mass: location must be finite");
    AtomReport report;
    report.location = r;
    constexpr double rungs[] = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    for (double eps : rungs) {
        Complex value;
        if (report.epsilons.empty()) {
            // the first rung must work; a failure here is the caller's problem
            value = Complex(0.0, eps) * g(Complex(r, eps));
        } else {
            try {
                value = Complex(0.0, eps) * g(Complex(r, eps));
            } catch (const NumericError& e) {
                log_info("atom_mass: ladder truncated at eps " + std::to_string(eps) + " (" +
                         e.what() + ")");
                report.truncated = true;
                break;
            }
        }
        report.epsilons.push_back(eps);
        report.raw_estimates.push_back(value);
    }

    const std::size_t k = report.epsilons.size();
    double estimate;
    if (k >= 2) {
        const double e1 = report.epsilons[k - 2], e2 = report.epsilons[k - 1];
        const double v1 = report.raw_estimates[k - 2].real();
        const double v2 = report.raw_estimates[k - 1].real();
        estimate = (e1 * v2 - e2 * v1) / (e1 - e2);
    } else {
        estimate = report.raw_estimates.front().real();
    }
    report.mass = std::min(1.0, std::max(0.0, estimate));
    return report;
}

// Least m <= n^2 with eta^m = 0, determined from the matrix of eta acting on
// the n^2-dimensional space (row-major vectorization, so a -> x a y becomes
// kron(x, transpose(y))). Norms are taken relative to the map itself.
inline std::optional<std::size_t> nilpotency_index(const KrausMap& eta) {
    const std::size_t n = eta.dim;
    ComplexMatrix l(n * n);
    for (const auto& op : eta.kraus_ops) l += kron(op, conj(op));
    const double base = l.frobenius_norm();
    if (base == 0.0) return 1;
    l *= 1.0 / base;
    ComplexMatrix power = l;
    for (std::size_t m = 1; m <= n * n; ++m) {
        if (power.frobenius_norm() <= 1e-12) return m;
        if (m < n * n) power = power * l;
    }
    return std::nullopt;
}

// Structural facts about the Kraus family: individual nilpotency, pairwise
// commutation, and the index of the whole map, with the two directions of
// their expected relationship (nilpotent map forces nilpotent operators;
// commuting nilpotent operators force a nilpotent map).
struct NilpotencyReport {
    bool all_nilpotent = false;
    bool all_commute = false;
    std::optional<std::size_t> eta_index;
    bool forward_consistent = false;
    bool reverse_consistent = false;
};

inline NilpotencyReport kraus_nilpotent_commuting_check(const KrausMap& eta) {
    const std::size_t n = eta.dim;
    NilpotencyReport report;
    report.all_nilpotent = true;
    for (const auto& op : eta.kraus_ops) {
        const double norm = op.frobenius_norm();
        if (norm == 0.0) continue;
        ComplexMatrix scaled = op;
        scaled *= 1.0 / norm;
        ComplexMatrix power = scaled;
        for (std::size_t k = 1; k < n; ++k) power = power * scaled;
        if (power.frobenius_norm() > 1e-12) report.all_nilpotent = false;
    }
    report.all_commute = true;
    for (std::size_t i = 0; i < eta.kraus_ops.size(); ++i)
        for (std::size_t j = i + 1; j < eta.kraus_ops.size(); ++j) {
            const ComplexMatrix& a = eta.kraus_ops[i];
            const ComplexMatrix& b = eta.kraus_ops[j];
            const double scale = a.frobenius_norm() * b.frobenius_norm();
            if (scale == 0.0) continue;
            if ((a * b - b * a).frobenius_norm() > 1e-12 * scale) report.all_commute = false;
        }
    report.eta_index = nilpotency_index(eta);
    report.forward_consistent = !report.eta_index.has_value() || report.all_nilpotent;
    report.reverse_consistent =
        !(report.all_nilpotent && report.all_commute) || report.eta_index.has_value();
    return report;
}

// Largest projection q whose positive multiples the (m-1)-th power of the map
// annihilates, for a nilpotent map of index m. A positive element c is killed
// by a completely positive map exactly when every Kraus operator of that map
// kills the range of c, so q is the projection onto the joint kernel, which
// equals ker of the adjoint power applied to the identity.
inline ComplexMatrix max_kernel_projection(const KrausMap& eta) {
    const auto index = nilpotency_index(eta);
    if (!index) throw DomainError("max_kernel_projection: map is not nilpotent");
    const std::size_t n = eta.dim;
    if (*index == 1) return ComplexMatrix(n); // zero map: ker(eta^0) = ker(id) = {0}

    ComplexMatrix t = ComplexMatrix::identity(n);
    for (std::size_t k = 0; k + 1 < *index; ++k) t = cp_adjoint_apply(eta, t);
    const auto eig = eigen_hermitian(hermitian_part(t));
    const double cut = 1e-10 * std::max(eig.values.back(), 0.0);
    ComplexMatrix q(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (eig.values[i] > cut) continue;
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c)
                q(r, c) += eig.vectors(r, i) * std::conj(eig.vectors(c, i));
    }
    return q;
}

// tr_n(1 - q) for a centered model with nilpotent variance: the predicted
// mass of the atom at zero of the trace-state distribution.
inline double predicted_atom_mass(const SemicircularModel& model) {
    if (model.mean.max_abs() > 1e-12)
        throw DomainError("predicted_atom_mass: model must be centered");
    const ComplexMatrix q = max_kernel_projection(model.variance);
    return 1.0 - q.trace().real() / static_cast<double>(model.dim);
}

} // namespace opfree
