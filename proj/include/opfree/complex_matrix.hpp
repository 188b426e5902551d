#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "log.hpp"

namespace opfree {

using Complex = std::complex<double>;

// Dense square complex matrix, row-major. Everything in this project runs at
// desk scale (dimensions in the tens), so plain O(n^3) algorithms are used
// throughout and no external linear algebra package is pulled in.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t n) : n_(n), a_(n * n) {}

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t dim() const { return n_; }

    Complex& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    std::vector<Complex>& entries() { return a_; }
    const std::vector<Complex>& entries() const { return a_; }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        require_same_dim(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }

    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        require_same_dim(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }

    ComplexMatrix& operator*=(Complex c) {
        for (auto& v : a_) v *= c;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex c) { return a *= c; }
    friend ComplexMatrix operator*(Complex c, ComplexMatrix a) { return a *= c; }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        a.require_same_dim(b);
        const std::size_t n = a.n_;
        ComplexMatrix out(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                const Complex aik = a(i, k);
                if (aik == Complex(0.0, 0.0)) continue;
                for (std::size_t j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
            }
        }
        return out;
    }

    ComplexMatrix adjoint() const {
        ComplexMatrix out(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) out(j, i) = std::conj((*this)(i, j));
        return out;
    }

    Complex trace() const {
        Complex t = 0.0;
        for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

    // tr_n = trace / n, the normalized trace.
    Complex normalized_trace() const {
        if (n_ == 0) throw DomainError("normalized_trace: empty matrix");
        return trace() / static_cast<double>(n_);
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& v : a_) s += std::norm(v);
        return std::sqrt(s);
    }

    double max_abs() const {
        double s = 0.0;
        for (const auto& v : a_) s = std::max(s, std::abs(v));
        return s;
    }

    bool is_finite() const {
        for (const auto& v : a_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }

    // || A - A* ||_F, zero for hermitian matrices.
    double hermitian_defect() const {
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                s += std::norm((*this)(i, j) - std::conj((*this)(j, i)));
        return std::sqrt(s);
    }

private:
    void require_same_dim(const ComplexMatrix& o) const {
        if (n_ != o.n_) throw DomainError("matrix dimension mismatch");
    }

    std::size_t n_ = 0;
    std::vector<Complex> a_;
};

// Hermitian part (A + A*)/2.
inline ComplexMatrix hermitian_part(const ComplexMatrix& a) {
    const std::size_t n = a.dim();
    ComplexMatrix out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
    return out;
}

// Imaginary part (A - A*)/(2i); hermitian.
inline ComplexMatrix imaginary_part(const ComplexMatrix& a) {
    const std::size_t n = a.dim();
    ComplexMatrix out(n);
    const Complex half_over_i(0.0, -0.5);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out(i, j) = half_over_i * (a(i, j) - std::conj(a(j, i)));
    return out;
}

// Inverse by Gauss-Jordan elimination with partial pivoting on [A | I].
// Logs a warning when the Frobenius condition estimate exceeds 1e12.
inline ComplexMatrix inverse(const ComplexMatrix& a) {
    const std::size_t n = a.dim();
    if (n == 0) throw DomainError("inverse: empty matrix");
    ComplexMatrix u = a;
    ComplexMatrix inv = ComplexMatrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(u(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(u(r, col));
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (!(best > 0.0) || !std::isfinite(best))
            throw NumericError("inverse: singular matrix at column " + std::to_string(col));
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(u(piv, j), u(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        }
        const Complex d = u(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            u(col, j) /= d;
            inv(col, j) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const Complex f = u(r, col);
            if (f == Complex(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < n; ++j) {
                u(r, j) -= f * u(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    // debug level: solvers probing close to the real axis trip this on every
    // iteration by design, and their own accuracy floors account for it
    const double cond = a.frobenius_norm() * inv.frobenius_norm();
    if (cond > 1e12)
        log_debug("inverse: ill-conditioned matrix, condition estimate " + std::to_string(cond));
    return inv;
}

// Operator (spectral) norm via power iteration on A*A.
inline double operator_norm(const ComplexMatrix& a) {
    const std::size_t n = a.dim();
    if (n == 0) return 0.0;
    if (n == 1) return std::abs(a(0, 0));
    std::vector<Complex> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = Complex(1.0 + 0.25 * std::sin(static_cast<double>(i) + 1.0),
                       0.25 * std::cos(2.0 * static_cast<double>(i) + 0.5));
    auto normalize = [](std::vector<Complex>& x) {
        double s = 0.0;
        for (const auto& c : x) s += std::norm(c);
        s = std::sqrt(s);
        if (s > 0.0)
            for (auto& c : x) c /= s;
        return s;
    };
    normalize(v);
    std::vector<Complex> w(n);
    double lambda = 0.0;
    for (int iter = 0; iter < 120; ++iter) {
        // w = A v
        for (std::size_t i = 0; i < n; ++i) {
            Complex s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += a(i, j) * v[j];
            w[i] = s;
        }
        // v = A* w
        for (std::size_t j = 0; j < n; ++j) {
            Complex s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += std::conj(a(i, j)) * w[i];
            v[j] = s;
        }
        const double next = normalize(v); // ||A*A v|| -> lambda_max(A*A)
        if (next == 0.0) return 0.0;
        if (iter > 4 && std::abs(next - lambda) <= 1e-13 * std::max(1.0, next)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return std::sqrt(lambda);
}

// Strict positive definiteness of a hermitian matrix via Cholesky pivots.
inline bool is_positive_definite(const ComplexMatrix& h) {
    const std::size_t n = h.dim();
    if (n == 0) return false;
    ComplexMatrix l(n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = h(j, j).real();
        for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            Complex s = h(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / ljj;
        }
    }
    return true;
}

struct HermitianEigen {
    std::vector<double> values; // ascending
    ComplexMatrix vectors;      // columns; A = V diag(values) V*
};

// Cyclic Jacobi eigensolver for hermitian matrices. Quadratically convergent
// and very accurate at the small sizes used here.
inline HermitianEigen eigen_hermitian(const ComplexMatrix& a_in) {
    const std::size_t n = a_in.dim();
    if (n == 0) throw DomainError("eigen_hermitian: empty matrix");
    ComplexMatrix m = hermitian_part(a_in);
    ComplexMatrix v = ComplexMatrix::identity(n);
    const double total = std::max(m.frobenius_norm(), 1e-300);

    auto off_norm = [&m, n]() {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) s += std::norm(m(p, q));
        return std::sqrt(2.0 * s);
    };

    for (int sweep = 0; sweep < 80; ++sweep) {
        if (off_norm() <= 1e-15 * total) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = m(p, q);
                const double absa = std::abs(apq);
                if (absa <= 1e-18 * total) continue;
                const double app = m(p, p).real();
                const double aqq = m(q, q).real();
                const Complex u = apq / absa;
                const double tau = (aqq - app) / (2.0 * absa);
                const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // Unitary U equal to identity outside the (p,q) block, where it is
                // [[c, s], [-conj(u) s, conj(u) c]]; chosen so (U* M U)(p,q) = 0.
                const Complex su = s * u;
                const Complex suc = s * std::conj(u);
                const Complex cu = c * u;
                const Complex cuc = c * std::conj(u);
                // Right update: columns p and q of M and V.
                for (std::size_t i = 0; i < n; ++i) {
                    const Complex mp = m(i, p), mq = m(i, q);
                    m(i, p) = c * mp - suc * mq;
                    m(i, q) = s * mp + cuc * mq;
                    const Complex vp = v(i, p), vq = v(i, q);
                    v(i, p) = c * vp - suc * vq;
                    v(i, q) = s * vp + cuc * vq;
                }
                // Left update: rows p and q of M.
                for (std::size_t j = 0; j < n; ++j) {
                    const Complex mp = m(p, j), mq = m(q, j);
                    m(p, j) = c * mp - su * mq;
                    m(q, j) = s * mp + cu * mq;
                }
                m(p, q) = 0.0;
                m(q, p) = 0.0;
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&m](std::size_t i, std::size_t j) { return m(i, i).real() < m(j, j).real(); });

    HermitianEigen out;
    out.values.resize(n);
    out.vectors = ComplexMatrix(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = m(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

// Kronecker product; with row-major stacking vec(X a Y) = (X kron Y^T) vec(a).
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t na = a.dim(), nb = b.dim();
    ComplexMatrix out(na * nb);
    for (std::size_t i1 = 0; i1 < na; ++i1)
        for (std::size_t j1 = 0; j1 < na; ++j1) {
            const Complex aij = a(i1, j1);
            if (aij == Complex(0.0, 0.0)) continue;
            for (std::size_t i2 = 0; i2 < nb; ++i2)
                for (std::size_t j2 = 0; j2 < nb; ++j2)
                    out(i1 * nb + i2, j1 * nb + j2) = aij * b(i2, j2);
        }
    return out;
}

inline ComplexMatrix conj(const ComplexMatrix& a) {
    const std::size_t n = a.dim();
    ComplexMatrix out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = std::conj(a(i, j));
    return out;
}

} // namespace opfree
