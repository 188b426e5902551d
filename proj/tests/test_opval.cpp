#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <vector>

#include <opfree/measure.hpp>
#include <opfree/opval.hpp>

using opfree::Complex;
using opfree::ComplexMatrix;
using opfree::JacobiCoefficients;
using opfree::KrausMap;
using opfree::SemicircularModel;
using opfree::SolveOptions;

namespace {

Complex semicircle_transform(Complex xi) {
    return (xi - std::sqrt(xi - 2.0) * std::sqrt(xi + 2.0)) / 2.0;
}

// Trace transform of the flat two by two model with matched weights; radius
// of the support is 2|alpha|.
Complex two_by_two_trace(Complex xi, double a) {
    const double r = 2.0 * std::sqrt(a);
    return (xi - std::sqrt(xi - r) * std::sqrt(xi + r)) / (2.0 * a);
}

ComplexMatrix from_rows(std::size_t n, const std::vector<Complex>& rows) {
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i * n + j];
    return m;
}

ComplexMatrix random_hermitian(std::mt19937& rng, std::size_t n, double scale) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ComplexMatrix a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = Complex(u(rng), u(rng));
    ComplexMatrix h = a + a.adjoint();
    h *= 0.5 * scale;
    return h;
}

ComplexMatrix random_matrix(std::mt19937& rng, std::size_t n, double scale) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ComplexMatrix a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = Complex(u(rng), u(rng)) * scale;
    return a;
}

// Hermitian part strictly above floor * identity, so Im b stays safely
// positive definite.
ComplexMatrix random_upper_half(std::mt19937& rng, std::size_t n, double floor_level) {
    ComplexMatrix re = random_hermitian(rng, n, 1.0);
    ComplexMatrix l = random_matrix(rng, n, 0.6);
    ComplexMatrix im = l * l.adjoint();
    for (std::size_t i = 0; i < n; ++i) im(i, i) += floor_level;
    ComplexMatrix b = re;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b(i, j) += Complex(0.0, 1.0) * im(i, j);
    return b;
}

SemicircularModel random_model(std::mt19937& rng, std::size_t n, bool centered) {
    std::uniform_int_distribution<int> nk(1, 3);
    std::vector<ComplexMatrix> ops;
    const int count = nk(rng);
    for (int j = 0; j < count; ++j)
        ops.push_back(random_matrix(rng, n, 0.7 / std::sqrt(static_cast<double>(n))));
    ComplexMatrix mean(n);
    if (!centered) mean = random_hermitian(rng, n, 0.8);
    return opfree::semicircular_model(mean, opfree::kraus_map(ops));
}

ComplexMatrix scaled_identity(std::size_t n, Complex c) {
    ComplexMatrix b = ComplexMatrix::identity(n);
    b *= c;
    return b;
}

} // namespace

TEST_CASE("kraus maps") {
    SECTION("identity and zero operators") {
        const ComplexMatrix a = from_rows(2, {Complex(1, 2), Complex(0, -1), 3.0, 4.0});
        KrausMap id = opfree::kraus_map({ComplexMatrix::identity(2)});
        REQUIRE((opfree::cp_apply(id, a) - a).max_abs() == 0.0);
        KrausMap zero = opfree::kraus_map({ComplexMatrix(2)});
        REQUIRE(opfree::cp_apply(zero, a).max_abs() == 0.0);
    }
    SECTION("upper shift squeezes out the lower right entry") {
        const ComplexMatrix a =
            from_rows(2, {Complex(1, 1), Complex(2, -3), Complex(0, 5), Complex(-7, 2)});
        ComplexMatrix shift(2);
        shift(0, 1) = 1.0;
        KrausMap eta = opfree::kraus_map({shift});
        const ComplexMatrix out = opfree::cp_apply(eta, a);
        REQUIRE(out(0, 0) == a(1, 1));
        REQUIRE(out(0, 1) == Complex(0.0));
        REQUIRE(out(1, 0) == Complex(0.0));
        REQUIRE(out(1, 1) == Complex(0.0));
        // zero padding contributes nothing
        KrausMap padded = opfree::kraus_map({shift, ComplexMatrix(2), ComplexMatrix(2)});
        REQUIRE((opfree::cp_apply(padded, a) - out).max_abs() == 0.0);
    }
    SECTION("positivity and hermiticity on random inputs") {
        std::mt19937 rng(501);
        for (int trial = 0; trial < 10; ++trial) {
            const std::size_t n = 1 + trial % 4;
            std::vector<ComplexMatrix> ops;
            for (int j = 0; j < 2; ++j) ops.push_back(random_matrix(rng, n, 1.0));
            KrausMap eta = opfree::kraus_map(ops);

            const ComplexMatrix h = random_hermitian(rng, n, 1.0);
            REQUIRE(opfree::cp_apply(eta, h).hermitian_defect() < 1e-12);

            const ComplexMatrix l = random_matrix(rng, n, 1.0);
            const ComplexMatrix psd = l * l.adjoint();
            const auto eig = opfree::eigen_hermitian(opfree::cp_apply(eta, psd));
            REQUIRE(eig.values.front() >= -1e-9);
        }
    }
    SECTION("adjoint pairs under the trace") {
        std::mt19937 rng(502);
        for (int trial = 0; trial < 8; ++trial) {
            const std::size_t n = 2 + trial % 3;
            KrausMap eta = opfree::kraus_map(
                {random_matrix(rng, n, 1.0), random_matrix(rng, n, 0.5)});
            const ComplexMatrix a = random_matrix(rng, n, 1.0);
            const ComplexMatrix c = random_matrix(rng, n, 1.0);
            const Complex lhs = (opfree::cp_apply(eta, a) * c.adjoint()).trace();
            const Complex rhs = (a * opfree::cp_adjoint_apply(eta, c).adjoint()).trace();
            REQUIRE(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));
        }
    }
    SECTION("validation") {
        REQUIRE_THROWS_AS(opfree::kraus_map({}), opfree::SchemaError);
        REQUIRE_THROWS_AS(opfree::kraus_map({ComplexMatrix(2), ComplexMatrix(3)}),
                          opfree::SchemaError);
        KrausMap eta = opfree::kraus_map({ComplexMatrix::identity(2)});
        REQUIRE_THROWS_AS(opfree::cp_apply(eta, ComplexMatrix(3)), opfree::DomainError);
    }
}

TEST_CASE("model and state validation") {
    ComplexMatrix skew(2);
    skew(0, 1) = Complex(0, 1);
    skew(1, 0) = Complex(0, 1); // adjoint would need -i
    REQUIRE_THROWS_AS(
        opfree::semicircular_model(skew, opfree::kraus_map({ComplexMatrix(2)})),
        opfree::SchemaError);
    REQUIRE_THROWS_AS(
        opfree::semicircular_model(ComplexMatrix(3), opfree::kraus_map({ComplexMatrix(2)})),
        opfree::SchemaError);

    ComplexMatrix g(2);
    g(0, 0) = 1.0;
    g(1, 1) = 3.0;
    REQUIRE(opfree::trace_state().apply(g) == Complex(2.0));
    REQUIRE(opfree::vector_state(2).apply(g) == Complex(3.0));
    REQUIRE_THROWS_AS(opfree::vector_state(0), opfree::DomainError);
    REQUIRE_THROWS_AS(opfree::vector_state(3).apply(g), opfree::DomainError);
}

TEST_CASE("zero variance reduces to plain inversion") {
    std::mt19937 rng(611);
    for (std::size_t n = 1; n <= 4; ++n) {
        SemicircularModel model =
            opfree::semicircular_model(ComplexMatrix(n), opfree::kraus_map({ComplexMatrix(n)}));
        const ComplexMatrix b = random_upper_half(rng, n, 0.4);
        const ComplexMatrix g = opfree::solve_cauchy(model, b);
        REQUIRE((g - opfree::inverse(b)).max_abs() < 1e-12);
    }
}

TEST_CASE("flat limit far from the support") {
    ComplexMatrix flip(2);
    flip(0, 1) = 1.0;
    flip(1, 0) = 1.0;
    SemicircularModel model =
        opfree::semicircular_model(ComplexMatrix(2), opfree::kraus_map({flip}));
    const double y = 1000.0;
    const ComplexMatrix b = scaled_identity(2, Complex(0, y));
    const ComplexMatrix g = opfree::solve_cauchy(model, b);
    REQUIRE(opfree::operator_norm(b * g - ComplexMatrix::identity(2)) < 2.1 / y);
}

TEST_CASE("trace transform matches the two by two closed form") {
    const std::vector<Complex> points{
        {0, 2}, {0.5, 1.5}, {-1.0, 0.8}, {3.0, 0.1}, {0.0, 0.35}};
    SECTION("matched unit weights give the semicircle") {
        for (double phase : {0.0, 0.7}) {
            ComplexMatrix op(2);
            op(0, 1) = 1.0;
            op(1, 0) = std::polar(1.0, phase);
            SemicircularModel model =
                opfree::semicircular_model(ComplexMatrix(2), opfree::kraus_map({op}));
            for (Complex xi : points) {
                const Complex got = opfree::scalar_transform(model, opfree::trace_state(), xi);
                REQUIRE(std::abs(got - two_by_two_trace(xi, 1.0)) < 1e-9);
            }
        }
    }
    SECTION("scaled weights rescale the support") {
        ComplexMatrix op(2);
        op(0, 1) = 1.5;
        op(1, 0) = 1.5;
        SemicircularModel model =
            opfree::semicircular_model(ComplexMatrix(2), opfree::kraus_map({op}));
        for (Complex xi : points) {
            const Complex got = opfree::scalar_transform(model, opfree::trace_state(), xi);
            REQUIRE(std::abs(got - two_by_two_trace(xi, 2.25)) < 1e-9);
        }
    }
}

TEST_CASE("solver properties on random models") {
    std::mt19937 rng(711);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 1 + trial % 5;
        const bool centered = trial % 2 == 0;
        SemicircularModel model = random_model(rng, n, centered);
        const ComplexMatrix b =
            trial % 3 == 0 ? scaled_identity(n, Complex(0.3, 0.8)) : random_upper_half(rng, n, 0.3);

        const ComplexMatrix g = opfree::solve_cauchy(model, b);
        const double tol = 1e-10 * (1.0 + opfree::operator_norm(b));
        REQUIRE(opfree::solve_residual(model, b, g).frobenius_norm() <= tol);

        const auto im_eig = opfree::eigen_hermitian(opfree::imaginary_part(g));
        REQUIRE(im_eig.values.back() <= 1e-9);

        SolveOptions alt;
        alt.initial = scaled_identity(n, Complex(0, -2));
        const ComplexMatrix g2 = opfree::solve_cauchy(model, b, alt);
        REQUIRE((g - g2).frobenius_norm() < 1e-9);
    }
}

TEST_CASE("centered models have purely imaginary transforms on the axis") {
    std::mt19937 rng(713);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 2 + trial % 3;
        SemicircularModel model = random_model(rng, n, true);
        for (double y : {0.7, 2.0, 5.0}) {
            const ComplexMatrix g =
                opfree::solve_cauchy(model, scaled_identity(n, Complex(0, y)));
            double max_re = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    max_re = std::max(max_re, std::abs((g(i, j) + std::conj(g(j, i))).real()) / 2);
            REQUIRE(max_re <= 1e-9);
        }
    }
}

TEST_CASE("scalar transforms of the named models") {
    SECTION("free case") {
        SemicircularModel model =
            opfree::semicircular_model(ComplexMatrix(2), opfree::kraus_map({ComplexMatrix(2)}));
        const Complex xi(0.4, 1.7);
        REQUIRE(std::abs(opfree::scalar_transform(model, opfree::trace_state(), xi) -
                         1.0 / xi) < 1e-12);
        REQUIRE_THROWS_AS(opfree::scalar_transform(model, opfree::trace_state(), Complex(1, 0)),
                          opfree::DomainError);
    }
    SECTION("upper shift variance gives the three atom mixture") {
        ComplexMatrix shift(2);
        shift(0, 1) = 1.0;
        SemicircularModel model =
            opfree::semicircular_model(ComplexMatrix(2), opfree::kraus_map({shift}));
        for (Complex xi : {Complex(0, 2), Complex(0.7, 1.1), Complex(-2.0, 0.4)}) {
            const Complex got = opfree::scalar_transform(model, opfree::trace_state(), xi);
            const Complex expected = (xi * xi - 0.5) / (xi * xi * xi - xi);
            REQUIRE(std::abs(got - expected) < 1e-9);
        }
        const Complex at2i = opfree::scalar_transform(model, opfree::trace_state(), Complex(0, 2));
        REQUIRE(at2i.real() == Catch::Approx(0.0).margin(1e-10));
        REQUIRE(at2i.imag() == Catch::Approx(-0.45).margin(1e-10));
    }
    SECTION("three dimensional strictly upper model") {
        ComplexMatrix op(3);
        op(0, 1) = 1.0;
        op(0, 2) = 1.0;
        op(1, 2) = 1.0;
        SemicircularModel model =
            opfree::semicircular_model(ComplexMatrix(3), opfree::kraus_map({op}));
        for (Complex xi : {Complex(0, 2), Complex(0.8, 0.9)}) {
            const Complex h = semicircle_transform(xi);
            const Complex expected = (1.0 / xi + h + (xi * xi - 1.0) * h * h * h) / 3.0;
            const Complex got = opfree::scalar_transform(model, opfree::trace_state(), xi);
            REQUIRE(std::abs(got - expected) < 1e-9);
        }
    }
}

TEST_CASE("models built from recurrence data") {
    SECTION("frozen structures") {
        const JacobiCoefficients point = opfree::jacobi_coefficients({2.5}, {}, true);
        SemicircularModel m1 = opfree::model_from_jacobi(point, 1, 1);
        REQUIRE(m1.mean(0, 0) == Complex(2.5));
        REQUIRE(m1.variance.kraus_ops.size() == 1);
        REQUIRE(m1.variance.kraus_ops[0].max_abs() == 0.0);

        const JacobiCoefficients bernoulli =
            opfree::jacobi_coefficients({0.0, 0.0}, {1.0}, true);
        SemicircularModel m2 = opfree::model_from_jacobi(bernoulli, 2, 1);
        REQUIRE(m2.mean.max_abs() == 0.0);
        REQUIRE(m2.variance.kraus_ops[0](0, 1) == Complex(1.0));
        REQUIRE(m2.variance.kraus_ops[0](1, 0) == Complex(0.0));

        SemicircularModel m3 = opfree::model_from_jacobi(bernoulli, 2, 2);
        REQUIRE(m3.variance.kraus_ops[0](1, 0) == Complex(1.0));
        REQUIRE(m3.variance.kraus_ops[0](0, 1) == Complex(0.0));

        const JacobiCoefficients semi = opfree::jacobi_coefficients(
            std::vector<double>(3, 0.0), std::vector<double>(2, 1.0), false);
        SemicircularModel m4 = opfree::model_from_jacobi(semi, 3, 1);
        REQUIRE(m4.variance.kraus_ops[0](0, 1) == Complex(1.0));
        REQUIRE(m4.variance.kraus_ops[0](1, 2) == Complex(1.0));

        const JacobiCoefficients mixed =
            opfree::jacobi_coefficients({0.3, -0.2, 0.5}, {0.8, 0.25}, true);
        SemicircularModel m5 = opfree::model_from_jacobi(mixed, 3, 2);
        REQUIRE(m5.mean(0, 0) == Complex(0.5));
        REQUIRE(m5.mean(1, 1) == Complex(-0.2));
        REQUIRE(m5.mean(2, 2) == Complex(0.3));
        REQUIRE(m5.variance.kraus_ops[0](1, 0) == Complex(0.5));
        REQUIRE(m5.variance.kraus_ops[0](2, 1).real() == Catch::Approx(std::sqrt(0.8)));
    }
    SECTION("argument validation") {
        const JacobiCoefficients bernoulli =
            opfree::jacobi_coefficients({0.0, 0.0}, {1.0}, true);
        REQUIRE_THROWS_AS(opfree::model_from_jacobi(bernoulli, 3, 1), opfree::DomainError);
        REQUIRE_THROWS_AS(opfree::model_from_jacobi(bernoulli, 0, 1), opfree::DomainError);
        REQUIRE_THROWS_AS(opfree::model_from_jacobi(bernoulli, 2, 7), opfree::DomainError);
    }
}

TEST_CASE("diagonal structure of jc derived transforms") {
    SECTION("two level frozen case") {
        const JacobiCoefficients bernoulli =
            opfree::jacobi_coefficients({0.0, 0.0}, {1.0}, true);
        const auto report =
            opfree::diagonal_transform_identity_check(bernoulli, 2, 1, Complex(0, 2));
        REQUIRE(report.passed);

        SemicircularModel model = opfree::model_from_jacobi(bernoulli, 2, 1);
        const ComplexMatrix g =
            opfree::solve_cauchy(model, scaled_identity(2, Complex(0, 2)));
        REQUIRE(std::abs(g(0, 0) - Complex(0, -0.4)) < 1e-10);
        REQUIRE(std::abs(g(1, 1) - Complex(0, -0.5)) < 1e-10);
    }
    SECTION("deep truncation approaches the semicircle transform") {
        const JacobiCoefficients semi = opfree::jacobi_coefficients(
            std::vector<double>(30, 0.0), std::vector<double>(29, 1.0), false);
        SemicircularModel model = opfree::model_from_jacobi(semi, 30, 1);
        const Complex xi(0, 1);
        const Complex g11 = opfree::scalar_transform(model, opfree::vector_state(1), xi);
        REQUIRE(std::abs(g11 - semicircle_transform(xi)) < 1e-3);
    }
    SECTION("asymmetric coefficient windows, both variants") {
        const JacobiCoefficients arcsine_like = opfree::jacobi_coefficients(
            std::vector<double>(5, 0.0), {1.0, 0.25, 0.25, 0.25}, false);
        const JacobiCoefficients skewed =
            opfree::jacobi_coefficients({0.1, -0.3, 0.7, 0.2}, {0.5, 1.2, 0.3}, true);
        for (int variant : {1, 2}) {
            const auto r1 = opfree::diagonal_transform_identity_check(
                arcsine_like, 5, variant, Complex(0.3, 0.9));
            REQUIRE(r1.passed);
            const auto r2 =
                opfree::diagonal_transform_identity_check(skewed, 4, variant, Complex(0, 1));
            REQUIRE(r2.passed);
        }
    }
}

TEST_CASE("vector state reproduces exhausted measures") {
    std::mt19937 rng(811);
    std::uniform_real_distribution<double> ure(-3.0, 3.0);
    std::uniform_real_distribution<double> uim(0.3, 5.0);
    for (int trial = 0; trial < 6; ++trial) {
        // coarse grid keeps the recurrence well separated
        std::uniform_int_distribution<std::size_t> np(1, 6);
        std::uniform_real_distribution<double> uw(0.1, 1.0);
        const std::size_t n = np(rng);
        std::vector<double> pts, ws;
        std::vector<int> slots{-8, -6, -4, -2, 0, 2, 4, 6, 8};
        std::shuffle(slots.begin(), slots.end(), rng);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            pts.push_back(0.45 * slots[i]);
            ws.push_back(uw(rng));
            sum += ws.back();
        }
        for (auto& w : ws) w /= sum;
        const opfree::DiscreteMeasure m = opfree::discrete_measure(pts, ws);
        const JacobiCoefficients jc = opfree::jacobi_from_discrete(m);
        SemicircularModel model = opfree::model_from_jacobi(jc, n, 1);
        for (int k = 0; k < 10; ++k) {
            const Complex xi(ure(rng), uim(rng));
            const Complex got = opfree::scalar_transform(model, opfree::vector_state(1), xi);
            REQUIRE(std::abs(got - opfree::cauchy_exact(m, xi)) < 1e-8);

            const ComplexMatrix g = opfree::solve_cauchy(model, scaled_identity(n, xi));
            Complex avg = 0.0;
            for (std::size_t i = 1; i <= n; ++i) avg += opfree::vector_state(i).apply(g);
            avg /= static_cast<double>(n);
            REQUIRE(std::abs(avg - opfree::trace_state().apply(g)) < 1e-12);
        }
    }
}

TEST_CASE("solver failure modes") {
    // non-triangular variance, so convergence near the real axis is genuinely
    // slow instead of finishing in a dimension-bounded number of steps
    ComplexMatrix flip(2);
    flip(0, 1) = 1.0;
    flip(1, 0) = 1.0;
    SemicircularModel model =
        opfree::semicircular_model(ComplexMatrix(2), opfree::kraus_map({flip}));

    REQUIRE_THROWS_AS(opfree::solve_cauchy(model, ComplexMatrix::identity(2)),
                      opfree::DomainError);
    REQUIRE_THROWS_AS(opfree::solve_cauchy(model, ComplexMatrix::identity(3)),
                      opfree::DomainError);

    SolveOptions bad_initial;
    bad_initial.initial = scaled_identity(2, Complex(0, 2)); // upper half plane
    REQUIRE_THROWS_AS(
        opfree::solve_cauchy(model, scaled_identity(2, Complex(0, 1)), bad_initial),
        opfree::DomainError);

    SolveOptions tiny;
    tiny.max_iterations = 12;
    try {
        opfree::solve_cauchy(model, scaled_identity(2, Complex(0.3, 1e-4)), tiny);
        FAIL("expected SolveError");
    } catch (const opfree::SolveError& e) {
        REQUIRE(e.residual > 0.0);
        REQUIRE(e.iterations == 12);
    }
}
