// Smoothed spectral density of a 2x2 semicircular model whose trace
// distribution is the standard semicircle. Prints a short x, density table.

#include <complex>
#include <cstdio>

#include <opfree/opfree.hpp>

int main() {
    using namespace opfree;

    ComplexMatrix flip(2);
    flip(0, 1) = 1.0;
    flip(1, 0) = 1.0;
    const auto model = semicircular_model(ComplexMatrix(2), kraus_map({flip}));

    const double eps = 1e-3;
    std::printf("%10s %10s\n", "x", "density");
    for (double x = -2.5; x <= 2.5 + 1e-9; x += 0.25) {
        const Complex g = scalar_transform(model, trace_state(), Complex(x, eps));
        std::printf("%10.2f %10.5f\n", x, -g.imag() / 3.14159265358979323846);
    }
    return 0;
}
