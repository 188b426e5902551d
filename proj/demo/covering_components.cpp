// Decomposes the fair coin measure on {-1, +1} into the vector-state
// components of its semicircular realization and prints the result as JSON.
// The first component reproduces the input; averaging all of them gives the
// trace distribution.

#include <iostream>

#include <opfree/opfree.hpp>

int main() {
    using namespace opfree;

    const auto coin = discrete_measure({-1.0, 1.0}, {0.5, 0.5});
    const auto jc = jacobi_from_discrete(coin);
    const auto cover = covering_decomposition(jc);
    std::cout << to_json(cover).dump(2) << std::endl;
    return 0;
}
