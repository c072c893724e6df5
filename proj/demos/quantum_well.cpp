// Bound states of -u'' - v sech^2(x) u = lambda u, with the potential cut off at |x| = 5. For
// v = s(s + 1) the exact levels are -(s - n)^2.

#include <cstdio>

#include "spps/spps.hpp"

int main() {
    using namespace spps;
    for (double s : {2.0, 3.0, 4.0}) {
        const double v = s * (s + 1);
        auto g = make_grid(0, 10, 4000, 0);
        auto w = make_well(0, 0, sample(g, [v](double x) { return -v / std::pow(std::cosh(x - 5), 2); }));
        auto spec = solve_well(w, 180);
        std::printf("v = %g\n", v);
        for (size_t n = 0; n < spec.eigenvalues.size(); ++n) {
            const double exact = -(s - n) * (s - n);
            std::printf("  n=%zu  lambda = %.10f  exact %.1f  matching residual %.1e\n", n, spec.eigenvalues[n], exact,
                        spec.eigenfunctions[n].matching_residual);
        }
    }
}
