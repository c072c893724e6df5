// Band edges of the Mathieu equation -u'' + 2r cos(2x) u = lambda u for a few r, and the
// discriminant curve for r = 1 written to mathieu_discriminant.csv.

#include <cstdio>
#include <fstream>

#include "spps/spps.hpp"

int main() {
    using namespace spps;
    auto g = make_grid(0, M_PI, 7000, 0);
    for (double r : {0.5, 1.0, 5.0}) {
        auto pb = make_periodic_problem(constant(g, 1.0), sample(g, [r](double x) { return 2 * r * std::cos(2 * x); }));
        HillDiscriminant d(pb, 100);
        auto e = band_edges(d, 7);
        std::printf("r = %.1f\n", r);
        for (size_t n = 0; n + 1 < e.all.size(); n += 2)
            std::printf("  band %zu: [%.10f, %.10f]\n", n / 2, e.all[n], e.all[n + 1]);
        if (r == 1.0) {
            std::ofstream os("mathieu_discriminant.csv");
            write_discriminant_csv(os, d, d.lambda0() - 1, 20, 400);
        }
    }
}
