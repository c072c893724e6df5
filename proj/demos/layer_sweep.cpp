// Reflectance of a graded-index coating over incidence angle for both polarizations. The
// p-wave reflectance dips near the Brewster angle of the substrate.

#include <cstdio>

#include "spps/spps.hpp"

int main() {
    using namespace spps;
    const double k = 8, d = 1.0;
    auto g = make_grid(0, d, 2000, 0);
    auto n = sample(g, [d](double x) { return 1.0 + 0.5 * x / d; });
    std::vector<double> thetas;
    for (int deg = 0; deg <= 85; deg += 5) thetas.push_back(deg * M_PI / 180);
    auto rs = sweep(make_layer(1.0, 1.5, n, Polarization::s), k, thetas, 100);
    auto rp = sweep(make_layer(1.0, 1.5, n, Polarization::p), k, thetas, 100);
    std::printf("theta   |R_s|^2      |R_p|^2\n");
    for (size_t i = 0; i < thetas.size(); ++i)
        std::printf("%5.0f   %.8f   %.8f\n", thetas[i] * 180 / M_PI, std::norm(rs[i].R), std::norm(rp[i].R));
}
