// -u'' = lambda u on [0, pi] with u(0) = 0 and u(pi) = -lambda^2 u(pi). The spectrum is n^2 and
// the complex pair +-i; the power series in lambda finds all of them from one expansion.

#include <cstdio>

#include "spps/spps.hpp"

int main() {
    using namespace spps;
    auto g = make_grid(0, M_PI, 3000, 0);
    BoundaryConditionLambda bc{1.0, 0.0, 1.0, 0.0, {0.0, 0.0, -1.0}};
    SLProblem pb{make_sl_coefficients(constant(g, -1.0), constant(g, 0.0), constant(g, 1.0)), {0.0}, bc,
                 RootConstraint::none()};
    auto r = solve(pb, 100, 3);
    std::printf("%-26s %-12s %s\n", "lambda", "from center", "error estimate");
    for (auto& e : r.eigenvalues)
        std::printf("%12.9f %+12.9fi  %-12.4g %.2e\n", e.lambda.real(), e.lambda.imag(), e.center.real(), e.error_estimate);
}
