// Discrete eigenvalues of the Zakharov-Shabat system for a box U = A on |x| < 1, compared with
// the roots of the closed-form box equation.

#include <cstdio>

#include "spps/spps.hpp"

int main() {
    using namespace spps;
    for (double A : {1.0, 2.5, 4.0}) {
        auto s = zs_eigenvalues(box_potential(A, 1.0, 4000), 180);
        auto ref = box_oracle(A, 1.0);
        std::printf("A = %.1f\n", A);
        for (size_t i = 0; i < s.eigenvalues.size(); ++i)
            std::printf("  lambda = %.14f  closed form %.14f\n", s.eigenvalues[i].lambda.real(), i < ref.size() ? ref[i] : NAN);
    }
}
