// Ratio of the conditional density to phi(ell) phi(x) for growing L, next to
// the first-order prediction 1 + c(s) ell L^{-3/4}.
#include <cstdio>

#include "dlgeo/dlgeo.hpp"

int main() {
    using namespace dlgeo;
    TruncationPolicy pol;
    pol.estimate_error = false;
    std::printf("%5s %5s %5s %5s %12s %12s\n", "s", "L", "ell", "x", "ratio", "predicted");
    for (double s : {0.5, 0.7})
        for (double ell : {-1.0, 0.0, 1.0})
            for (double L : {9.0, 16.0, 25.0, 36.0}) {
                const double x = 0.5;
                const auto c = conditional_rescaled_density({L, ell, x, s}, pol);
                const double pred = 1.0 + remark2_coefficient(s) * ell * std::pow(L, -0.75);
                std::printf("%5.2f %5.0f %5.1f %5.1f %12.6f %12.6f\n", s, L, ell, x, c.ratio(), pred);
            }
}
