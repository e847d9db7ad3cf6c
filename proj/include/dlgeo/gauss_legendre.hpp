#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace dlgeo::quad {

/// Nodes and weights on [-1, 1], ascending.
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule by Newton iteration on the three-term recurrence
/// (extended precision, so nodes/weights are accurate to the last ulp).
inline Rule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const long double pi = std::numbers::pi_v<long double>;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        long double x = std::cos(pi * (i + 0.75L) / (n + 0.5L));
        long double dp = 0;
        for (int it = 0; it < 100; ++it) {
            long double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1;
            dp = n * (x * p1 - p0) / (x * x - 1);
            const long double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-19L) {
                // one more update of the derivative at the converged node
                p0 = 1;
                p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                if (n == 1) p0 = 1;
                dp = n * (x * p1 - p0) / (x * x - 1);
                break;
            }
        }
        const long double w = 2 / ((1 - x * x) * dp * dp);
        r.nodes[n - 1 - i] = static_cast<double>(x);
        r.nodes[i] = static_cast<double>(-x);
        r.weights[i] = r.weights[n - 1 - i] = static_cast<double>(w);
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    return r;
}

} // namespace dlgeo::quad
