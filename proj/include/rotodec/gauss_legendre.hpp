// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
// Legendre recurrence (cf. Numerical Recipes gauleg).
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rotodec/constants.hpp"

namespace rotodec {

struct GaussLegendreNode {
    double x;
    double w;
};

// n-point rule, exact for polynomials of degree <= 2n - 1. Nodes are
// returned in ascending order of x.
inline std::vector<GaussLegendreNode> gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
    std::vector<GaussLegendreNode> nodes(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double z1, pp;
        int iter = 0;
        do {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            z1 = z;
            z = z1 - p1 / pp;
        } while (std::abs(z - z1) > 1e-15 && ++iter < 100);
        nodes[i].x = -z;
        nodes[n - 1 - i].x = z;
        nodes[i].w = nodes[n - 1 - i].w = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return nodes;
}

} // namespace rotodec
