#include "fpme/stencil.hpp"

#include <algorithm>
#include <string>

#include "fpme/core.hpp"

namespace fpme {

std::vector<double> fd_weights(std::span<const int> offsets, int derivative) {
    // Fornberg, "Generation of finite difference formulas on arbitrarily spaced grids" (1988).
    const int n = static_cast<int>(offsets.size());
    const int M = derivative;
    std::vector<std::vector<double>> c(static_cast<std::size_t>(n), std::vector<double>(M + 1, 0.0));
    double c1 = 1.0;
    double c4 = offsets[0];
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, M);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = offsets[i];
        for (int j = 0; j < i; ++j) {
            const double c3 = static_cast<double>(offsets[i]) - offsets[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[i] = c[i][M];
    return w;
}

Stencil1D make_stencil(int derivative, int order, int pos, int last) {
    if (derivative != 1 && derivative != 2) throw ConfigError("make_stencil: derivative must be 1 or 2");
    if (order < 1) throw ConfigError("make_stencil: order must be >= 1");

    Stencil1D s;
    if (derivative == 1 && order == 1) {
        if (pos + 1 > last) throw ConfigError("make_stencil: no node ahead for the forward difference");
        s.offsets = {0, 1};
    } else {
        const int even = order + (order % 2);
        const int half = even / 2;
        if (pos - half >= 0 && pos + half <= last) {
            for (int o = -half; o <= half; ++o) s.offsets.push_back(o);
        } else {
            // One-sided: n points give order n - derivative.
            const int n = even + derivative;
            if (n > last + 1) {
                throw ConfigError("mesh too small for a order-" + std::to_string(even) +
                                  " stencil (needs " + std::to_string(n) + " nodes per line, have " +
                                  std::to_string(last + 1) + ")");
            }
            const int start = std::clamp(pos - half, 0, last - n + 1);
            for (int o = 0; o < n; ++o) s.offsets.push_back(start + o - pos);
        }
    }
    s.weights = fd_weights(s.offsets, derivative);
    return s;
}

}  // namespace fpme
