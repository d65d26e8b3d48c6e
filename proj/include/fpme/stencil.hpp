#pragma once

#include <span>
#include <vector>

namespace fpme {

/// Finite-difference weights (Fornberg's recursion) for the derivative of the given order
/// at offset 0, on integer offsets with unit spacing. Divide by h^order to apply.
std::vector<double> fd_weights(std::span<const int> offsets, int derivative);

/// A one-dimensional stencil: integer offsets and the matching unit-spacing weights.
struct Stencil1D {
    std::vector<int> offsets;
    std::vector<double> weights;
};

/**
 * Stencil for a derivative (1 or 2) of at least the requested formal order at node `pos`
 * of a line of nodes 0..last. Even orders are centred where the window fits; near the
 * ends a one-sided window of the same formal order is used. Odd requested orders are
 * rounded up to the next even order, except the first-order first derivative, which is
 * the forward difference {0, +1}.
 * Throws ConfigError when the line is too short for the window.
 */
Stencil1D make_stencil(int derivative, int order, int pos, int last);

}  // namespace fpme
