#pragma once

#include <vector>

namespace rvrp {

struct HungarianResult {
    std::vector<int> col_of_row;  // chosen column per row
    double total = 0.0;           // sum of selected entries, row-major order
};

/// Min-cost rectangular assignment (rows <= cols) via shortest augmenting
/// paths, O(rows^2 * cols). Deterministic: ties resolve to the lowest column
/// index reached first.
HungarianResult hungarian_min_cost(const std::vector<std::vector<double>>& cost);

}  // namespace rvrp
