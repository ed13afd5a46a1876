#include "rvrp/hungarian.hpp"

#include <limits>

#include "rvrp/errors.hpp"

namespace rvrp {

HungarianResult hungarian_min_cost(const std::vector<std::vector<double>>& cost) {
    const int rows = static_cast<int>(cost.size());
    if (rows == 0) return {};
    const int cols = static_cast<int>(cost[0].size());
    if (cols < rows) throw input_error("assignment matrix needs cols >= rows");
    for (const auto& r : cost)
        if (static_cast<int>(r.size()) != cols) throw input_error("ragged assignment matrix");

    const double inf = std::numeric_limits<double>::infinity();
    // 1-based Jonker-Volgenant potentials; p[j] = row matched to column j (0 = free)
    std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
    std::vector<int> p(cols + 1, 0), way(cols + 1, 0);

    for (int i = 1; i <= rows; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(cols + 1, inf);
        std::vector<char> used(cols + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= cols; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= cols; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    HungarianResult result;
    result.col_of_row.assign(rows, -1);
    for (int j = 1; j <= cols; ++j)
        if (p[j] != 0) result.col_of_row[p[j] - 1] = j - 1;
    for (int i = 0; i < rows; ++i) result.total += cost[i][result.col_of_row[i]];
    return result;
}

}  // namespace rvrp
