#include "pinchflow/grid.hpp"

#include <cmath>

#include "pinchflow/errors.hpp"

namespace pinchflow {

std::vector<double> make_uniform_grid(double r_max, int n) {
    if (!(r_max > 0.0) || n < 3) throw DomainError("make_uniform_grid: bad arguments");
    std::vector<double> r(static_cast<std::size_t>(n));
    const double h = r_max / (n - 1);
    for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = h * i;
    r.back() = r_max;
    return r;
}

std::vector<double> make_refined_grid(double r_max, int n, int levels) {
    if (levels <= 0) return make_uniform_grid(r_max, n);
    if (!(r_max > 0.0) || n < 3 || levels > 24)
        throw DomainError("make_refined_grid: bad arguments");
    const double h_base = r_max / (n - 1);
    std::vector<double> r;
    r.push_back(0.0);
    double pos = 0.0;
    while (pos < r_max) {
        // Deepest nested region [0, r_max/2^(2+l)] still containing pos sets
        // the local spacing h_base/2^depth.
        int depth = 0;
        for (int l = levels; l >= 1; --l) {
            if (pos < r_max / std::pow(2.0, 2 + l)) {
                depth = l;
                break;
            }
        }
        const double h = h_base / std::pow(2.0, depth);
        pos += h;
        if (pos > r_max - 0.25 * h_base) pos = r_max;
        r.push_back(pos);
    }
    return r;
}

} // namespace pinchflow
