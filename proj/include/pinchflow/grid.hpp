#pragma once

#include <vector>

namespace pinchflow {

/// Uniform grid of n points on [0, r_max].
std::vector<double> make_uniform_grid(double r_max, int n);

/// Grid with dyadic near-axis refinement: base spacing r_max/(n-1), halved
/// once per level inside nested regions [0, r_max/8], [0, r_max/16], ...
/// levels == 0 gives the uniform grid. Spacing changes only by factors of 2.
std::vector<double> make_refined_grid(double r_max, int n, int levels);

} // namespace pinchflow
