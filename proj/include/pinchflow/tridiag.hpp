#pragma once

#include <span>

namespace pinchflow {

/// Thomas algorithm. Solves the tridiagonal system
///   lower[i]*x[i-1] + diag[i]*x[i] + upper[i]*x[i+1] = rhs[i]
/// (lower[0] and upper[n-1] unused). diag and rhs are overwritten; the
/// solution lands in rhs. Requires nonzero pivots; the solver matrices here
/// are diagonally dominant by construction.
void solve_tridiagonal(std::span<const double> lower, std::span<double> diag,
                       std::span<const double> upper, std::span<double> rhs);

} // namespace pinchflow
