#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pinchflow::kern {

/// Precomputed 3-point finite-difference weights for a (possibly non-uniform)
/// strictly increasing radial grid. Interior points are [1, n-2]; the entries
/// at 0 and n-1 are zero and never read by the kernels.
///
/// For spacings hm = r[i]-r[i-1], hp = r[i+1]-r[i]:
///   u_rr(i) ~ d2m*u[i-1] + d2c*u[i] + d2p*u[i+1]
///   u_r(i)  ~ d1m*u[i-1] + d1c*u[i] + d1p*u[i+1]
/// Both stencils are exact on quadratics.
struct Stencil {
    std::vector<double> d2m, d2c, d2p;
    std::vector<double> d1m, d1c, d1p;
    std::size_t n = 0;
};

Stencil make_stencil(std::span<const double> radii);

/// Kernel function table. One backend is selected at process start; all
/// backends produce bit-identical results on finite inputs (same per-element
/// operation order, no FMA contraction), which the equivalence tests assert.
struct KernelTable {
    const char* name;

    /// Quasilinear radial rhs at interior points i in [1, n-2]:
    ///   out[i] = s2/(1+s1^2) + drift[i]*s1 + lin*u[i] - k/u[i]
    /// with s2, s1 the stencil second/first derivatives of u at i.
    /// out[0] and out[n-1] are left untouched.
    void (*rhs_interior)(const double* u, const Stencil& st, const double* drift,
                         double lin, double k, double* out, std::size_t n);

    /// First derivative at interior points; endpoints untouched.
    void (*gradient_interior)(const double* u, const Stencil& st, double* out,
                              std::size_t n);

    /// Semi-implicit tridiagonal row assembly at interior points, with the
    /// graph factor frozen at the supplied gradient g:
    ///   D        = 1/(1+g^2)
    ///   lower[i] = -dt*(D*d2m + drift*d1m)
    ///   diag[i]  = 1 - dt*(D*d2c + drift*d1c)
    ///   upper[i] = -dt*(D*d2p + drift*d1p)
    ///   b[i]     = u[i] + dt*(lin*u[i] - k/u[i])
    /// Endpoint rows are owned by the boundary handling and left untouched.
    void (*assemble_interior)(const double* u, const double* grad, const Stencil& st,
                              const double* drift, double dt, double lin, double k,
                              double* lower, double* diag, double* upper, double* b,
                              std::size_t n);

    /// Minimum value and its first index. Inputs must be finite, n >= 1.
    double (*min_element)(const double* x, std::size_t n, std::size_t* argmin);

    double (*max_abs)(const double* x, std::size_t n);

    /// out[i] = a * x[i]
    void (*scale)(const double* x, double a, double* out, std::size_t n);

    /// y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);

    /// max_i |w[i] * x[i]|
    double (*weighted_max_abs)(const double* w, const double* x, std::size_t n);
};

enum class Backend { scalar, avx2 };

/// Table for the backend chosen at startup: AVX2 when the CPU supports it,
/// scalar otherwise. PINCHFLOW_KERNELS=scalar|avx2 overrides (an unsupported
/// request falls back to scalar).
const KernelTable& kernels();

Backend active_backend();

/// Direct access to a specific backend (equivalence tests). Returns nullptr
/// when the backend was not compiled in or the CPU lacks support.
const KernelTable* backend_table(Backend b);

} // namespace pinchflow::kern
