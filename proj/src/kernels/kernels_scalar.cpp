#include "pinchflow/kernels/kernels.hpp"

#include <cmath>

// Reference backend. The AVX2 backend mirrors these loops operation for
// operation; any change to an expression here must be replicated there to
// keep the bit-equivalence contract.

namespace pinchflow::kern {
namespace {

void rhs_interior_scalar(const double* u, const Stencil& st, const double* drift,
                         double lin, double k, double* out, std::size_t n) {
    const double* d2m = st.d2m.data();
    const double* d2c = st.d2c.data();
    const double* d2p = st.d2p.data();
    const double* d1m = st.d1m.data();
    const double* d1c = st.d1c.data();
    const double* d1p = st.d1p.data();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double um = u[i - 1];
        const double uc = u[i];
        const double up = u[i + 1];
        const double s2 = (d2m[i] * um + d2c[i] * uc) + d2p[i] * up;
        const double s1 = (d1m[i] * um + d1c[i] * uc) + d1p[i] * up;
        const double diff = s2 / (1.0 + s1 * s1);
        const double adv = drift[i] * s1;
        out[i] = ((diff + adv) + lin * uc) - k / uc;
    }
}

void gradient_interior_scalar(const double* u, const Stencil& st, double* out,
                              std::size_t n) {
    const double* d1m = st.d1m.data();
    const double* d1c = st.d1c.data();
    const double* d1p = st.d1p.data();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        out[i] = (d1m[i] * u[i - 1] + d1c[i] * u[i]) + d1p[i] * u[i + 1];
    }
}

void assemble_interior_scalar(const double* u, const double* grad, const Stencil& st,
                              const double* drift, double dt, double lin, double k,
                              double* lower, double* diag, double* upper, double* b,
                              std::size_t n) {
    const double* d2m = st.d2m.data();
    const double* d2c = st.d2c.data();
    const double* d2p = st.d2p.data();
    const double* d1m = st.d1m.data();
    const double* d1c = st.d1c.data();
    const double* d1p = st.d1p.data();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double g = grad[i];
        const double D = 1.0 / (1.0 + g * g);
        const double c = drift[i];
        lower[i] = -dt * (D * d2m[i] + c * d1m[i]);
        diag[i] = 1.0 - dt * (D * d2c[i] + c * d1c[i]);
        upper[i] = -dt * (D * d2p[i] + c * d1p[i]);
        b[i] = u[i] + dt * (lin * u[i] - k / u[i]);
    }
}

double min_element_scalar(const double* x, std::size_t n, std::size_t* argmin) {
    double m = x[0];
    std::size_t arg = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (x[i] < m) {
            m = x[i];
            arg = i;
        }
    }
    if (argmin) *argmin = arg;
    return m;
}

double max_abs_scalar(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::fabs(x[i]);
        if (a > m) m = a;
    }
    return m;
}

void scale_scalar(const double* x, double a, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i];
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double weighted_max_abs_scalar(const double* w, const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::fabs(w[i] * x[i]);
        if (a > m) m = a;
    }
    return m;
}

} // namespace

const KernelTable& scalar_table() {
    static const KernelTable t = {
        "scalar",
        rhs_interior_scalar,
        gradient_interior_scalar,
        assemble_interior_scalar,
        min_element_scalar,
        max_abs_scalar,
        scale_scalar,
        axpy_scalar,
        weighted_max_abs_scalar,
    };
    return t;
}

} // namespace pinchflow::kern
