#include "pinchflow/kernels/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

// AVX2 backend. Per-element operation order matches kernels_scalar.cpp
// exactly (no FMA, no reassociation), so results are bit-identical to the
// scalar backend; reductions (min/max) are order-insensitive.

namespace pinchflow::kern {
namespace {

inline double hmin(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d m = _mm_min_pd(lo, hi);
    m = _mm_min_sd(m, _mm_unpackhi_pd(m, m));
    return _mm_cvtsd_f64(m);
}

inline double hmax(__m128d lo, __m128d hi) {
    __m128d m = _mm_max_pd(lo, hi);
    m = _mm_max_sd(m, _mm_unpackhi_pd(m, m));
    return _mm_cvtsd_f64(m);
}

const __m256d kAbsMask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));

void rhs_interior_avx2(const double* u, const Stencil& st, const double* drift,
                       double lin, double k, double* out, std::size_t n) {
    if (n < 2) return;
    const double* d2m = st.d2m.data();
    const double* d2c = st.d2c.data();
    const double* d2p = st.d2p.data();
    const double* d1m = st.d1m.data();
    const double* d1c = st.d1c.data();
    const double* d1p = st.d1p.data();
    const __m256d vone = _mm256_set1_pd(1.0);
    const __m256d vlin = _mm256_set1_pd(lin);
    const __m256d vk = _mm256_set1_pd(k);
    std::size_t i = 1;
    const std::size_t end = n - 1;
    for (; i + 4 <= end; i += 4) {
        const __m256d um = _mm256_loadu_pd(u + i - 1);
        const __m256d uc = _mm256_loadu_pd(u + i);
        const __m256d up = _mm256_loadu_pd(u + i + 1);
        const __m256d s2 = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(_mm256_loadu_pd(d2m + i), um),
                          _mm256_mul_pd(_mm256_loadu_pd(d2c + i), uc)),
            _mm256_mul_pd(_mm256_loadu_pd(d2p + i), up));
        const __m256d s1 = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(_mm256_loadu_pd(d1m + i), um),
                          _mm256_mul_pd(_mm256_loadu_pd(d1c + i), uc)),
            _mm256_mul_pd(_mm256_loadu_pd(d1p + i), up));
        const __m256d diff =
            _mm256_div_pd(s2, _mm256_add_pd(vone, _mm256_mul_pd(s1, s1)));
        const __m256d adv = _mm256_mul_pd(_mm256_loadu_pd(drift + i), s1);
        const __m256d r = _mm256_sub_pd(
            _mm256_add_pd(_mm256_add_pd(diff, adv), _mm256_mul_pd(vlin, uc)),
            _mm256_div_pd(vk, uc));
        _mm256_storeu_pd(out + i, r);
    }
    for (; i < end; ++i) {
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

void gradient_interior_avx2(const double* u, const Stencil& st, double* out,
                            std::size_t n) {
    if (n < 2) return;
    const double* d1m = st.d1m.data();
    const double* d1c = st.d1c.data();
    const double* d1p = st.d1p.data();
    std::size_t i = 1;
    const std::size_t end = n - 1;
    for (; i + 4 <= end; i += 4) {
        const __m256d s1 = _mm256_add_pd(
            _mm256_add_pd(
                _mm256_mul_pd(_mm256_loadu_pd(d1m + i), _mm256_loadu_pd(u + i - 1)),
                _mm256_mul_pd(_mm256_loadu_pd(d1c + i), _mm256_loadu_pd(u + i))),
            _mm256_mul_pd(_mm256_loadu_pd(d1p + i), _mm256_loadu_pd(u + i + 1)));
        _mm256_storeu_pd(out + i, s1);
    }
    for (; i < end; ++i) {
        out[i] = (d1m[i] * u[i - 1] + d1c[i] * u[i]) + d1p[i] * u[i + 1];
    }
}

void assemble_interior_avx2(const double* u, const double* grad, const Stencil& st,
                            const double* drift, double dt, double lin, double k,
                            double* lower, double* diag, double* upper, double* b,
                            std::size_t n) {
    if (n < 2) return;
    const double* d2m = st.d2m.data();
    const double* d2c = st.d2c.data();
    const double* d2p = st.d2p.data();
    const double* d1m = st.d1m.data();
    const double* d1c = st.d1c.data();
    const double* d1p = st.d1p.data();
    const __m256d vone = _mm256_set1_pd(1.0);
    const __m256d vdt = _mm256_set1_pd(dt);
    const __m256d vmdt = _mm256_set1_pd(-dt);
    const __m256d vlin = _mm256_set1_pd(lin);
    const __m256d vk = _mm256_set1_pd(k);
    std::size_t i = 1;
    const std::size_t end = n - 1;
    for (; i + 4 <= end; i += 4) {
        const __m256d g = _mm256_loadu_pd(grad + i);
        const __m256d D = _mm256_div_pd(vone, _mm256_add_pd(vone, _mm256_mul_pd(g, g)));
        const __m256d c = _mm256_loadu_pd(drift + i);
        const __m256d lo = _mm256_mul_pd(
            vmdt, _mm256_add_pd(_mm256_mul_pd(D, _mm256_loadu_pd(d2m + i)),
                                _mm256_mul_pd(c, _mm256_loadu_pd(d1m + i))));
        const __m256d di = _mm256_sub_pd(
            vone, _mm256_mul_pd(vdt, _mm256_add_pd(
                                         _mm256_mul_pd(D, _mm256_loadu_pd(d2c + i)),
                                         _mm256_mul_pd(c, _mm256_loadu_pd(d1c + i)))));
        const __m256d up = _mm256_mul_pd(
            vmdt, _mm256_add_pd(_mm256_mul_pd(D, _mm256_loadu_pd(d2p + i)),
                                _mm256_mul_pd(c, _mm256_loadu_pd(d1p + i))));
        const __m256d uc = _mm256_loadu_pd(u + i);
        const __m256d bb = _mm256_add_pd(
            uc, _mm256_mul_pd(vdt, _mm256_sub_pd(_mm256_mul_pd(vlin, uc),
                                                 _mm256_div_pd(vk, uc))));
        _mm256_storeu_pd(lower + i, lo);
        _mm256_storeu_pd(diag + i, di);
        _mm256_storeu_pd(upper + i, up);
        _mm256_storeu_pd(b + i, bb);
    }
    for (; i < end; ++i) {
        const double g = grad[i];
        const double D = 1.0 / (1.0 + g * g);
        const double c = drift[i];
        lower[i] = -dt * (D * d2m[i] + c * d1m[i]);
        diag[i] = 1.0 - dt * (D * d2c[i] + c * d1c[i]);
        upper[i] = -dt * (D * d2p[i] + c * d1p[i]);
        b[i] = u[i] + dt * (lin * u[i] - k / u[i]);
    }
}

double min_element_avx2(const double* x, std::size_t n, std::size_t* argmin) {
    double m;
    if (n >= 8) {
        __m256d vm = _mm256_loadu_pd(x);
        std::size_t i = 4;
        for (; i + 4 <= n; i += 4) {
            vm = _mm256_min_pd(vm, _mm256_loadu_pd(x + i));
        }
        m = hmin(vm);
        for (; i < n; ++i) {
            if (x[i] < m) m = x[i];
        }
    } else {
        m = x[0];
        for (std::size_t i = 1; i < n; ++i) {
            if (x[i] < m) m = x[i];
        }
    }
    std::size_t arg = 0;
    while (arg < n && !(x[arg] == m)) ++arg;
    if (argmin) *argmin = arg;
    return x[arg];
}

double max_abs_avx2(const double* x, std::size_t n) {
    double m = 0.0;
    std::size_t i = 0;
    if (n >= 8) {
        __m256d vm = _mm256_and_pd(_mm256_loadu_pd(x), kAbsMask);
        i = 4;
        for (; i + 4 <= n; i += 4) {
            vm = _mm256_max_pd(vm, _mm256_and_pd(_mm256_loadu_pd(x + i), kAbsMask));
        }
        m = hmax(_mm256_castpd256_pd128(vm), _mm256_extractf128_pd(vm, 1));
    }
    for (; i < n; ++i) {
        const double a = std::fabs(x[i]);
        if (a > m) m = a;
    }
    return m;
}

void scale_avx2(const double* x, double a, double* out, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) out[i] = a * x[i];
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d r =
            _mm256_add_pd(_mm256_loadu_pd(y + i),
                          _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(y + i, r);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

double weighted_max_abs_avx2(const double* w, const double* x, std::size_t n) {
    double m = 0.0;
    std::size_t i = 0;
    if (n >= 8) {
        __m256d vm = _mm256_and_pd(
            _mm256_mul_pd(_mm256_loadu_pd(w), _mm256_loadu_pd(x)), kAbsMask);
        i = 4;
        for (; i + 4 <= n; i += 4) {
            const __m256d p =
                _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(x + i));
            vm = _mm256_max_pd(vm, _mm256_and_pd(p, kAbsMask));
        }
        m = hmax(_mm256_castpd256_pd128(vm), _mm256_extractf128_pd(vm, 1));
    }
    for (; i < n; ++i) {
        const double a = std::fabs(w[i] * x[i]);
        if (a > m) m = a;
    }
    return m;
}

} // namespace

const KernelTable& avx2_table() {
    static const KernelTable t = {
        "avx2",
        rhs_interior_avx2,
        gradient_interior_avx2,
        assemble_interior_avx2,
        min_element_avx2,
        max_abs_avx2,
        scale_avx2,
        axpy_avx2,
        weighted_max_abs_avx2,
    };
    return t;
}

} // namespace pinchflow::kern

#endif // x86_64
