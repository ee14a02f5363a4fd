#include "pinchflow/kernels/kernels.hpp"
#include "pinchflow/kernels/cpu.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace pinchflow::kern {

const KernelTable& scalar_table();
#if defined(PINCHFLOW_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

bool cpu_has_avx2() {
#if defined(PINCHFLOW_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

const KernelTable* backend_table(Backend b) {
    switch (b) {
    case Backend::scalar:
        return &scalar_table();
    case Backend::avx2:
#if defined(PINCHFLOW_HAVE_AVX2)
        if (cpu_has_avx2()) return &avx2_table();
#endif
        return nullptr;
    }
    return nullptr;
}

namespace {

Backend select_backend() {
    if (const char* env = std::getenv("PINCHFLOW_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && backend_table(Backend::avx2))
            return Backend::avx2;
        return Backend::scalar;
    }
    return backend_table(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

} // namespace

Backend active_backend() {
    static const Backend b = select_backend();
    return b;
}

const KernelTable& kernels() {
    static const KernelTable& t = *backend_table(active_backend());
    return t;
}

Stencil make_stencil(std::span<const double> radii) {
    const std::size_t n = radii.size();
    if (n < 3) throw std::invalid_argument("make_stencil: need at least 3 grid points");
    Stencil st;
    st.n = n;
    st.d2m.assign(n, 0.0);
    st.d2c.assign(n, 0.0);
    st.d2p.assign(n, 0.0);
    st.d1m.assign(n, 0.0);
    st.d1c.assign(n, 0.0);
    st.d1p.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hm = radii[i] - radii[i - 1];
        const double hp = radii[i + 1] - radii[i];
        if (hm <= 0.0 || hp <= 0.0)
            throw std::invalid_argument("make_stencil: radii must be strictly increasing");
        const double hs = hm + hp;
        st.d2m[i] = 2.0 / (hm * hs);
        st.d2c[i] = -2.0 / (hm * hp);
        st.d2p[i] = 2.0 / (hp * hs);
        st.d1m[i] = -hp / (hm * hs);
        st.d1c[i] = (hp - hm) / (hm * hp);
        st.d1p[i] = hm / (hp * hs);
    }
    return st;
}

} // namespace pinchflow::kern
