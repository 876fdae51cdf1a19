// AVX2+FMA kernel variants. Built with -mavx2 -mfma where the compiler allows
// it; compiles to a stub otherwise. Selection happens at runtime in
// kernels_dispatch.cpp, never here.

#include <cstddef>

#include "rmup/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace rmup::kern {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double v_sum(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i];
    return acc;
}

double v_dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void v_axpy(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                                _mm256_loadu_pd(y + i)));
        _mm256_storeu_pd(y + i + 4, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4),
                                                    _mm256_loadu_pd(y + i + 4)));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

double v_sum_sq_diff(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void v_gaspari_cohn(const double* d, std::size_t n, double L, double* w) {
    const __m256d invL = _mm256_set1_pd(1.0 / L);
    const __m256d c1 = _mm256_set1_pd(1.0);
    const __m256d c2 = _mm256_set1_pd(2.0);
    const __m256d k53 = _mm256_set1_pd(5.0 / 3.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d r = _mm256_mul_pd(_mm256_loadu_pd(d + i), invL);
        const __m256d r2 = _mm256_mul_pd(r, r);

        // inner branch: -r^5/4 + r^4/2 + 5r^3/8 - 5r^2/3 + 1
        __m256d p1 = _mm256_fmadd_pd(_mm256_set1_pd(-0.25), r, _mm256_set1_pd(0.5));
        p1 = _mm256_fmadd_pd(p1, r, _mm256_set1_pd(0.625));
        p1 = _mm256_fmadd_pd(p1, r, _mm256_sub_pd(_mm256_setzero_pd(), k53));
        p1 = _mm256_fmadd_pd(p1, r2, c1);

        // outer branch: r^5/12 - r^4/2 + 5r^3/8 + 5r^2/3 - 5r + 4 - 2/(3r)
        __m256d p2 = _mm256_fmadd_pd(_mm256_set1_pd(1.0 / 12.0), r, _mm256_set1_pd(-0.5));
        p2 = _mm256_fmadd_pd(p2, r, _mm256_set1_pd(0.625));
        p2 = _mm256_fmadd_pd(p2, r, k53);
        p2 = _mm256_fmadd_pd(p2, r, _mm256_set1_pd(-5.0));
        p2 = _mm256_fmadd_pd(p2, r, _mm256_set1_pd(4.0));
        p2 = _mm256_sub_pd(
            p2, _mm256_div_pd(_mm256_set1_pd(2.0 / 3.0), _mm256_max_pd(r, _mm256_set1_pd(1e-300))));

        const __m256d lt1 = _mm256_cmp_pd(r, c1, _CMP_LT_OQ);
        const __m256d lt2 = _mm256_cmp_pd(r, c2, _CMP_LT_OQ);
        __m256d res = _mm256_blendv_pd(p2, p1, lt1);
        res = _mm256_and_pd(res, lt2);  // exact zero at and beyond r = 2
        _mm256_storeu_pd(w + i, res);
    }
    if (i < n) scalar_ops().gaspari_cohn(d + i, n - i, L, w + i);
}

constexpr Ops kAvx2Ops{"avx2", v_sum, v_dot, v_axpy, v_sum_sq_diff, v_gaspari_cohn};

}  // namespace

const Ops* avx2_ops_compiled() { return &kAvx2Ops; }

}  // namespace rmup::kern

#else

namespace rmup::kern {
const Ops* avx2_ops_compiled() { return nullptr; }
}  // namespace rmup::kern

#endif
