#pragma once

#include <cstddef>

namespace rmup::kern {

// Inner-loop primitives behind the ensemble statistics and update sweeps.
// Scalar implementations are the reference; SIMD variants must agree with
// them within floating-point reassociation tolerance (see tests).
struct Ops {
    const char* name;
    double (*sum)(const double* x, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // Σ (a[i] - b[i])^2
    double (*sum_sq_diff)(const double* a, const double* b, std::size_t n);
    // Gaspari-Cohn taper of d[i]/L into w[i]; exactly 0 for d >= 2L.
    void (*gaspari_cohn)(const double* d, std::size_t n, double L, double* w);
};

const Ops& scalar_ops();
// nullptr when AVX2+FMA is unavailable (not compiled in or not on this CPU).
const Ops* avx2_ops();

// Backend picked at first use: best available, overridable with
// RMUP_KERNELS=scalar|avx2 in the environment.
const Ops& active();

inline double sum(const double* x, std::size_t n) { return active().sum(x, n); }
inline double dot(const double* a, const double* b, std::size_t n) {
    return active().dot(a, b, n);
}
inline void axpy(double a, const double* x, double* y, std::size_t n) {
    active().axpy(a, x, y, n);
}
inline double sum_sq_diff(const double* a, const double* b, std::size_t n) {
    return active().sum_sq_diff(a, b, n);
}
inline void gaspari_cohn(const double* d, std::size_t n, double L, double* w) {
    active().gaspari_cohn(d, n, L, w);
}

}  // namespace rmup::kern
