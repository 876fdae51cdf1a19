#include <cstddef>

#include "rmup/kernels.hpp"

namespace rmup::kern {
namespace {

double s_sum(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double s_dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void s_axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double s_sum_sq_diff(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

// Piecewise-quintic Gaspari-Cohn taper in r = d/L; support ends at r = 2.
double gc_value(double r) {
    if (r >= 2.0) return 0.0;
    if (r < 1.0) {
        return ((((-0.25 * r + 0.5) * r + 0.625) * r - 5.0 / 3.0) * r * r) + 1.0;
    }
    return ((((r / 12.0 - 0.5) * r + 0.625) * r + 5.0 / 3.0) * r - 5.0) * r + 4.0 -
           2.0 / (3.0 * r);
}

void s_gaspari_cohn(const double* d, std::size_t n, double L, double* w) {
    for (std::size_t i = 0; i < n; ++i) w[i] = gc_value(d[i] / L);
}

constexpr Ops kScalarOps{"scalar", s_sum, s_dot, s_axpy, s_sum_sq_diff, s_gaspari_cohn};

}  // namespace

const Ops& scalar_ops() { return kScalarOps; }

}  // namespace rmup::kern
