#include "irkprec/kernels.hpp"

#include <cassert>
#include <cmath>
#include <vector>

namespace irkprec {

namespace {

// Reduction block size. Partial block sums are always combined in block
// order, so serial and OpenMP results are bit-identical for any thread
// count.
constexpr std::ptrdiff_t kBlock = 4096;

double dot_block(std::span<const double> x, std::span<const double> y,
                 std::ptrdiff_t lo, std::ptrdiff_t hi) {
    double s = 0.0;
    for (std::ptrdiff_t i = lo; i < hi; ++i) s += x[i] * y[i];
    return s;
}

} // namespace

double dot_serial(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
    double s = 0.0;
    for (std::ptrdiff_t lo = 0; lo < n; lo += kBlock)
        s += dot_block(x, y, lo, std::min(lo + kBlock, n));
    return s;
}

double dot(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
    if (n < 2 * kBlock) return dot_serial(x, y);
    const std::ptrdiff_t nb = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(static_cast<std::size_t>(nb));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < nb; ++b) {
        const std::ptrdiff_t lo = b * kBlock;
        partial[static_cast<std::size_t>(b)] =
            dot_block(x, y, lo, std::min(lo + kBlock, n));
    }
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

double nrm2_serial(std::span<const double> x) {
    return std::sqrt(dot_serial(x, x));
}

double nrm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy_serial(double alpha, std::span<const double> x,
                 std::span<double> y) {
    assert(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scal(double alpha, std::span<double> x) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) x[i] *= alpha;
}

void copy(std::span<const double> src, std::span<double> dst) {
    assert(src.size() == dst.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(src.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) dst[i] = src[i];
}

void fill(std::span<double> x, double value) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) x[i] = value;
}

} // namespace irkprec
