#ifndef IRKPREC_KERNELS_HPP
#define IRKPREC_KERNELS_HPP

#include <cstddef>
#include <span>

// Low-level vector kernels. Every kernel comes in an OpenMP flavor (the
// default) and a serial reference flavor (suffix _serial) used by the test
// suite and the kernel benchmark. Reductions are blocked so the result is
// bit-identical for any thread count.

namespace irkprec {

double dot(std::span<const double> x, std::span<const double> y);
double dot_serial(std::span<const double> x, std::span<const double> y);

double nrm2(std::span<const double> x);
double nrm2_serial(std::span<const double> x);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void axpy_serial(double alpha, std::span<const double> x, std::span<double> y);

/// x *= alpha
void scal(double alpha, std::span<double> x);

void copy(std::span<const double> src, std::span<double> dst);
void fill(std::span<double> x, double value);

} // namespace irkprec

#endif
