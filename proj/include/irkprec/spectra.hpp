#ifndef IRKPREC_SPECTRA_HPP
#define IRKPREC_SPECTRA_HPP

#include <complex>
#include <string>

#include "irkprec/eigs.hpp"
#include "irkprec/gmres.hpp"
#include "irkprec/stage.hpp"

namespace irkprec {

struct SpectralReport {
    std::string label;
    int n = 0;
    double kappa2 = 0.0;
    std::vector<std::complex<double>> eigenvalues; // dense path only
};

/// Operator handle for A P^{-1} (right) or P^{-1} A (left), with the
/// transpose apply needed by singular-value iterations. Pass P = nullptr
/// for the unpreconditioned operator. The preconditioner must use exact
/// subsolves, and the stage operator must be built with transpose support.
/// The handle borrows both objects.
LinearOperator preconditioned_operator(const StageOperator& op,
                                       const BlockPreconditioner* P,
                                       PrecondSide side);

/// Condition number (always) plus the full eigenvalue set when requested;
/// eigenvalues require n <= 8000 (the operator is materialized densely).
SpectralReport analyze(const LinearOperator& handle, const std::string& label,
                       bool want_eigs, unsigned long seed = 0x2545F491u);

/// CSV rows `label,re,im`, 17 significant digits.
void export_eigen_scatter(const std::vector<SpectralReport>& reports,
                          const std::string& path);

} // namespace irkprec

#endif
