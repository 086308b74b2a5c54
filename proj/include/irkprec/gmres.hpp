#ifndef IRKPREC_GMRES_HPP
#define IRKPREC_GMRES_HPP

#include <functional>
#include <limits>
#include <span>
#include <utility>

#include "irkprec/common.hpp"

namespace irkprec {

enum class PrecondSide { Left, Right };

std::string side_name(PrecondSide s);

struct GmresConfig {
    PrecondSide side = PrecondSide::Right;
    double rel_tol = 1e-8;
    int max_iter = 500; // full (non-restarted) GMRES
};

struct SolveReport {
    int iterations = 0;
    /// Stopping-metric relative residuals, one entry per iteration plus
    /// the initial 1; nonincreasing for full GMRES.
    std::vector<double> history;
    /// Final value of the stopping metric: the preconditioned relative
    /// residual for left preconditioning, the recurrence estimate of the
    /// true relative residual for right / no preconditioning.
    double final_rel_residual = 0.0;
    /// ||b - A x|| / ||b||, recomputed from the returned iterate.
    double true_rel_residual = 0.0;
    bool converged = true;
    double solve_seconds = 0.0;
    double setup_seconds = 0.0;
    double rel_error = std::numeric_limits<double>::quiet_NaN();
};

using ApplyFn = std::function<void(std::span<const double>, std::span<double>)>;

/// Full-memory GMRES with modified Gram-Schmidt (one reorthogonalization
/// pass when cancellation is detected) and a zero initial guess.
///
/// Left preconditioning iterates on P^{-1} A x = P^{-1} b and stops on the
/// preconditioned relative residual; right preconditioning iterates on
/// A P^{-1} y = b with x = P^{-1} y and stops on the true relative
/// residual. Hitting max_iter is reported (converged = false), not thrown.
std::pair<Vec, SolveReport> gmres(const ApplyFn& apply_op, int n,
                                  std::span<const double> rhs,
                                  const ApplyFn* precond, GmresConfig cfg);

} // namespace irkprec

#endif
