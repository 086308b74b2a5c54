#ifndef IRKPREC_AMG_HPP
#define IRKPREC_AMG_HPP

#include <optional>
#include <string>

#include "irkprec/csr.hpp"
#include "irkprec/sparse_lu.hpp"

namespace irkprec {

enum class AmgSmoother { DampedJacobi, GaussSeidel };

struct AmgParams {
    double theta = 0.25;  // strength-of-connection threshold, in (0,1)
    int pre_sweeps = 1;
    int post_sweeps = 1;
    AmgSmoother smoother = AmgSmoother::DampedJacobi;
    double jacobi_weight = 2.0 / 3.0;
    // Prolongator smoothing weight is this over the spectral-radius
    // estimate of D^{-1} * sym(A).
    double prolongation_weight = 4.0 / 3.0;
    // Damped-Jacobi steps applied to the tentative prolongator; a second
    // step widens the interpolation support, which pays off for quadratic
    // elements.
    int prolongation_steps = 1;
    int max_coarse = 64;
    int max_levels = 10;
};

/// Smoothed-aggregation multigrid hierarchy. Immutable once built; V-cycle
/// applications may run concurrently.
struct AmgHierarchy {
    struct Level {
        CsrMatrix A;
        Vec inv_diag;
        CsrMatrix P; // prolongator to this level from the next coarser one
        CsrMatrix R; // restriction, R = P^T
    };
    std::vector<Level> levels; // levels[k].P/R absent on the coarsest
    std::optional<SparseLu> coarse_lu;
    AmgParams params;

    int n_levels() const { return static_cast<int>(levels.size()); }
    int fine_size() const { return levels.front().A.n_rows; }
};

/// Builds the hierarchy: greedy root-node aggregation over the strength
/// graph of |A| + |A|^T, piecewise-constant tentative prolongator smoothed
/// by one damped-Jacobi step, Galerkin coarse operators, direct solve at
/// the coarsest level.
AmgHierarchy amg_setup(const CsrMatrix& A, AmgParams params = {});

/// One V(pre,post) cycle applied to a residual; linear and deterministic.
Vec amg_vcycle(const AmgHierarchy& h, std::span<const double> r);
void amg_vcycle(const AmgHierarchy& h, std::span<const double> r,
                std::span<double> z);

struct AmgStats {
    int levels = 0;
    std::vector<int> sizes;
    double operator_complexity = 0.0; // sum of nnz over fine-level nnz
};

AmgStats amg_stats(const AmgHierarchy& h);
std::string to_string(const AmgStats& s);

} // namespace irkprec

#endif
