#ifndef IRKPREC_IRK_HPP
#define IRKPREC_IRK_HPP

#include <functional>
#include <memory>

#include "irkprec/gmres.hpp"
#include "irkprec/stage.hpp"

namespace irkprec {

/// Semidiscrete linear parabolic problem M du/dt = -F u - lift + M-weighted
/// forcing, posed over the free dofs. Dirichlet data enters through
/// f_lift = (F g) restricted to the free dofs.
struct LinearParabolicSystem {
    std::shared_ptr<const CsrMatrix> M;
    std::shared_ptr<const CsrMatrix> F;
    Vec f_lift;                          // empty means zero
    std::function<Vec(double)> forcing;  // may be null

    int n() const { return M->n_rows; }
};

/// Right-hand side of the stage system: block i holds
/// -F u_n - f_lift + forcing(t_n + c_i ht).
Vec stage_rhs(const LinearParabolicSystem& sys, const ButcherTable& table,
              double ht, double t_n, std::span<const double> u_n);

struct IrkStepResult {
    Vec u_next;
    SolveReport report;
};

/// One IRK step: solve the stage system with GMRES, then
/// u_{n+1} = u_n + ht * sum_i b_i K_i over the free dofs.
IrkStepResult irk_step(const LinearParabolicSystem& sys,
                       const ButcherTable& table, double ht, double t_n,
                       std::span<const double> u_n,
                       const BlockPreconditioner* P, const GmresConfig& cfg);

struct TrajectorySummary {
    Vec u_final;
    double t_final = 0.0;
    int steps = 0;
    std::vector<SolveReport> reports;
    bool all_converged = true;
};

using PrecondFactory =
    std::function<std::shared_ptr<const BlockPreconditioner>(double ht)>;

/// Repeats irk_step ceil(t_final/ht) times, truncating the last step to
/// land on t_final exactly. The factory is consulted whenever the step
/// size changes (in practice: once, plus once for a truncated last step).
TrajectorySummary integrate(const LinearParabolicSystem& sys,
                            const ButcherTable& table,
                            std::span<const double> u0, double t_final,
                            double ht, const PrecondFactory& make_precond,
                            const GmresConfig& cfg);

} // namespace irkprec

#endif
