#include "irkprec/irk.hpp"

#include <cmath>

#include "irkprec/kernels.hpp"

namespace irkprec {

Vec stage_rhs(const LinearParabolicSystem& sys, const ButcherTable& table,
              double ht, double t_n, std::span<const double> u_n) {
    const int n = sys.n();
    require(static_cast<int>(u_n.size()) == n, "stage_rhs: dimension mismatch");
    require(sys.f_lift.empty() || static_cast<int>(sys.f_lift.size()) == n,
            "stage_rhs: lift size mismatch");
    const int s = table.s;

    Vec fu = spmv(*sys.F, u_n);
    if (!sys.f_lift.empty()) axpy(1.0, sys.f_lift, fu);

    Vec rhs(static_cast<std::size_t>(s) * n);
    for (int i = 0; i < s; ++i) {
        auto blk = std::span<double>(rhs).subspan(
            static_cast<std::size_t>(i) * n, n);
        for (int k = 0; k < n; ++k) blk[k] = -fu[k];
        if (sys.forcing) {
            const Vec f = sys.forcing(t_n + table.c[i] * ht);
            require(static_cast<int>(f.size()) == n,
                    "stage_rhs: forcing size mismatch");
            axpy(1.0, f, blk);
        }
    }
    return rhs;
}

IrkStepResult irk_step(const LinearParabolicSystem& sys,
                       const ButcherTable& table, double ht, double t_n,
                       std::span<const double> u_n,
                       const BlockPreconditioner* P, const GmresConfig& cfg) {
    require(ht > 0.0, "irk_step: ht must be positive");
    const int n = sys.n();
    const int s = table.s;

    const StageOperator op(sys.M, sys.F, table.A, ht);
    const Vec rhs = stage_rhs(sys, table, ht, t_n, u_n);

    ApplyFn apply = [&op](std::span<const double> v, std::span<double> y) {
        op.apply(v, y);
    };
    ApplyFn papply;
    if (P) {
        require(P->size() == op.size(), "irk_step: preconditioner size mismatch");
        papply = [P](std::span<const double> v, std::span<double> w) {
            P->apply(v, w);
        };
    }

    auto [K, report] = gmres(apply, op.size(), rhs, P ? &papply : nullptr, cfg);

    IrkStepResult out;
    out.u_next.assign(u_n.begin(), u_n.end());
    for (int i = 0; i < s; ++i)
        axpy(ht * table.b[i],
             std::span<const double>(K).subspan(
                 static_cast<std::size_t>(i) * n, n),
             out.u_next);
    out.report = std::move(report);
    return out;
}

TrajectorySummary integrate(const LinearParabolicSystem& sys,
                            const ButcherTable& table,
                            std::span<const double> u0, double t_final,
                            double ht, const PrecondFactory& make_precond,
                            const GmresConfig& cfg) {
    require(ht > 0.0, "integrate: ht must be positive");
    require(t_final >= 0.0, "integrate: t_final must be nonnegative");

    TrajectorySummary out;
    out.u_final.assign(u0.begin(), u0.end());

    double t = 0.0;
    double cur_ht = ht;
    std::shared_ptr<const BlockPreconditioner> P =
        make_precond ? make_precond(cur_ht) : nullptr;
    while (t < t_final - 1e-14 * t_final) {
        double step = ht;
        if (t + step > t_final) step = t_final - t; // truncated final step
        if (step != cur_ht) {
            cur_ht = step;
            P = make_precond ? make_precond(cur_ht) : nullptr;
        }
        IrkStepResult r =
            irk_step(sys, table, step, t, out.u_final, P.get(), cfg);
        out.u_final = std::move(r.u_next);
        out.all_converged = out.all_converged && r.report.converged;
        out.reports.push_back(std::move(r.report));
        t += step;
        out.steps += 1;
    }
    out.t_final = t;
    return out;
}

} // namespace irkprec
