#include "irkprec/gmres.hpp"

#include <chrono>
#include <cmath>

#include "irkprec/kernels.hpp"

namespace irkprec {

std::string side_name(PrecondSide s) {
    return s == PrecondSide::Left ? "left" : "right";
}

std::pair<Vec, SolveReport> gmres(const ApplyFn& apply_op, int n,
                                  std::span<const double> rhs,
                                  const ApplyFn* precond, GmresConfig cfg) {
    require(static_cast<int>(rhs.size()) == n, "gmres: rhs size mismatch");
    require(cfg.rel_tol > 0.0, "gmres: rel_tol must be positive");
    const auto t0 = std::chrono::steady_clock::now();

    SolveReport rep;
    Vec x(static_cast<std::size_t>(n), 0.0);

    auto finish = [&](Vec&& sol) {
        rep.solve_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        const double bnorm = nrm2(rhs);
        if (bnorm > 0.0) {
            Vec ax(static_cast<std::size_t>(n));
            apply_op(sol, ax);
            axpy(-1.0, rhs, ax);
            rep.true_rel_residual = nrm2(ax) / bnorm;
        } else {
            rep.true_rel_residual = 0.0;
        }
        return std::make_pair(std::move(sol), rep);
    };

    // Metric base vector: P^{-1} b for left preconditioning, b otherwise.
    Vec r0(static_cast<std::size_t>(n));
    if (precond && cfg.side == PrecondSide::Left)
        (*precond)(rhs, r0);
    else
        copy(rhs, r0);
    const double beta = nrm2(r0);
    if (beta == 0.0 || nrm2(rhs) == 0.0) {
        rep.history = {0.0};
        rep.final_rel_residual = 0.0;
        return finish(std::move(x));
    }

    std::vector<Vec> V;
    scal(1.0 / beta, r0);
    V.push_back(std::move(r0));

    std::vector<Vec> H; // H[j] holds column j, length j+2
    std::vector<double> cs, sn, g;
    g.push_back(beta);
    rep.history = {1.0};

    Vec w(static_cast<std::size_t>(n)), tmp(static_cast<std::size_t>(n));
    int m = 0;
    for (int j = 0; j < cfg.max_iter; ++j) {
        // w = P^{-1} A v (left), A P^{-1} v (right), or A v.
        if (precond && cfg.side == PrecondSide::Right) {
            (*precond)(V[j], tmp);
            apply_op(tmp, w);
        } else if (precond && cfg.side == PrecondSide::Left) {
            apply_op(V[j], tmp);
            (*precond)(tmp, w);
        } else {
            apply_op(V[j], w);
        }

        // Modified Gram-Schmidt, one extra pass when cancellation bites.
        const double before = nrm2(w);
        Vec h(static_cast<std::size_t>(j) + 2, 0.0);
        for (int i = 0; i <= j; ++i) {
            const double hij = dot(V[i], w);
            h[i] = hij;
            axpy(-hij, V[i], w);
        }
        if (nrm2(w) < 0.70710678118654752 * before) {
            for (int i = 0; i <= j; ++i) {
                const double corr = dot(V[i], w);
                h[i] += corr;
                axpy(-corr, V[i], w);
            }
        }
        const double hnext = nrm2(w);
        h[j + 1] = hnext;

        // Rotate the new column into triangular form.
        for (int i = 0; i < j; ++i) {
            const double t = cs[i] * h[i] + sn[i] * h[i + 1];
            h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
            h[i] = t;
        }
        const double denom = std::hypot(h[j], h[j + 1]);
        double c = 1.0, s = 0.0;
        if (denom > 0.0) {
            c = h[j] / denom;
            s = h[j + 1] / denom;
        }
        cs.push_back(c);
        sn.push_back(s);
        h[j] = denom;
        h[j + 1] = 0.0;
        g.push_back(-s * g[j]);
        g[j] = c * g[j];
        H.push_back(std::move(h));

        m = j + 1;
        const double res_rel = std::fabs(g[j + 1]) / beta;
        rep.history.push_back(res_rel);
        if (res_rel <= cfg.rel_tol) break;
        if (hnext <= 1e-14 * beta) break; // Krylov space became invariant
        if (j + 1 < cfg.max_iter) {
            scal(1.0 / hnext, w);
            V.push_back(w);
        }
    }

    // Back substitution for y, then x = V y (and x = P^{-1} x on the right).
    Vec y(static_cast<std::size_t>(m));
    for (int i = m - 1; i >= 0; --i) {
        double s = g[i];
        for (int k = i + 1; k < m; ++k) s -= H[k][i] * y[k];
        y[i] = s / H[i][i];
    }
    for (int i = 0; i < m; ++i) axpy(y[i], V[i], x);
    if (precond && cfg.side == PrecondSide::Right) {
        (*precond)(x, tmp);
        std::swap(x, tmp);
    }

    rep.iterations = m;
    rep.final_rel_residual = rep.history.back();
    rep.converged = rep.final_rel_residual <= cfg.rel_tol;
    return finish(std::move(x));
}

} // namespace irkprec
