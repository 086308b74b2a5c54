#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "irkprec/spectra.hpp"
#include "irkprec/study.hpp"
#include "support/oracles.hpp"

using namespace irkprec;

namespace {

std::shared_ptr<const CsrMatrix> scalar_matrix(double v) {
    TripletBuilder b(1, 1);
    b.add(0, 0, v);
    return std::make_shared<const CsrMatrix>(b.compress());
}

std::shared_ptr<const CsrMatrix> shared(CsrMatrix m) {
    return std::make_shared<const CsrMatrix>(std::move(m));
}

} // namespace

TEST_CASE("an exactly matching preconditioner yields the identity operator") {
    // s=1: the Jacobi coefficient equals the full stage matrix.
    const ButcherTable t = make_radau_iia(1);
    const StageOperator op(scalar_matrix(1.0), scalar_matrix(2.5), t.A, 0.4,
                           true);
    const BlockPreconditioner P(scalar_matrix(1.0), scalar_matrix(2.5),
                                precond_coeff(t, CoeffKind::Jacobi), 0.4,
                                SubsolverKind::ExactLU, {}, true);
    for (PrecondSide side : {PrecondSide::Right, PrecondSide::Left}) {
        const LinearOperator h = preconditioned_operator(op, &P, side);
        const Vec v = oracle::random_vec(1, 3u);
        Vec y(1);
        h.apply(v, y);
        CHECK(std::fabs(y[0] - v[0]) <= 1e-10);
    }
}

TEST_CASE("left and right preconditioned operators share their spectrum") {
    const ButcherTable t = make_radau_iia(2);
    const CsrMatrix M = oracle::random_sparse(10, 0.4, 501u);
    const CsrMatrix F = oracle::random_sparse(10, 0.4, 503u);
    const double ht = 0.3;
    const StageOperator op(shared(M), shared(F), t.A, ht, true);
    const BlockPreconditioner P(shared(M), shared(F),
                                precond_coeff(t, CoeffKind::LowerFactor), ht,
                                SubsolverKind::ExactLU, {}, true);

    auto eigs_sorted = [&](PrecondSide side) {
        const LinearOperator h = preconditioned_operator(op, &P, side);
        auto e = dense_eigenvalues(materialize(h));
        std::sort(e.begin(), e.end(), [](auto a, auto b) {
            if (a.real() != b.real()) return a.real() < b.real();
            return a.imag() < b.imag();
        });
        return e;
    };
    const auto right = eigs_sorted(PrecondSide::Right);
    const auto left = eigs_sorted(PrecondSide::Left);
    for (std::size_t i = 0; i < right.size(); ++i)
        CHECK(std::abs(right[i] - left[i]) <= 1e-8);
}

TEST_CASE("transpose handle really is the transpose") {
    const ButcherTable t = make_radau_iia(2);
    const CsrMatrix M = oracle::random_sparse(7, 0.5, 601u);
    const CsrMatrix F = oracle::random_sparse(7, 0.5, 603u);
    const StageOperator op(shared(M), shared(F), t.A, 0.21, true);
    const BlockPreconditioner P(shared(M), shared(F),
                                precond_coeff(t, CoeffKind::UpperFactor), 0.21,
                                SubsolverKind::ExactLU, {}, true);
    for (PrecondSide side : {PrecondSide::Right, PrecondSide::Left}) {
        const LinearOperator h = preconditioned_operator(op, &P, side);
        const Vec x = oracle::random_vec(14, 71u);
        const Vec y = oracle::random_vec(14, 73u);
        Vec Ax(14), Aty(14);
        h.apply(x, Ax);
        h.apply_transpose(y, Aty);
        double ax_y = 0.0, x_aty = 0.0;
        for (int i = 0; i < 14; ++i) {
            ax_y += Ax[i] * y[i];
            x_aty += x[i] * Aty[i];
        }
        CHECK(ax_y == doctest::Approx(x_aty).epsilon(1e-10));
    }
}

TEST_CASE("no preconditioner: the handle is the stage operator itself") {
    const ButcherTable t = make_radau_iia(2);
    const CsrMatrix M = oracle::random_sparse(6, 0.5, 701u);
    const CsrMatrix F = oracle::random_sparse(6, 0.5, 703u);
    const StageOperator op(shared(M), shared(F), t.A, 0.15, true);
    const LinearOperator h =
        preconditioned_operator(op, nullptr, PrecondSide::Right);
    const Vec v = oracle::random_vec(12, 77u);
    Vec a(12);
    h.apply(v, a);
    CHECK(oracle::max_abs_diff(a, op.apply(v)) == 0.0);
}

TEST_CASE("analyze: identity and known diagonal") {
    const DenseMatrix I = DenseMatrix::identity(5);
    const SpectralReport ri = analyze(dense_operator(I), "identity", true);
    CHECK(ri.kappa2 == doctest::Approx(1.0));
    REQUIRE(ri.eigenvalues.size() == 5);
    for (const auto& ev : ri.eigenvalues)
        CHECK(std::abs(ev - std::complex<double>(1.0, 0.0)) <= 1e-12);

    DenseMatrix D(5, 5);
    for (int i = 0; i < 5; ++i) D(i, i) = i + 1.0;
    const SpectralReport rd = analyze(dense_operator(D), "diag", true);
    CHECK(rd.kappa2 == doctest::Approx(5.0));
    std::vector<double> re;
    for (const auto& ev : rd.eigenvalues) re.push_back(ev.real());
    std::sort(re.begin(), re.end());
    for (int i = 0; i < 5; ++i) CHECK(re[i] == doctest::Approx(i + 1.0));
}

TEST_CASE("eigen scatter export: shape and round trip") {
    const std::string path = "eigs_export_test.csv";
    export_eigen_scatter({}, path);
    {
        std::ifstream in(path);
        std::string line;
        int lines = 0;
        while (std::getline(in, line)) ++lines;
        CHECK(lines == 1); // header only
    }

    std::vector<SpectralReport> reps(2);
    reps[0].label = "alpha";
    reps[0].eigenvalues = {{0.1234567890123456789, -1.0},
                           {2.0, 0.333333333333333314829616256247}};
    reps[1].label = "beta";
    reps[1].eigenvalues = {{-7.25, 0.0}, {1e-17, 3.5}};
    export_eigen_scatter(reps, path);

    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "label,re,im");
    int row = 0;
    std::vector<std::complex<double>> parsed;
    std::vector<std::string> labels;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string label, re, im;
        std::getline(ss, label, ',');
        std::getline(ss, re, ',');
        std::getline(ss, im, ',');
        labels.push_back(label);
        parsed.emplace_back(std::stod(re), std::stod(im));
        ++row;
    }
    CHECK(row == 4);
    CHECK(labels[0] == "alpha");
    CHECK(labels[3] == "beta");
    CHECK(parsed[0] == reps[0].eigenvalues[0]); // exact doubles survive
    CHECK(parsed[1] == reps[0].eigenvalues[1]);
    CHECK(parsed[3] == reps[1].eigenvalues[1]);
    std::remove(path.c_str());
}

TEST_CASE("heat fixture: preconditioned spectra behave like the s x s models") {
    // Small-s sanity version of the full ranking/positivity checks that
    // run at acceptance scale: s = 2 and 3, hx = 1/8, p = 2.
    const ProblemSetup setup = make_heat_setup(8, 2);
    ExperimentConfig cfg;
    for (int s : {2, 3}) {
        const ButcherTable t = make_radau_iia(s);
        const double ht = cfg.coupled_ht(s, 8);
        const StageOperator op(setup.sys.M, setup.sys.F, t.A, ht, true);

        std::vector<double> kappa_full, kappa_small;
        for (CoeffKind kind :
             {CoeffKind::Jacobi, CoeffKind::GaussSeidelLower,
              CoeffKind::UpperFactor, CoeffKind::LowerFactor}) {
            const PrecondCoeff coeff = precond_coeff(t, kind);
            const BlockPreconditioner P(setup.sys.M, setup.sys.F, coeff, ht,
                                        SubsolverKind::ExactLU, {}, true);
            const LinearOperator h =
                preconditioned_operator(op, &P, PrecondSide::Right);
            const SpectralReport rep = analyze(h, coeff_kind_name(kind), s == 2);
            kappa_full.push_back(rep.kappa2);
            if (s == 2)
                for (const auto& ev : rep.eigenvalues)
                    CHECK(ev.real() > 0.0);

            // kappa_2(A * Atilde^{-1}) on the s x s coefficients
            DenseMatrix X(s, s);
            std::vector<double> At(static_cast<std::size_t>(s) * s);
            for (int i = 0; i < s; ++i)
                for (int j = 0; j < s; ++j) At[i * s + j] = coeff.Atilde(j, i);
            for (int i = 0; i < s; ++i) {
                std::vector<double> rhs(s);
                for (int j = 0; j < s; ++j) rhs[j] = t.A(i, j);
                const auto x = oracle::solve(At, rhs, s);
                for (int j = 0; j < s; ++j) X(i, j) = x[j];
            }
            const auto sv = dense_singular_values(X);
            kappa_small.push_back(sv.front() / sv.back());
        }
        // same ordering of preconditioners under both condition numbers
        std::vector<int> rank_full{0, 1, 2, 3}, rank_small{0, 1, 2, 3};
        std::sort(rank_full.begin(), rank_full.end(), [&](int a, int b) {
            return kappa_full[a] < kappa_full[b];
        });
        std::sort(rank_small.begin(), rank_small.end(), [&](int a, int b) {
            return kappa_small[a] < kappa_small[b];
        });
        CHECK(rank_full == rank_small);
    }
}
