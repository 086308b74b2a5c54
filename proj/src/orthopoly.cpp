#include "irkprec/orthopoly.hpp"

#include <cmath>
#include <functional>

#include "irkprec/common.hpp"

namespace irkprec {

std::pair<long double, long double> legendre(int n, long double x) {
    if (n == 0) return {1.0L, 0.0L};
    long double p0 = 1.0L, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    const long double dp = n * (x * p1 - p0) / (x * x - 1.0L);
    return {p1, dp};
}

namespace {

// Finds all roots of f in (-1,1) by sign-change bracketing on a fine grid
// followed by bisection and a Newton polish. The polynomials here have
// well separated simple roots, so a 4096-cell scan cannot miss any.
std::vector<long double> bracketed_roots(
    const std::function<long double(long double)>& f,
    const std::function<long double(long double)>& df, int expected) {
    constexpr int kCells = 4096;
    std::vector<long double> roots;
    auto push = [&roots](long double x) {
        if (roots.empty() || x - roots.back() > 1e-9L) roots.push_back(x);
    };
    long double a = -1.0L + 1e-12L;
    long double fa = f(a);
    for (int c = 1; c <= kCells; ++c) {
        const long double b = -1.0L + 2.0L * c / kCells - (c == kCells ? 1e-12L : 0.0L);
        long double fb = f(b);
        if (fa == 0.0L) push(a);
        if (fa != 0.0L && fb != 0.0L && (fa < 0.0L) != (fb < 0.0L)) {
            long double lo = a, hi = b, flo = fa;
            for (int it = 0; it < 80; ++it) {
                const long double mid = 0.5L * (lo + hi);
                const long double fm = f(mid);
                if ((flo < 0.0L) == (fm < 0.0L)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            long double x = 0.5L * (lo + hi);
            for (int it = 0; it < 4; ++it) {
                const long double d = df(x);
                if (d == 0.0L) break;
                x -= f(x) / d;
            }
            push(x);
        }
        a = b;
        fa = fb;
    }
    if (static_cast<int>(roots.size()) != expected)
        throw NumericalError("root bracketing found " +
                             std::to_string(roots.size()) + " roots, expected " +
                             std::to_string(expected));
    return roots;
}

} // namespace

std::vector<long double> gauss_legendre_nodes(int n) {
    require(n >= 1, "gauss_legendre_nodes: n >= 1");
    if (n == 1) return {0.0L};
    return bracketed_roots([n](long double x) { return legendre(n, x).first; },
                           [n](long double x) { return legendre(n, x).second; },
                           n);
}

Quadrature1D gauss_legendre_01(int n) {
    const auto nodes = gauss_legendre_nodes(n);
    Quadrature1D q;
    q.points.reserve(n);
    q.weights.reserve(n);
    for (long double x : nodes) {
        const auto [p, dp] = legendre(n, x);
        (void)p;
        const long double w = 2.0L / ((1.0L - x * x) * dp * dp);
        q.points.push_back(static_cast<double>(0.5L * (x + 1.0L)));
        q.weights.push_back(static_cast<double>(0.5L * w));
    }
    return q;
}

std::vector<long double> radau_right_nodes(int s) {
    require(s >= 1, "radau_right_nodes: s >= 1");
    std::vector<long double> nodes;
    if (s > 1) {
        auto f = [s](long double x) {
            return legendre(s, x).first - legendre(s - 1, x).first;
        };
        auto df = [s](long double x) {
            return legendre(s, x).second - legendre(s - 1, x).second;
        };
        // x = 1 is always a root; the remaining s-1 roots lie in (-1,1).
        nodes = bracketed_roots(f, df, s - 1);
    }
    std::vector<long double> c;
    c.reserve(s);
    for (long double x : nodes) c.push_back(0.5L * (x + 1.0L));
    c.push_back(1.0L);
    return c;
}

std::vector<long double> lobatto_nodes(int s) {
    require(s >= 2, "lobatto_nodes: s >= 2");
    std::vector<long double> interior;
    if (s > 2) {
        auto f = [s](long double x) { return legendre(s - 1, x).second; };
        auto df = [s](long double x) {
            // (1-x^2) P'' = 2x P' - n(n+1) P for Legendre
            const auto [p, dp] = legendre(s - 1, x);
            return (2.0L * x * dp - static_cast<long double>(s - 1) * s * p) /
                   (1.0L - x * x);
        };
        interior = bracketed_roots(f, df, s - 2);
    }
    std::vector<long double> c;
    c.reserve(s);
    c.push_back(0.0L);
    for (long double x : interior) c.push_back(0.5L * (x + 1.0L));
    c.push_back(1.0L);
    return c;
}

} // namespace irkprec
