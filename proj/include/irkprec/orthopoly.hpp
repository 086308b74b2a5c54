#ifndef IRKPREC_ORTHOPOLY_HPP
#define IRKPREC_ORTHOPOLY_HPP

#include <utility>
#include <vector>

namespace irkprec {

/// Legendre polynomial P_n(x) and derivative P_n'(x) on [-1,1] via the
/// three-term recurrence. Stable for the small degrees used here.
std::pair<long double, long double> legendre(int n, long double x);

/// Nodes of the n-point Gauss-Legendre rule on [-1,1], ascending.
std::vector<long double> gauss_legendre_nodes(int n);

/// Gauss-Legendre rule mapped to [0,1]; weights sum to 1.
struct Quadrature1D {
    std::vector<double> points;
    std::vector<double> weights;
};
Quadrature1D gauss_legendre_01(int n);

/// Radau right-endpoint nodes on (0,1]; the last node is exactly 1.
/// These are the roots of P_s(2c-1) - P_{s-1}(2c-1).
std::vector<long double> radau_right_nodes(int s);

/// Lobatto nodes on [0,1]; first node exactly 0, last exactly 1, the
/// interior ones are roots of P_{s-1}'(2c-1).
std::vector<long double> lobatto_nodes(int s);

} // namespace irkprec

#endif
