#pragma once

#include <span>
#include <vector>

namespace frachardy::quad {

struct Rule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1]; cached per n, thread-safe.
const Rule& gauss_legendre(int n);

/// Moments of the P1 element with weight t^p on [a, b], p > -1.
///
/// Returns the weighted length  int t^p,  and the three entries of the
/// element mass matrix  int t^p l_a^2,  int t^p l_a l_b,  int t^p l_b^2,
/// where l_a, l_b are the linear hats of the element. Exact for a = 0 and
/// Gauss-Legendre accurate to rounding otherwise.
struct WeightedElement {
    double length;
    double maa;
    double mab;
    double mbb;
};
WeightedElement power_weight_element(double a, double b, double p);

/// Solves a general tridiagonal system with partial pivoting.
/// `sub` and `sup` have size n-1; `rhs` is overwritten with the solution.
/// Throws ResolutionError on an exactly singular matrix.
void solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                       std::span<const double> sup, std::span<double> rhs);

}  // namespace frachardy::quad
