#pragma once

#include <vector>

#include "frachardy/specfun.hpp"

/// Weighted eigenvalue problem on the upper half-sphere with a Robin mass on
/// the equator, reduced to the axisymmetric Sturm-Liouville form
///
///   -(w f')' = mu w f  on (0, pi/2),   w(phi) = sin^{N-1}(phi) cos^{1-2s}(phi),
///   lim cos^{1-2s}(phi) f'(phi) = kappa_s lambda f(pi/2),
///
/// where phi is the polar angle from the t axis. Discretized with P1 elements
/// on a mesh graded toward the equator; the Robin term enters the bilinear
/// form directly, so the degenerate weight is never divided by.
namespace frachardy::angular {

struct AngularGrid {
    FracParams params;
    int m = 0;               ///< interior nodes
    double grading = 1.5;
    std::vector<double> phi; ///< m + 2 nodes, phi[0] = 0, phi[m+1] = pi/2

    static AngularGrid make(const FracParams& params, int m, double grading = 1.5);

    double weight(double phi_value) const;
};

/// Symmetric tridiagonal pencil (K, M); K already contains the Robin term.
struct Pencil {
    std::vector<double> k_diag, k_off;
    std::vector<double> m_diag, m_off;

    std::size_t size() const { return k_diag.size(); }
    double m_inner(const std::vector<double>& x, const std::vector<double>& y) const;
};

Pencil assemble(double lambda, const AngularGrid& grid);

struct AngularEigenResult {
    double lambda = 0.0;
    std::vector<double> mu_values;             ///< ascending
    std::vector<std::vector<double>> vectors;  ///< nodal eigenfunctions, M-orthonormal
    std::vector<double> psi1;                  ///< first eigenfunction, positive
    double equator_value = 0.0;                ///< psi1 at phi = pi/2
};

/// The k smallest eigenvalues for boundary mass lambda < gamma_H.
///
/// Eigenfunctions are normalized so that the full-sphere weighted L2 norm is
/// one (the reduced integral carries the |S^{N-1}| factor).
AngularEigenResult mu_k(double lambda, int k, const AngularGrid& grid);

struct Psi1Report {
    bool positive = false;       ///< psi1 > 0 at every node
    bool simple = false;         ///< mu_2 - mu_1 > 0 (needs k >= 2)
    double gap = 0.0;
    double equator_value = 0.0;
    double min_value = 0.0;
};

Psi1Report psi1_properties(const AngularEigenResult& result);

}  // namespace frachardy::angular
