#pragma once

#include <string>
#include <vector>

#include "frachardy/grid.hpp"
#include "frachardy/potential.hpp"
#include "frachardy/rayleigh.hpp"

/// Caffarelli-Silvestre extension on the strip (0, t_max] x box, computed mode by
/// mode in x. In t every mode uses P1 elements with the weight t^{1-2s}
/// integrated exactly on the first element, so the discrete energy is the exact
/// Dirichlet integral of the (t-piecewise-linear, x-trigonometric) field.
namespace frachardy::extension {

struct TGrid {
    double t_max = 0.0;
    int m_t = 0;
    double grading = 1.0;  ///< t_j = t_max (j / m_t)^grading
    double s = 0.5;
    std::vector<double> t;  ///< m_t + 1 nodes, t[0] = 0

    /// Default grading clamp(1.5 / s, 2, 8). Mode profiles behave like 1 - c t^{2s}
    /// near t = 0, and this keeps the P1 energy error second order in 1 / m_t.
    static TGrid make(double t_max, int m_t, double s, double grading = 0.0);
};

/// Tridiagonal stiffness and mass matrices in t (all m_t + 1 nodes).
struct TMatrices {
    std::vector<double> k_diag, k_off, m_diag, m_off;
};
TMatrices t_matrices(const TGrid& tg);

struct ModeProfile {
    std::vector<double> values;  ///< U(t_j) / U(0), zero at t_max
    double energy = 0.0;         ///< int t^{1-2s} (U'^2 + xi^2 U^2) for unit trace
};

/// Minimizer of the weighted energy of a single mode |xi| with unit trace.
ModeProfile solve_mode_profile(double xi, const TGrid& tg);

struct ExtensionField {
    SpectralGrid xgrid;
    TGrid tgrid;
    std::vector<double> values;  ///< row j (t_j) is values[j * size .. (j+1) * size)
    std::vector<std::string> warnings;

    std::size_t rows() const { return tgrid.t.size(); }
    std::span<const double> row(std::size_t j) const;
    std::span<double> row(std::size_t j);
    DiscreteField trace() const;
};

/// Harmonic-type extension of u with Dirichlet data at t_max. A nonzero mean is
/// extended as a constant, which is what decay at infinity gives in the limit.
ExtensionField extend(const DiscreteField& u, const TGrid& tg);

/// int t^{1-2s} |grad U|^2, exact for the discrete field.
double energy(const ExtensionField& u);

/// Minimal extension energy per unit |u^_k|^2 for every stored coefficient.
std::vector<double> extension_multiplier(const SpectralGrid& grid, const TGrid& tg);

/// mu computed from the extended quotient (energy - kappa_s int V Tr^2) / energy.
rayleigh::MuResult mu_extended(const ThetaPotential& v, const SpectralGrid& xgrid, const TGrid& tg,
                               const rayleigh::MuOptions& opts = {});

struct Certificate {
    ExtensionField phi;
    double epsilon = 0.0;
    std::vector<double> v;        ///< cell averages of V on the trace grid
    std::vector<double> v_tilde;  ///< V <= v_tilde <= |V|
    std::vector<Point> pole_centers;
};

struct CertificateVerdict {
    bool pass = false;
    double epsilon = 0.0;
    double bound = 0.0;  ///< epsilon / (1 + epsilon)
    double worst_margin = 0.0;
    int worst_t = -1, worst_x = -1;  ///< coarse test function indices
    std::size_t tests = 0;
    double slack = 0.0;
};

/// Tests the weak supersolution inequality against nonnegative tensor hats with
/// `basis` hats per axis (t and each x axis). The last t row is excluded because
/// test functions vanish at t_max. Throws PreconditionError if phi is not
/// positive away from the pole columns or v_tilde is out of range.
CertificateVerdict certificate_check(const Certificate& cert, int basis);

/// Largest epsilon for which `certificate_check` passes (closed form, since every
/// test value is affine in epsilon); negative if even epsilon = 0 fails.
double certificate_max_epsilon(const Certificate& cert, int basis);

/// Extension of |x|^{-(N-2s)/2 + alpha} (pole cell replaced by its cell average).
ExtensionField build_upsilon(double alpha, const SpectralGrid& xgrid, const TGrid& tg);

/// Discrete weighted Neumann flux -t^{1-2s} d_t U at t = 0 per trace node.
std::vector<double> neumann_flux(const ExtensionField& u);

}  // namespace frachardy::extension
