#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "frachardy/grid.hpp"
#include "frachardy/potential.hpp"

/// Fourier-multiplier discretization of the Gagliardo energy and the
/// coercivity constant
///
///   mu(V) = inf_u (||u||^2 - int V u^2) / ||u||^2
///
/// on a periodic box. The discrete value is an infimum over a subspace, so up
/// to potential-quadrature error it over-estimates the continuum value.
namespace frachardy::rayleigh {

/// sum_k |xi_k|^{2s} |u^_k|^2 with the zero mode dropped, in continuum units.
double dsnorm_sq(const DiscreteField& u);

/// h^N sum_j Vbar_j u_j^2 with precomputed cell averages.
double potential_energy(const DiscreteField& u, std::span<const double> vbar);
double potential_energy(const DiscreteField& u, const ThetaPotential& v);

double quadform(const DiscreteField& u, const ThetaPotential& v);

struct MuOptions {
    double tol = 1e-8;
    int max_matvecs = 500;
    std::uint64_t seed = 20240611;  ///< start vector of the Krylov space
};

struct MuResult {
    double mu = 1.0;
    double lambda_max = 0.0;
    DiscreteField minimizer;
    int iterations = 0;
    double residual = 0.0;
    std::string bias_note;
};

MuResult mu(const ThetaPotential& v, const SpectralGrid& grid, const MuOptions& opts = {});
MuResult mu_from_cells(std::span<const double> vbar, const SpectralGrid& grid,
                       const MuOptions& opts = {});
/// Same with `multiplier` (per stored coefficient) in place of |xi|^{2s}; the
/// zero mode is always excluded.
MuResult mu_with_multiplier(std::span<const double> vbar, const SpectralGrid& grid,
                            std::span<const double> multiplier, const MuOptions& opts = {});

struct SweepRow {
    double radius = 0.0;
    double mu = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;  ///< sorted by radius
    double mu_v1 = 0.0, mu_v2 = 0.0;
    std::vector<std::string> warnings;
};

/// mu(V1 + V2(. - rho e)) for each rho. Throws GeometryError if a translated
/// pole leaves the box interior.
SweepResult binding_sweep(const ThetaPotential& v1, const ThetaPotential& v2, const Point& direction,
                          std::vector<double> radii, const SpectralGrid& grid, int workers = 1,
                          const MuOptions& opts = {});

/// Base profile of a scaled test family, supported in the ball of radius `support`.
struct Profile {
    std::function<double(const Point&)> f;
    double support = 1.0;
    std::string name;
};

/// (|x|^2 + eta^2)^{-(N-2s)/4} minus its value at |x| = support, cut off there:
/// a truncated regularization of the Hardy extremal homogeneity.
Profile hardy_profile(const FracParams& params, double eta, double support);

struct ProbeRow {
    double rho = 0.0;
    double value = 0.0;  ///< Q(phi_rho) / ||phi_rho||^2
};

/// Rayleigh values of phi_rho(x) = rho^{-(N-2s)/2} phi((x - center)/rho).
std::vector<ProbeRow> scaled_family_probe(const ThetaPotential& v, const Profile& base,
                                          const std::vector<double>& rhos, const Point& center,
                                          const SpectralGrid& grid);

struct ConfigurationReport {
    enum class Status { Found, Impossible, Inconclusive };
    Status status = Status::Inconclusive;
    std::vector<double> masses;        ///< sorted increasingly
    std::vector<Point> positions;
    double mu = 0.0;
    std::vector<double> mu_history;   ///< mu after each placement step
    std::string reason;
    std::vector<ProbeRow> witness;    ///< for Impossible
};

std::string to_string(ConfigurationReport::Status status);

/// Inductive doubling search for pole positions with mu >= margin.
ConfigurationReport find_positive_configuration(std::vector<double> masses, const SpectralGrid& grid,
                                                std::uint64_t seed = 1, double margin = 0.02,
                                                int workers = 1, const MuOptions& opts = {});

/// Discrete Sobolev constant: minimum of ||u||^2 / ||u||_{2N/(N-2s)}^2 over the
/// extremal profiles (eps^2 + |x|^2)^{-(N-2s)/2} on the grid.
double sobolev_constant(const SpectralGrid& grid);

/// Discrete L^{N/(2s)} norm of cell-averaged values.
double lebesgue_norm(std::span<const double> values, const SpectralGrid& grid, double p);

/// Fraction of h^N sum u^2 carried by nodes within `radius` of some pole.
double mass_fraction_near_poles(const DiscreteField& u, const ThetaPotential& v, double radius);

}  // namespace frachardy::rayleigh
