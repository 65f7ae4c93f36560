#pragma once

#include <array>
#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "frachardy/specfun.hpp"

namespace frachardy {

/// A point of R^N stored in three slots; coordinates beyond N are zero.
using Point = std::array<double, 3>;

inline constexpr int kMaxDim = 3;
inline constexpr double kFullRadius = std::numeric_limits<double>::infinity();

double norm(const Point& x);
double distance(const Point& x, const Point& y);
Point operator+(const Point& a, const Point& b);
Point operator-(const Point& a, const Point& b);
Point operator*(double k, const Point& a);

/// Singular term lambda chi_{B'(a, r)}(x) / |x - a|^{2s}; r = infinity is the untruncated pole.
struct Pole {
    Point a{};
    double lambda = 0.0;
    double r = kFullRadius;
};

struct GaussianBump {
    Point center{};
    double amplitude = 0.0;
    double width = 1.0;
};

/// Samples on a regular lattice, multilinear in between and zero outside.
struct SampledGrid {
    int dim = 1;
    std::array<int, kMaxDim> n{1, 1, 1};
    Point origin{};  ///< coordinates of sample (0, ..., 0)
    double spacing = 1.0;
    std::vector<double> values;  ///< row-major, last axis fastest

    double operator()(const Point& x) const;
};

/// Remainder piece known only through exact pointwise evaluation; produced by
/// Kelvin inversion, translation of derived pieces and disjointness normalization.
struct DerivedTerm {
    std::function<double(const Point&)> f;
    std::string label;
};

using RemainderTerm = std::variant<GaussianBump, SampledGrid, DerivedTerm>;

struct Remainder {
    std::vector<RemainderTerm> terms;

    enum class Kind { Zero, GaussianBumps, UserGrid, Composite };
    Kind kind() const;
    double operator()(const Point& x) const;
};

std::string to_string(Remainder::Kind kind);

/// A member of the class Theta:
///
///   V(x) = sum_i lambda_i chi_{B'(a_i,r_i)}(x) / |x - a_i|^{2s}
///        + lambda_inf chi_{R^N \ B'(c,R)}(x) / |x - c|^{2s} + W(x).
///
/// With `smooth` the indicators are replaced by zeta((x - a_i)/r_i) and
/// zeta~((x - c)/R). The exterior centre c is the origin unless the potential
/// was translated. R = 0 makes the exterior term a full pole at c.
struct ThetaPotential {
    FracParams params;
    std::vector<Pole> poles;
    double lambda_inf = 0.0;
    double r_inf = 1.0;
    Point center_inf{};
    Remainder remainder;
    bool smooth = false;
    /// Set when some piece could not be kept in structured form (see `kelvin`).
    bool structural_fallback = false;

    int dim() const { return params.N; }

    /// Validated construction; overlapping singular regions are shrunk and the
    /// difference moved into the remainder. Throws StructuralError for
    /// coincident pole centres or non-positive radii.
    static ThetaPotential make(const FracParams& params, std::vector<Pole> poles,
                               double lambda_inf = 0.0, double r_inf = 1.0,
                               Remainder remainder = {}, bool smooth = false);

    static ThetaPotential zero(const FracParams& params);
    /// lambda / |x - a|^{2s} on all of R^N.
    static ThetaPotential full_pole(const FracParams& params, double lambda, Point a = {});
};

/// Plateau cutoff: 1 on [0, 1/2], 0 on [1, inf), C-infinity in between.
double zeta(double q);
/// Exterior cutoff zeta~(q) = zeta(1/q): 0 on [0, 1], 1 on [2, inf).
double zeta_tilde(double q);

/// Pointwise value; throws DomainError at a pole centre.
double evaluate(const ThetaPotential& v, const Point& x);

/// Mean of V over the axis-aligned cube of side `width` centred at `center`.
///
/// Singular terms whose centre is within 3 widths are integrated through the
/// flux identity  int_cell g(|x-a|) dx = sum_faces int_F H(|y-a|) n.(y-a) / |y-a|^N dA
/// with H(rho) = int_0^rho g(t) t^{N-1} dt, which is closed form for sharp
/// cutoffs; everything else is sampled at the centre.
double cell_average(const ThetaPotential& v, const Point& center, double width);

/// Mean of |x - c|^{exponent} (exponent > -N) over the cube of side `width` centred at `center`.
double radial_power_cell_average(int N, double exponent, const Point& c, const Point& center,
                                 double width);

ThetaPotential translate(const ThetaPotential& v, const Point& y);

/// Structured image of V_K(x) = |x|^{-4s} V(x / |x|^2).
ThetaPotential kelvin(const ThetaPotential& v);

/// Sum of two potentials; throws StructuralError on coincident pole centres.
ThetaPotential add(const ThetaPotential& v1, const ThetaPotential& v2);

struct ThetaReport {
    bool valid = true;
    std::vector<std::string> violations;
    std::vector<std::string> notes;
    double sum_positive = 0.0;  ///< sum of lambda_i^+
    double sum_masses = 0.0;    ///< sum of lambda_i
    /// sum lambda_i^+ < gamma_H: positivity for every configuration.
    bool all_configurations_positive = false;
    /// lambda_i < gamma_H and sum lambda_i < gamma_H: some configuration is positive.
    bool some_configuration_positive = false;
};

ThetaReport validate_theta(const ThetaPotential& v, const FracParams& params);

}  // namespace frachardy
