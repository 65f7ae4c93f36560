#include "frachardy/potential.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "frachardy/error.hpp"

namespace frachardy {

double norm(const Point& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

double distance(const Point& x, const Point& y) { return norm(x - y); }

Point operator+(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Point operator-(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Point operator*(double k, const Point& a) { return {k * a[0], k * a[1], k * a[2]}; }

namespace {

double smooth_step_f(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

bool is_origin(const Point& a) { return a[0] == 0.0 && a[1] == 0.0 && a[2] == 0.0; }

template <class F>
double adaptive(F f, double a, double b, double tol = 1e-11, unsigned depth = 15) {
    if (!(b > a)) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, depth, tol);
}

/// One radially symmetric singular term: a (possibly truncated) pole, or an
/// exterior tail lambda |x-c|^{-2s} outside B'(c, radius).
struct RadialTerm {
    Point c{};
    double lambda = 0.0;
    double radius = kFullRadius;
    bool exterior = false;
};

struct Shape {
    int N;
    double s;
    bool smooth;
};

double profile(const RadialTerm& t, const Shape& sh, double d) {
    // Cutoff factor only; the |x - c|^{-2s} part is applied by the caller.
    if (t.exterior) {
        if (t.radius == 0.0) return 1.0;
        if (sh.smooth) return zeta_tilde(d / t.radius);
        return d >= t.radius ? 1.0 : 0.0;
    }
    if (std::isinf(t.radius)) return 1.0;
    if (sh.smooth) return zeta(d / t.radius);
    return d < t.radius ? 1.0 : 0.0;
}

double term_value(const RadialTerm& t, const Shape& sh, const Point& x) {
    if (t.lambda == 0.0) return 0.0;
    const double d = distance(x, t.c);
    const double cut = profile(t, sh, d);
    if (cut == 0.0) return 0.0;
    if (d == 0.0) throw DomainError("potential evaluated at a pole centre");
    return t.lambda * cut * std::pow(d, -2.0 * sh.s);
}

/// H(rho) = int_0^rho g(t) t^{N-1} dt for g(t) = lambda * cutoff(t) * t^{-2s}.
class RadialPrimitive {
public:
    RadialPrimitive(const RadialTerm& t, const Shape& sh) : t_(t), sh_(sh), q_(sh.N - 2.0 * sh.s) {
        if (sh.smooth && t.radius > 0.0 && !std::isinf(t.radius)) {
            if (t.exterior) {
                band_ = adaptive(
                    [&](double r) { return zeta_tilde(r / t.radius) * std::pow(r, q_ - 1.0); },
                    t.radius, 2.0 * t.radius, 1e-13);
            } else {
                band_ = adaptive(
                    [&](double r) { return zeta(r / t.radius) * std::pow(r, q_ - 1.0); },
                    0.5 * t.radius, t.radius, 1e-13);
            }
        }
    }

    double operator()(double rho) const { return t_.lambda * unit(rho); }

    /// Radii where H is not smooth; used as quadrature breakpoints.
    std::vector<double> kinks() const {
        if (std::isinf(t_.radius) || t_.radius == 0.0) return {};
        if (!sh_.smooth) return {t_.radius};
        return t_.exterior ? std::vector<double>{t_.radius, 2.0 * t_.radius}
                           : std::vector<double>{0.5 * t_.radius, t_.radius};
    }

private:
    double G(double rho) const { return std::pow(rho, q_) / q_; }

    double unit(double rho) const {
        const double R = t_.radius;
        if (!t_.exterior) {
            if (std::isinf(R)) return G(rho);
            if (!sh_.smooth) return G(std::min(rho, R));
            if (rho <= 0.5 * R) return G(rho);
            if (rho >= R) return G(0.5 * R) + band_;
            return G(0.5 * R) + adaptive(
                                    [&](double r) { return zeta(r / R) * std::pow(r, q_ - 1.0); },
                                    0.5 * R, rho, 1e-13);
        }
        if (R == 0.0) return G(rho);
        if (rho <= R) return 0.0;
        if (!sh_.smooth) return G(rho) - G(R);
        if (rho >= 2.0 * R) return band_ + G(rho) - G(2.0 * R);
        return adaptive([&](double r) { return zeta_tilde(r / R) * std::pow(r, q_ - 1.0); }, R,
                        rho, 1e-13);
    }

    RadialTerm t_;
    Shape sh_;
    double q_;
    double band_ = 0.0;
};

/// Integrates f over [lo, hi] split at the given breakpoints.
template <class F>
double split_integral(F f, double lo, double hi, std::vector<double> cuts, double tol,
                      unsigned depth = 15) {
    cuts.push_back(lo);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    double prev = lo;
    for (double c : cuts) {
        if (c <= prev) continue;
        if (c > hi) c = hi;
        acc += adaptive(f, prev, c, tol, depth);
        prev = c;
        if (prev >= hi) break;
    }
    return acc;
}

/// Integral of a radial term over the cube [center - w/2, center + w/2]^N by the flux identity.
double cube_integral(const RadialTerm& t, const Shape& sh, const Point& center, double w) {
    const RadialPrimitive H(t, sh);
    const auto kinks = H.kinks();
    const int N = sh.N;
    double total = 0.0;
    for (int k = 0; k < N; ++k) {
        for (int sign : {-1, 1}) {
            const double d = sign * (center[k] + sign * 0.5 * w - t.c[k]);
            if (d == 0.0) continue;
            const double d2 = d * d;
            if (N == 1) {
                total += (d > 0 ? 1.0 : -1.0) * H(std::abs(d));
                continue;
            }
            const int j = (k + 1) % N;
            const double lo_j = center[j] - 0.5 * w - t.c[j];
            const double hi_j = center[j] + 0.5 * w - t.c[j];
            auto cuts_for = [&](double base2) {
                std::vector<double> c{0.0};
                for (double r : kinks) {
                    if (r * r > base2) {
                        const double u = std::sqrt(r * r - base2);
                        c.push_back(u);
                        c.push_back(-u);
                    }
                }
                return c;
            };
            if (N == 2) {
                auto f = [&](double u) {
                    const double rho2 = d2 + u * u;
                    return d * H(std::sqrt(rho2)) / rho2;
                };
                total += split_integral(f, lo_j, hi_j, cuts_for(d2), 1e-11);
                continue;
            }
            const int l = (k + 2) % N;
            const double lo_l = center[l] - 0.5 * w - t.c[l];
            const double hi_l = center[l] + 0.5 * w - t.c[l];
            auto inner = [&](double u) {
                const double base2 = d2 + u * u;
                auto f = [&](double v) {
                    const double rho2 = base2 + v * v;
                    return d * H(std::sqrt(rho2)) / (rho2 * std::sqrt(rho2));
                };
                return split_integral(f, lo_l, hi_l, cuts_for(base2), 1e-11, 10);
            };
            total += split_integral(inner, lo_j, hi_j, cuts_for(d2), 1e-9, 8);
        }
    }
    return total;
}

std::vector<RadialTerm> radial_terms(const ThetaPotential& v) {
    std::vector<RadialTerm> out;
    out.reserve(v.poles.size() + 1);
    for (const auto& p : v.poles) out.push_back({p.a, p.lambda, p.r, false});
    if (v.lambda_inf != 0.0) out.push_back({v.center_inf, v.lambda_inf, v.r_inf, true});
    return out;
}

Shape shape_of(const ThetaPotential& v) { return {v.params.N, v.params.s, v.smooth}; }

double structured_value(const std::vector<RadialTerm>& terms, const Shape& sh, const Point& x) {
    double acc = 0.0;
    for (const auto& t : terms) acc += term_value(t, sh, x);
    return acc;
}

double sampled_grid_value(const SampledGrid& g, const Point& x) {
    std::array<int, kMaxDim> i0{};
    std::array<double, kMaxDim> frac{};
    for (int k = 0; k < g.dim; ++k) {
        const double q = (x[k] - g.origin[k]) / g.spacing;
        if (!(q >= 0.0) || q > g.n[k] - 1) return 0.0;
        int i = static_cast<int>(std::floor(q));
        if (i >= g.n[k] - 1) i = std::max(0, g.n[k] - 2);
        i0[k] = i;
        frac[k] = g.n[k] > 1 ? q - i : 0.0;
    }
    double acc = 0.0;
    const int corners = 1 << g.dim;
    for (int c = 0; c < corners; ++c) {
        double weight = 1.0;
        std::size_t idx = 0;
        for (int k = 0; k < g.dim; ++k) {
            const int bit = (c >> k) & 1;
            weight *= bit ? frac[k] : 1.0 - frac[k];
            const int ik = std::min(i0[k] + bit, g.n[k] - 1);
            idx = idx * static_cast<std::size_t>(g.n[k]) + static_cast<std::size_t>(ik);
        }
        if (weight != 0.0) acc += weight * g.values[idx];
    }
    return acc;
}

// Shrinks overlapping singular regions and moves the removed pieces into the remainder.
void normalize(ThetaPotential& v) {
    const auto before = radial_terms(v);
    bool changed = false;
    for (std::size_t i = 0; i < v.poles.size(); ++i) {
        for (std::size_t j = i + 1; j < v.poles.size(); ++j) {
            auto& p = v.poles[i];
            auto& q = v.poles[j];
            if (std::isinf(p.r) || std::isinf(q.r)) continue;
            const double d = distance(p.a, q.a);
            if (p.r + q.r > d) {
                const double f = d / (p.r + q.r);
                p.r *= f;
                q.r *= f;
                changed = true;
            }
        }
    }
    if (v.lambda_inf != 0.0 && v.r_inf > 0.0) {
        for (const auto& p : v.poles) {
            if (std::isinf(p.r)) continue;
            const double d = distance(p.a, v.center_inf);
            if (d >= v.r_inf) {
                v.r_inf = d + p.r;
                changed = true;
            }
        }
        for (auto& p : v.poles) {
            if (std::isinf(p.r)) continue;
            const double d = distance(p.a, v.center_inf);
            if (d + p.r > v.r_inf) {
                p.r = v.r_inf - d;
                changed = true;
            }
        }
    }
    if (!changed) return;
    const auto after = radial_terms(v);
    const Shape sh = shape_of(v);
    v.remainder.terms.push_back(DerivedTerm{
        [before, after, sh](const Point& x) {
            // Term by term: the singular factors cancel, so pole centres are fine.
            double acc = 0.0;
            for (std::size_t k = 0; k < before.size(); ++k) {
                const double d = distance(x, before[k].c);
                const double dc = profile(before[k], sh, d) - profile(after[k], sh, d);
                if (dc != 0.0) acc += before[k].lambda * dc * std::pow(d, -2.0 * sh.s);
            }
            return acc;
        },
        "normalization"});
}

void check_structure(const ThetaPotential& v) {
    for (std::size_t i = 0; i < v.poles.size(); ++i) {
        const auto& p = v.poles[i];
        if (!(p.r > 0.0)) throw StructuralError(fmt::format("pole {} has non-positive radius", i));
        for (std::size_t j = 0; j < i; ++j) {
            if (p.a == v.poles[j].a) {
                throw StructuralError(fmt::format("poles {} and {} have the same centre", j, i));
            }
        }
        for (int k = v.dim(); k < kMaxDim; ++k) {
            if (p.a[k] != 0.0) throw StructuralError("pole centre has more coordinates than N");
        }
    }
    if (!(v.r_inf >= 0.0) || std::isinf(v.r_inf)) {
        throw StructuralError("exterior radius must be finite and non-negative");
    }
}

}  // namespace

double zeta(double q) {
    if (q <= 0.5) return 1.0;
    if (q >= 1.0) return 0.0;
    const double t = 2.0 * q - 1.0;
    const double a = smooth_step_f(1.0 - t), b = smooth_step_f(t);
    return a / (a + b);
}

double zeta_tilde(double q) {
    if (q <= 1.0) return 0.0;
    return zeta(1.0 / q);
}

double SampledGrid::operator()(const Point& x) const { return sampled_grid_value(*this, x); }

Remainder::Kind Remainder::kind() const {
    if (terms.empty()) return Kind::Zero;
    bool bumps = true, grids = true;
    for (const auto& t : terms) {
        bumps = bumps && std::holds_alternative<GaussianBump>(t);
        grids = grids && std::holds_alternative<SampledGrid>(t);
    }
    if (bumps) return Kind::GaussianBumps;
    if (grids) return Kind::UserGrid;
    return Kind::Composite;
}

double Remainder::operator()(const Point& x) const {
    double acc = 0.0;
    for (const auto& term : terms) {
        if (const auto* b = std::get_if<GaussianBump>(&term)) {
            const double d = distance(x, b->center);
            acc += b->amplitude * std::exp(-0.5 * d * d / (b->width * b->width));
        } else if (const auto* g = std::get_if<SampledGrid>(&term)) {
            acc += (*g)(x);
        } else {
            acc += std::get<DerivedTerm>(term).f(x);
        }
    }
    return acc;
}

std::string to_string(Remainder::Kind kind) {
    switch (kind) {
        case Remainder::Kind::Zero: return "zero";
        case Remainder::Kind::GaussianBumps: return "gaussian-bumps";
        case Remainder::Kind::UserGrid: return "user-grid";
        case Remainder::Kind::Composite: return "composite";
    }
    return "unknown";
}

ThetaPotential ThetaPotential::make(const FracParams& params, std::vector<Pole> poles,
                                    double lambda_inf, double r_inf, Remainder remainder,
                                    bool smooth) {
    ThetaPotential v;
    v.params = params;
    v.poles = std::move(poles);
    v.lambda_inf = lambda_inf;
    v.r_inf = r_inf;
    v.remainder = std::move(remainder);
    v.smooth = smooth;
    check_structure(v);
    normalize(v);
    return v;
}

ThetaPotential ThetaPotential::zero(const FracParams& params) { return make(params, {}); }

ThetaPotential ThetaPotential::full_pole(const FracParams& params, double lambda, Point a) {
    return make(params, {Pole{a, lambda, kFullRadius}});
}

double evaluate(const ThetaPotential& v, const Point& x) {
    return structured_value(radial_terms(v), shape_of(v), x) + v.remainder(x);
}

double cell_average(const ThetaPotential& v, const Point& center, double width) {
    if (!(width > 0.0)) throw DomainError("cell width must be positive");
    const Shape sh = shape_of(v);
    double near_integral = 0.0;
    double far_value = v.remainder.terms.empty() ? 0.0 : v.remainder(center);
    for (const auto& t : radial_terms(v)) {
        if (distance(center, t.c) < 3.0 * width) {
            near_integral += cube_integral(t, sh, center, width);
        } else {
            far_value += term_value(t, sh, center);
        }
    }
    return near_integral / std::pow(width, sh.N) + far_value;
}

double radial_power_cell_average(int N, double exponent, const Point& c, const Point& center,
                                 double width) {
    if (!(exponent > -N)) throw DomainError("radial power is not locally integrable");
    const Shape sh{N, -0.5 * exponent, false};
    return cube_integral(RadialTerm{c, 1.0, kFullRadius, false}, sh, center, width) /
           std::pow(width, N);
}

ThetaPotential translate(const ThetaPotential& v, const Point& y) {
    ThetaPotential out = v;
    for (auto& p : out.poles) p.a = p.a + y;
    out.center_inf = out.center_inf + y;
    for (auto& term : out.remainder.terms) {
        if (auto* b = std::get_if<GaussianBump>(&term)) {
            b->center = b->center + y;
        } else if (auto* g = std::get_if<SampledGrid>(&term)) {
            g->origin = g->origin + y;
        } else {
            auto& d = std::get<DerivedTerm>(term);
            d.f = [f = d.f, y](const Point& x) { return f(x - y); };
        }
    }
    return out;
}

ThetaPotential kelvin(const ThetaPotential& v) {
    const double s = v.params.s;
    const Shape sh = shape_of(v);
    auto invert = [](const Point& x) { return (1.0 / (x[0] * x[0] + x[1] * x[1] + x[2] * x[2])) * x; };

    ThetaPotential out;
    out.params = v.params;
    out.smooth = v.smooth;
    out.structural_fallback = v.structural_fallback;
    out.r_inf = 1.0;

    std::vector<RadialTerm> hidden;  // pieces kept only as exact pointwise images

    auto image_minus = [&](const RadialTerm& src, const RadialTerm& replacement, std::string label) {
        out.remainder.terms.push_back(DerivedTerm{
            [src, replacement, sh, invert, s](const Point& x) {
                const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                double image = 0.0;
                if (r2 > 0.0) image = std::pow(r2, -2.0 * s) * term_value(src, sh, invert(x));
                return image - term_value(replacement, sh, x);
            },
            std::move(label)});
    };

    auto add_origin_pole = [&](double lambda, double r, const RadialTerm& src) {
        for (auto& p : out.poles) {
            if (is_origin(p.a)) {
                if (p.r == r) {
                    p.lambda += lambda;
                } else {
                    hidden.push_back(src);
                }
                return;
            }
        }
        out.poles.push_back({Point{}, lambda, r});
    };

    for (const auto& p : v.poles) {
        const RadialTerm src{p.a, p.lambda, p.r, false};
        if (is_origin(p.a)) {
            if (std::isinf(p.r)) {
                add_origin_pole(p.lambda, kFullRadius, src);
            } else {
                out.lambda_inf = p.lambda;
                out.r_inf = 1.0 / p.r;
            }
            continue;
        }
        const double na = norm(p.a);
        const Point b = invert(p.a);
        double rb;
        if (!std::isinf(p.r) && na > p.r) {
            rb = p.r / (na * (na + p.r));
        } else {
            rb = 0.25 / na;
            if (std::isinf(p.r)) out.structural_fallback = true;
        }
        const RadialTerm replacement{b, p.lambda, rb, false};
        out.poles.push_back({b, p.lambda, rb});
        image_minus(src, replacement, "kelvin-pole");
    }

    if (v.lambda_inf != 0.0) {
        const RadialTerm src{v.center_inf, v.lambda_inf, v.r_inf, true};
        if (is_origin(v.center_inf)) {
            add_origin_pole(v.lambda_inf, v.r_inf > 0.0 ? 1.0 / v.r_inf : kFullRadius, src);
        } else {
            const double r0 = 0.5 / (norm(v.center_inf) + 2.0 * v.r_inf);
            const RadialTerm replacement{Point{}, v.lambda_inf, r0, false};
            bool clash = false;
            for (const auto& q : out.poles) clash = clash || is_origin(q.a);
            if (clash) {
                hidden.push_back(src);
            } else {
                out.poles.push_back({Point{}, v.lambda_inf, r0});
                image_minus(src, replacement, "kelvin-exterior");
            }
        }
    }

    if (!hidden.empty()) {
        out.structural_fallback = true;
        for (const auto& h : hidden) image_minus(h, RadialTerm{}, "kelvin-fallback");
    }

    if (!v.remainder.terms.empty()) {
        out.remainder.terms.push_back(DerivedTerm{
            [w = v.remainder, invert, s](const Point& x) {
                const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                if (r2 == 0.0) return 0.0;
                return std::pow(r2, -2.0 * s) * w(invert(x));
            },
            "kelvin-remainder"});
    }
    normalize(out);
    return out;
}

ThetaPotential add(const ThetaPotential& v1, const ThetaPotential& v2) {
    if (v1.params.N != v2.params.N || v1.params.s != v2.params.s) {
        throw StructuralError("cannot add potentials with different (N, s)");
    }
    if (v1.smooth != v2.smooth) throw StructuralError("cannot mix sharp and smooth potentials");
    for (const auto& p : v1.poles) {
        for (const auto& q : v2.poles) {
            if (p.a == q.a) throw StructuralError("coincident pole centres in sum");
        }
    }
    ThetaPotential out = v1;
    out.structural_fallback = v1.structural_fallback || v2.structural_fallback;
    out.poles.insert(out.poles.end(), v2.poles.begin(), v2.poles.end());
    out.remainder.terms.insert(out.remainder.terms.end(), v2.remainder.terms.begin(),
                               v2.remainder.terms.end());
    if (v2.lambda_inf != 0.0) {
        if (v1.lambda_inf == 0.0) {
            out.lambda_inf = v2.lambda_inf;
            out.r_inf = v2.r_inf;
            out.center_inf = v2.center_inf;
        } else if (v1.r_inf == v2.r_inf && v1.center_inf == v2.center_inf) {
            out.lambda_inf += v2.lambda_inf;
        } else {
            const RadialTerm t{v2.center_inf, v2.lambda_inf, v2.r_inf, true};
            const Shape sh = shape_of(v2);
            out.remainder.terms.push_back(
                DerivedTerm{[t, sh](const Point& x) { return term_value(t, sh, x); }, "exterior"});
        }
    }
    normalize(out);
    return out;
}

ThetaReport validate_theta(const ThetaPotential& v, const FracParams& params) {
    ThetaReport rep;
    const double gh = params.gamma_hardy;
    auto violate = [&](std::string msg) {
        rep.valid = false;
        rep.violations.push_back(std::move(msg));
    };
    bool masses_below = true;
    for (std::size_t i = 0; i < v.poles.size(); ++i) {
        const auto& p = v.poles[i];
        rep.sum_masses += p.lambda;
        rep.sum_positive += std::max(0.0, p.lambda);
        if (p.lambda >= gh) {
            masses_below = false;
            violate(fmt::format("pole {} mass {:.6g} >= gamma_H = {:.6g}", i, p.lambda, gh));
        }
        if (!(p.r > 0.0)) violate(fmt::format("pole {} radius must be positive", i));
        for (std::size_t j = 0; j < i; ++j) {
            const auto& q = v.poles[j];
            if (p.a == q.a) {
                violate(fmt::format("poles {} and {} coincide", j, i));
            } else if (!std::isinf(p.r) && !std::isinf(q.r) && p.r + q.r > distance(p.a, q.a)) {
                violate(fmt::format("singular regions of poles {} and {} overlap", j, i));
            }
        }
        if (std::isinf(p.r)) rep.notes.push_back(fmt::format("pole {} is untruncated", i));
        if (v.lambda_inf != 0.0 && v.r_inf > 0.0 && !std::isinf(p.r) &&
            distance(p.a, v.center_inf) + p.r > v.r_inf) {
            violate(fmt::format("pole {} overlaps the exterior region", i));
        }
    }
    if (v.lambda_inf >= gh) {
        violate(fmt::format("exterior mass {:.6g} >= gamma_H = {:.6g}", v.lambda_inf, gh));
    }
    if (v.structural_fallback) {
        rep.notes.push_back("some pieces are held as pointwise images in the remainder");
    }
    rep.all_configurations_positive = rep.sum_positive < gh;
    rep.some_configuration_positive = masses_below && rep.sum_masses < gh;
    if (!rep.all_configurations_positive) {
        rep.notes.push_back(fmt::format("sum of positive masses {:.6g} >= gamma_H", rep.sum_positive));
    }
    if (!rep.some_configuration_positive) {
        rep.notes.push_back("masses admit no positive configuration");
    }
    return rep;
}

}  // namespace frachardy
