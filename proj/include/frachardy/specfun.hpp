#pragma once

#include <optional>

namespace frachardy {

/// Dimension and fractional order together with the constants derived from them.
///
/// Construct through `FracParams::make`, which validates N >= 1, 0 < s < 1,
/// N > 2s and fills every derived field.
struct FracParams {
    int N = 0;
    double s = 0.0;
    double c_ns = 0.0;         ///< normalization C(N,s) of the singular integral
    double kappa_s = 0.0;      ///< extension constant
    double gamma_hardy = 0.0;  ///< sharp fractional Hardy constant
    /// Sobolev constant estimate; filled on demand by `rayleigh::sobolev_constant`.
    std::optional<double> sobolev_const;

    static FracParams make(int N, double s);

    /// (N - 2s) / 2, the critical homogeneity scale.
    double half_gap() const { return 0.5 * (N - 2.0 * s); }
    /// Critical Sobolev exponent 2N / (N - 2s).
    double sobolev_exponent() const { return 2.0 * N / (N - 2.0 * s); }
};

/// Euler Gamma for finite x > 0; throws DomainError otherwise.
double gamma_fn(double x);

/// log Gamma for finite x > 0.
double log_gamma(double x);

double kappa_s(double s);
double c_ns(int N, double s);
double gamma_hardy(const FracParams& params);

/// Lambda(alpha) = 2^{2s} G((N+2s+2a)/4) G((N+2s-2a)/4) / (G((N-2s+2a)/4) G((N-2s-2a)/4)),
/// defined for 0 < alpha < (N-2s)/2.
double lambda_of_alpha(const FracParams& params, double alpha);

/// Inverse of `lambda_of_alpha` on (0, gamma_H) by bisection.
double alpha_of_lambda(const FracParams& params, double lambda);

/// First angular eigenvalue mu_1(lambda) for lambda < gamma_H.
///
/// Closed form on (0, gamma_H), zero at lambda = 0 and the numerical
/// angular solver for negative masses.
double mu1_of_lambda(const FracParams& params, double lambda);

/// Local exponent -(N-2s)/2 + sqrt(((N-2s)/2)^2 + mu_1(lambda)).
double a_lambda(const FracParams& params, double lambda);

}  // namespace frachardy
