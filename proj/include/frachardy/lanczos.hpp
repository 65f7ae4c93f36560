#pragma once

#include <functional>
#include <span>
#include <vector>

namespace frachardy::lanczos {

using Operator = std::function<void(std::span<const double> x, std::span<double> y)>;

struct Options {
    double tol = 1e-8;      ///< relative residual |T x - theta x| / max|theta|
    int max_matvecs = 500;
    int basis_size = 48;
    int keep = 12;          ///< Ritz vectors retained at a restart
};

struct Result {
    double value = 0.0;        ///< algebraically largest eigenvalue
    std::vector<double> vector;
    int matvecs = 0;
    double residual = 0.0;     ///< relative residual of the returned pair
};

/// Largest eigenvalue of a symmetric operator by Krylov-Schur (thick restart
/// Lanczos) with full reorthogonalization. `start` seeds the Krylov space and
/// fixes the invariant subspace searched (e.g. mean-zero fields).
/// Throws ConvergenceError when the cap is hit.
Result largest(const Operator& op, std::vector<double> start, const Options& opts = {});

}  // namespace frachardy::lanczos
