#include "frachardy/kernels.hpp"

namespace frachardy::kernels::scalar {

void scale_complex(std::span<double> data, std::span<const double> mult) {
    for (std::size_t k = 0; k < mult.size(); ++k) {
        data[2 * k] *= mult[k];
        data[2 * k + 1] *= mult[k];
    }
}

double weighted_complex_energy(std::span<const double> w, std::span<const double> data) {
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double re = data[2 * k], im = data[2 * k + 1];
        acc += w[k] * (re * re + im * im);
    }
    return acc;
}

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double weighted_sq_sum(std::span<const double> w, std::span<const double> x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * x[i] * x[i];
    return acc;
}

void scale(std::span<double> x, double alpha) {
    for (double& v : x) v *= alpha;
}

}  // namespace frachardy::kernels::scalar
