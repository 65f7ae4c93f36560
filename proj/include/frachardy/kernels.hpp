#pragma once

#include <span>
#include <string_view>

/// Data-parallel inner loops of the spectral solvers.
///
/// Every kernel has a scalar reference version and, on x86-64, an AVX2/FMA
/// version. The dispatching entry points pick the AVX2 table at first use when
/// the CPU supports it, unless FRAC_HARDY_SIMD=scalar is set in the
/// environment or `force_backend` was called. Results of the two backends
/// agree to rounding (summation order differs for reductions).
namespace frachardy::kernels {

enum class Backend { Scalar, Avx2 };

bool avx2_available();
Backend active_backend();
void force_backend(Backend backend);
std::string_view backend_name(Backend backend);

// Complex arrays are interleaved (re, im) pairs: `data.size() == 2 * mult.size()`.

/// data[k] *= mult[k] for complex data and real multipliers.
void scale_complex(std::span<double> data, std::span<const double> mult);
/// sum_k w[k] |data[k]|^2 for complex data.
double weighted_complex_energy(std::span<const double> w, std::span<const double> data);
/// out = a * b elementwise.
void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out);
double dot(std::span<const double> a, std::span<const double> b);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
/// sum_i w[i] x[i]^2
double weighted_sq_sum(std::span<const double> w, std::span<const double> x);
void scale(std::span<double> x, double alpha);

#define FRACHARDY_KERNEL_DECLS                                                             \
    void scale_complex(std::span<double> data, std::span<const double> mult);              \
    double weighted_complex_energy(std::span<const double> w, std::span<const double> data); \
    void multiply(std::span<const double> a, std::span<const double> b,                    \
                  std::span<double> out);                                                  \
    double dot(std::span<const double> a, std::span<const double> b);                      \
    void axpy(double alpha, std::span<const double> x, std::span<double> y);               \
    double weighted_sq_sum(std::span<const double> w, std::span<const double> x);          \
    void scale(std::span<double> x, double alpha);

namespace scalar {
FRACHARDY_KERNEL_DECLS
}

#if defined(__x86_64__) || defined(_M_X64)
#define FRACHARDY_HAVE_AVX2_KERNELS 1
namespace avx2 {
FRACHARDY_KERNEL_DECLS
}
#endif

#undef FRACHARDY_KERNEL_DECLS

}  // namespace frachardy::kernels
