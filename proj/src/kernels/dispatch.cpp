#include <atomic>
#include <cstdlib>
#include <cstring>

#include "frachardy/kernels.hpp"

namespace frachardy::kernels {

namespace {

struct Table {
    void (*scale_complex)(std::span<double>, std::span<const double>);
    double (*weighted_complex_energy)(std::span<const double>, std::span<const double>);
    void (*multiply)(std::span<const double>, std::span<const double>, std::span<double>);
    double (*dot)(std::span<const double>, std::span<const double>);
    void (*axpy)(double, std::span<const double>, std::span<double>);
    double (*weighted_sq_sum)(std::span<const double>, std::span<const double>);
    void (*scale)(std::span<double>, double);
};

constexpr Table kScalar{scalar::scale_complex, scalar::weighted_complex_energy, scalar::multiply,
                        scalar::dot,           scalar::axpy,
                        scalar::weighted_sq_sum, scalar::scale};

#ifdef FRACHARDY_HAVE_AVX2_KERNELS
constexpr Table kAvx2{avx2::scale_complex, avx2::weighted_complex_energy, avx2::multiply,
                      avx2::dot,           avx2::axpy,
                      avx2::weighted_sq_sum, avx2::scale};
#endif

Backend detect() {
    if (const char* env = std::getenv("FRAC_HARDY_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
    }
    return avx2_available() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<int>& current() {
    static std::atomic<int> backend{static_cast<int>(detect())};
    return backend;
}

const Table& table() {
#ifdef FRACHARDY_HAVE_AVX2_KERNELS
    if (current().load(std::memory_order_relaxed) == static_cast<int>(Backend::Avx2)) return kAvx2;
#endif
    return kScalar;
}

}  // namespace

bool avx2_available() {
#ifdef FRACHARDY_HAVE_AVX2_KERNELS
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend active_backend() { return static_cast<Backend>(current().load()); }

void force_backend(Backend backend) {
    if (backend == Backend::Avx2 && !avx2_available()) backend = Backend::Scalar;
    current().store(static_cast<int>(backend));
}

std::string_view backend_name(Backend backend) {
    return backend == Backend::Avx2 ? "avx2" : "scalar";
}

void scale_complex(std::span<double> data, std::span<const double> mult) {
    table().scale_complex(data, mult);
}
double weighted_complex_energy(std::span<const double> w, std::span<const double> data) {
    return table().weighted_complex_energy(w, data);
}
void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    table().multiply(a, b, out);
}
double dot(std::span<const double> a, std::span<const double> b) { return table().dot(a, b); }
void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    table().axpy(alpha, x, y);
}
double weighted_sq_sum(std::span<const double> w, std::span<const double> x) {
    return table().weighted_sq_sum(w, x);
}
void scale(std::span<double> x, double alpha) { table().scale(x, alpha); }

}  // namespace frachardy::kernels
