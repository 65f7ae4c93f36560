// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "frachardy/kernels.hpp"

namespace frachardy::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// [m0, m0, m1, m1] from two consecutive multipliers.
inline __m256d duplicate_pairs(const double* m) {
    const __m256d two = _mm256_castpd128_pd256(_mm_loadu_pd(m));
    return _mm256_permute4x64_pd(two, 0x50);
}

}  // namespace

void scale_complex(std::span<double> data, std::span<const double> mult) {
    const std::size_t n = mult.size();
    double* d = data.data();
    const double* m = mult.data();
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const __m256d v = _mm256_loadu_pd(d + 2 * k);
        _mm256_storeu_pd(d + 2 * k, _mm256_mul_pd(v, duplicate_pairs(m + k)));
    }
    for (; k < n; ++k) {
        d[2 * k] *= m[k];
        d[2 * k + 1] *= m[k];
    }
}

double weighted_complex_energy(std::span<const double> w, std::span<const double> data) {
    const std::size_t n = w.size();
    const double* d = data.data();
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d v0 = _mm256_loadu_pd(d + 2 * k);
        const __m256d v1 = _mm256_loadu_pd(d + 2 * k + 4);
        acc0 = _mm256_fmadd_pd(_mm256_mul_pd(v0, v0), duplicate_pairs(w.data() + k), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_mul_pd(v1, v1), duplicate_pairs(w.data() + k + 2), acc1);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; k < n; ++k) acc += w[k] * (d[2 * k] * d[2 * k] + d[2 * k + 1] * d[2 * k + 1]);
    return acc;
}

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    const std::size_t n = a.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out.data() + i,
                         _mm256_mul_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i)));
    }
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

double dot(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i + 4), _mm256_loadu_pd(b.data() + i + 4),
                               acc1);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    const std::size_t n = x.size();
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vy = _mm256_loadu_pd(y.data() + i);
        _mm256_storeu_pd(y.data() + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x.data() + i), vy));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

double weighted_sq_sum(std::span<const double> w, std::span<const double> x) {
    const std::size_t n = x.size();
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x.data() + i);
        acc = _mm256_fmadd_pd(_mm256_mul_pd(vx, vx), _mm256_loadu_pd(w.data() + i), acc);
    }
    double r = hsum(acc);
    for (; i < n; ++i) r += w[i] * x[i] * x[i];
    return r;
}

void scale(std::span<double> x, double alpha) {
    const std::size_t n = x.size();
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(x.data() + i, _mm256_mul_pd(_mm256_loadu_pd(x.data() + i), va));
    }
    for (; i < n; ++i) x[i] *= alpha;
}

}  // namespace frachardy::kernels::avx2
