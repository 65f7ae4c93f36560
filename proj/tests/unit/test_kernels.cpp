#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

#include "frachardy/kernels.hpp"

using namespace frachardy;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = d(rng);
    return v;
}

}  // namespace

TEST_CASE("AVX2 kernels agree with the scalar reference") {
#ifdef FRACHARDY_HAVE_AVX2_KERNELS
    if (!kernels::avx2_available()) {
        MESSAGE("CPU without AVX2; only the scalar backend is exercised");
        return;
    }
    std::mt19937_64 rng(3);
    // Odd lengths exercise the vector tails.
    for (std::size_t n : {1u, 3u, 4u, 7u, 17u, 1000u, 4099u}) {
        const auto a = random_vector(n, rng), b = random_vector(n, rng);
        const auto c = random_vector(2 * n, rng);

        CHECK(kernels::avx2::dot(a, b) == doctest::Approx(kernels::scalar::dot(a, b)).epsilon(1e-13));
        CHECK(kernels::avx2::weighted_sq_sum(a, b) ==
              doctest::Approx(kernels::scalar::weighted_sq_sum(a, b)).epsilon(1e-13));
        CHECK(kernels::avx2::weighted_complex_energy(a, c) ==
              doctest::Approx(kernels::scalar::weighted_complex_energy(a, c)).epsilon(1e-13));

        std::vector<double> y1(n), y2(n);
        kernels::avx2::multiply(a, b, y1);
        kernels::scalar::multiply(a, b, y2);
        CHECK(y1 == y2);

        y1 = b;
        y2 = b;
        kernels::avx2::axpy(0.37, a, y1);
        kernels::scalar::axpy(0.37, a, y2);
        for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));

        auto z1 = c, z2 = c;
        kernels::avx2::scale_complex(z1, a);
        kernels::scalar::scale_complex(z2, a);
        CHECK(z1 == z2);

        y1 = a;
        y2 = a;
        kernels::avx2::scale(y1, -2.5);
        kernels::scalar::scale(y2, -2.5);
        CHECK(y1 == y2);
    }
#else
    MESSAGE("no AVX2 build on this architecture");
#endif
}

TEST_CASE("dispatch honours force_backend") {
    const auto before = kernels::active_backend();
    kernels::force_backend(kernels::Backend::Scalar);
    CHECK(kernels::active_backend() == kernels::Backend::Scalar);
    const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
    CHECK(kernels::dot(a, b) == 32.0);
    kernels::force_backend(before);
    CHECK(kernels::active_backend() == before);
    CHECK(kernels::backend_name(kernels::Backend::Scalar) == "scalar");
}
