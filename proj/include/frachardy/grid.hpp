#pragma once

#include <memory>
#include <span>
#include <vector>

#include "frachardy/potential.hpp"
#include "frachardy/specfun.hpp"

namespace frachardy {

namespace fft {
class Plan;
}

/// Periodic box [-L, L)^N sampled at n points per axis, with the real-to-half-complex
/// frequency lattice xi = (pi / L) k. Copies share the frequency tables and FFT plans.
class SpectralGrid {
public:
    static SpectralGrid make(const FracParams& params, int n, double half_width);

    const FracParams& params() const { return params_; }
    int dim() const { return params_.N; }
    int n() const { return n_; }
    double half_width() const { return L_; }
    double spacing() const { return 2.0 * L_ / n_; }
    double cell_volume() const;
    std::size_t size() const { return size_; }
    /// Number of stored complex coefficients (last axis halved).
    std::size_t spectrum_size() const { return spec_size_; }

    Point coordinate(std::size_t index) const;
    /// Multi-index of a flat position (last axis fastest).
    std::array<int, kMaxDim> multi_index(std::size_t index) const;

    /// |xi|^{2s} per stored coefficient; zero at the excluded zero mode.
    std::span<const double> multiplier() const;
    /// |xi|^{-s} with zero at the zero mode.
    std::span<const double> inverse_sqrt_multiplier() const;
    /// |xi| per stored coefficient.
    std::span<const double> frequency_norm() const;
    /// 1 or 2: how many full-spectrum coefficients each stored one represents.
    std::span<const double> multiplicity() const;
    /// Smallest nonzero |xi|, pi / L.
    double min_frequency() const;

    /// Unnormalized forward DFT into interleaved complex `spec` (size 2 * spectrum_size()).
    void forward(std::span<const double> values, std::span<double> spec) const;
    /// Inverse DFT including the 1 / n^N factor; `spec` is left unspecified.
    void inverse(std::span<double> spec, std::span<double> values) const;

    bool same_as(const SpectralGrid& other) const;

private:
    struct Tables;
    FracParams params_;
    int n_ = 0;
    double L_ = 0.0;
    std::size_t size_ = 0;
    std::size_t spec_size_ = 0;
    std::shared_ptr<const Tables> tables_;
};

/// Samples of a real function on a SpectralGrid.
struct DiscreteField {
    SpectralGrid grid;
    std::vector<double> values;

    static DiscreteField zeros(const SpectralGrid& grid);
    template <class F>
    static DiscreteField sample(const SpectralGrid& grid, F&& f) {
        DiscreteField u = zeros(grid);
        for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] = f(grid.coordinate(i));
        return u;
    }

    /// Removes the mean (the excluded zero Fourier mode).
    void project_mean_zero();
    double l2_norm_sq() const;  ///< h^N sum u^2
};

/// Cell averages of V on every grid cell; throws ResolutionError if a pole
/// radius is below two cell widths.
std::vector<double> cell_averages(const ThetaPotential& v, const SpectralGrid& grid);

}  // namespace frachardy
