#include "frachardy/grid.hpp"

#include <cmath>
#include <complex>
#include <mutex>

#include <fftw3.h>

#include "frachardy/error.hpp"

namespace frachardy {

namespace fft {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

/// r2c / c2r pair of a fixed shape. Planning is serialized (the FFTW planner is
/// not thread-safe); execution goes through private aligned buffers so that a
/// plan can be shared by concurrent callers.
class Plan {
public:
    Plan(int dim, int n) : dim_(dim) {
        std::array<int, kMaxDim> dims{n, n, n};
        real_size_ = 1;
        for (int k = 0; k < dim; ++k) real_size_ *= static_cast<std::size_t>(n);
        spec_size_ = real_size_ / static_cast<std::size_t>(n) * static_cast<std::size_t>(n / 2 + 1);
        std::lock_guard lock(planner_mutex());
        double* r = fftw_alloc_real(real_size_);
        fftw_complex* c = fftw_alloc_complex(spec_size_);
        fwd_ = fftw_plan_dft_r2c(dim, dims.data(), r, c, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r(dim, dims.data(), c, r, FFTW_ESTIMATE);
        fftw_free(r);
        fftw_free(c);
        if (!fwd_ || !bwd_) throw Error("FFT planning failed");
    }
    ~Plan() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;

    void forward(std::span<const double> in, std::span<double> out) const {
        Buffers b(real_size_, spec_size_);
        std::copy(in.begin(), in.end(), b.r);
        fftw_execute_dft_r2c(fwd_, b.r, b.c);
        std::copy_n(reinterpret_cast<const double*>(b.c), 2 * spec_size_, out.begin());
    }

    void inverse(std::span<const double> in, std::span<double> out) const {
        Buffers b(real_size_, spec_size_);
        std::copy_n(in.begin(), 2 * spec_size_, reinterpret_cast<double*>(b.c));
        fftw_execute_dft_c2r(bwd_, b.c, b.r);
        std::copy_n(b.r, real_size_, out.begin());
    }

private:
    struct Buffers {
        double* r;
        fftw_complex* c;
        Buffers(std::size_t nr, std::size_t nc) : r(fftw_alloc_real(nr)), c(fftw_alloc_complex(nc)) {}
        ~Buffers() {
            fftw_free(r);
            fftw_free(c);
        }
    };

    int dim_;
    std::size_t real_size_ = 0, spec_size_ = 0;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

}  // namespace fft

struct SpectralGrid::Tables {
    std::vector<double> multiplier, inv_sqrt, freq, multiplicity;
    std::unique_ptr<fft::Plan> plan;
};

SpectralGrid SpectralGrid::make(const FracParams& params, int n, double half_width) {
    if (params.N < 1 || params.N > kMaxDim) throw DomainError("grids support N = 1, 2, 3");
    if (n < 8 || (n & (n - 1)) != 0) throw DomainError("n must be a power of two >= 8");
    if (!(half_width > 0.0) || !std::isfinite(half_width)) throw DomainError("L must be positive");
    SpectralGrid g;
    g.params_ = params;
    g.n_ = n;
    g.L_ = half_width;
    g.size_ = 1;
    for (int k = 0; k < params.N; ++k) g.size_ *= static_cast<std::size_t>(n);
    const int half = n / 2 + 1;
    g.spec_size_ = g.size_ / static_cast<std::size_t>(n) * static_cast<std::size_t>(half);

    auto t = std::make_shared<Tables>();
    t->multiplier.resize(g.spec_size_);
    t->inv_sqrt.resize(g.spec_size_);
    t->freq.resize(g.spec_size_);
    t->multiplicity.resize(g.spec_size_);
    const double dk = M_PI / half_width;
    auto signed_index = [n](int i) { return i <= n / 2 ? i : i - n; };
    for (std::size_t idx = 0; idx < g.spec_size_; ++idx) {
        std::size_t rest = idx;
        const int last = static_cast<int>(rest % half);
        rest /= half;
        double xi2 = static_cast<double>(last) * last;
        for (int k = 1; k < params.N; ++k) {
            const int i = signed_index(static_cast<int>(rest % n));
            rest /= n;
            xi2 += static_cast<double>(i) * i;
        }
        const double xi = dk * std::sqrt(xi2);
        t->freq[idx] = xi;
        t->multiplier[idx] = xi > 0.0 ? std::pow(xi, 2.0 * params.s) : 0.0;
        t->inv_sqrt[idx] = xi > 0.0 ? std::pow(xi, -params.s) : 0.0;
        t->multiplicity[idx] = (last == 0 || last == n / 2) ? 1.0 : 2.0;
    }
    t->plan = std::make_unique<fft::Plan>(params.N, n);
    g.tables_ = std::move(t);
    return g;
}

double SpectralGrid::cell_volume() const { return std::pow(spacing(), dim()); }

std::array<int, kMaxDim> SpectralGrid::multi_index(std::size_t index) const {
    std::array<int, kMaxDim> out{};
    for (int k = dim() - 1; k >= 0; --k) {
        out[k] = static_cast<int>(index % static_cast<std::size_t>(n_));
        index /= static_cast<std::size_t>(n_);
    }
    return out;
}

Point SpectralGrid::coordinate(std::size_t index) const {
    const auto mi = multi_index(index);
    Point x{};
    const double h = spacing();
    for (int k = 0; k < dim(); ++k) x[k] = -L_ + h * mi[k];
    return x;
}

std::span<const double> SpectralGrid::multiplier() const { return tables_->multiplier; }
std::span<const double> SpectralGrid::inverse_sqrt_multiplier() const { return tables_->inv_sqrt; }
std::span<const double> SpectralGrid::frequency_norm() const { return tables_->freq; }
std::span<const double> SpectralGrid::multiplicity() const { return tables_->multiplicity; }
double SpectralGrid::min_frequency() const { return M_PI / L_; }

void SpectralGrid::forward(std::span<const double> values, std::span<double> spec) const {
    tables_->plan->forward(values, spec);
}

void SpectralGrid::inverse(std::span<double> spec, std::span<double> values) const {
    tables_->plan->inverse(spec, values);
    const double f = 1.0 / static_cast<double>(size_);
    for (double& v : values) v *= f;
}

bool SpectralGrid::same_as(const SpectralGrid& other) const {
    return tables_ == other.tables_ ||
           (n_ == other.n_ && L_ == other.L_ && params_.N == other.params_.N &&
            params_.s == other.params_.s);
}

DiscreteField DiscreteField::zeros(const SpectralGrid& grid) {
    return DiscreteField{grid, std::vector<double>(grid.size(), 0.0)};
}

void DiscreteField::project_mean_zero() {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    for (double& v : values) v -= mean;
}

double DiscreteField::l2_norm_sq() const {
    double acc = 0.0;
    for (double v : values) acc += v * v;
    return acc * grid.cell_volume();
}

std::vector<double> cell_averages(const ThetaPotential& v, const SpectralGrid& grid) {
    const double h = grid.spacing();
    for (const auto& p : v.poles) {
        if (p.r < 2.0 * h) {
            throw ResolutionError("pole radius below two cell widths; refine the grid");
        }
    }
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = cell_average(v, grid.coordinate(i), h);
    return out;
}

}  // namespace frachardy
