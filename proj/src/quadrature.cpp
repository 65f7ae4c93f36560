#include "frachardy/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "frachardy/error.hpp"

namespace frachardy::quad {

namespace {

Rule build_gauss_legendre(int n) {
    Rule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

}  // namespace

const Rule& gauss_legendre(int n) {
    static std::mutex mutex;
    static std::map<int, Rule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
    return it->second;
}

WeightedElement power_weight_element(double a, double b, double p) {
    WeightedElement e{};
    if (a == 0.0) {
        const double bp = std::pow(b, p + 1.0);
        e.length = bp / (p + 1.0);
        e.mbb = bp / (p + 3.0);
        e.mab = bp * (1.0 / (p + 2.0) - 1.0 / (p + 3.0));
        e.maa = bp * (1.0 / (p + 1.0) - 2.0 / (p + 2.0) + 1.0 / (p + 3.0));
        return e;
    }
    const Rule& g = gauss_legendre(16);
    const double h = b - a;
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
        const double lb = 0.5 * (g.nodes[q] + 1.0);
        const double la = 1.0 - lb;
        const double t = a + h * lb;
        const double w = 0.5 * h * g.weights[q] * std::pow(t, p);
        e.length += w;
        e.maa += w * la * la;
        e.mab += w * la * lb;
        e.mbb += w * lb * lb;
    }
    return e;
}

void solve_tridiagonal(std::span<const double> sub_in, std::span<const double> diag_in,
                       std::span<const double> sup_in, std::span<double> x) {
    const std::size_t n = diag_in.size();
    if (n == 0) return;
    std::vector<double> d(diag_in.begin(), diag_in.end());
    std::vector<double> dl(sub_in.begin(), sub_in.end());
    std::vector<double> du(sup_in.begin(), sup_in.end());
    std::vector<double> du2(n > 2 ? n - 2 : 0, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (d[i] == 0.0) throw ResolutionError("solve_tridiagonal: singular matrix");
            const double f = dl[i] / d[i];
            d[i + 1] -= f * du[i];
            x[i + 1] -= f * x[i];
        } else {
            const double f = d[i] / dl[i];
            d[i] = dl[i];
            const double tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -f * du[i + 1];
            }
            du[i] = tmp;
            const double r = x[i];
            x[i] = x[i + 1];
            x[i + 1] = r - f * x[i + 1];
        }
    }
    if (d[n - 1] == 0.0) throw ResolutionError("solve_tridiagonal: singular matrix");
    x[n - 1] /= d[n - 1];
    if (n > 1) x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    for (std::size_t k = n - 2; k-- > 0;) {
        x[k] = (x[k] - du[k] * x[k + 1] - du2[k] * x[k + 2]) / d[k];
    }
}

}  // namespace frachardy::quad
