#include "frachardy/lanczos.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "frachardy/error.hpp"
#include "frachardy/kernels.hpp"

namespace frachardy::lanczos {

namespace {

double vnorm(std::span<const double> x) { return std::sqrt(kernels::dot(x, x)); }

// Orthogonalizes w against basis[0..count) twice (classical Gram-Schmidt with
// one refinement pass); accumulates the projection coefficients into h.
void orthogonalize(const std::vector<std::vector<double>>& basis, int count, std::vector<double>& w,
                   Eigen::VectorXd& h) {
    h.setZero(count);
    for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i < count; ++i) {
            const double c = kernels::dot(basis[i], w);
            h(i) += c;
            kernels::axpy(-c, basis[i], w);
        }
    }
}

}  // namespace

Result largest(const Operator& op, std::vector<double> start, const Options& opts) {
    const std::size_t n = start.size();
    const int m = std::max(4, std::min<int>(opts.basis_size, static_cast<int>(n)));
    const int keep = std::clamp(opts.keep, 1, m - 2);

    Result res;
    double start_norm = vnorm(start);
    if (start_norm == 0.0) throw PreconditionError("Lanczos start vector is zero");

    std::vector<std::vector<double>> V(m + 1, std::vector<double>(n));
    kernels::scale(start, 1.0 / start_norm);
    V[0] = std::move(start);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, m);
    std::vector<double> w(n);
    Eigen::VectorXd h;

    int k = 0;  // vectors already in the basis whose column of H is known
    double best_theta = 0.0, best_resid = INFINITY;

    while (true) {
        double beta = 0.0;
        int j = k;
        for (; j < m; ++j) {
            op(V[j], w);
            ++res.matvecs;
            orthogonalize(V, j + 1, w, h);
            for (int i = 0; i <= j; ++i) {
                H(i, j) = h(i);
                H(j, i) = h(i);
            }
            beta = vnorm(w);

            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.topLeftCorner(j + 1, j + 1));
            const int top = j;
            const double theta = es.eigenvalues()(top);
            const double scale = std::max(std::abs(es.eigenvalues()(0)), std::abs(theta));
            const double resid = scale > 0.0 ? beta * std::abs(es.eigenvectors()(j, top)) / scale : 0.0;
            best_theta = theta;
            best_resid = resid;
            const bool breakdown = beta <= 1e-14 * std::max(1.0, scale);
            if (resid <= opts.tol || breakdown || res.matvecs >= opts.max_matvecs) {
                const Eigen::VectorXd y = es.eigenvectors().col(top);
                std::vector<double> x(n, 0.0);
                for (int i = 0; i <= j; ++i) kernels::axpy(y(i), V[i], x);
                kernels::scale(x, 1.0 / vnorm(x));
                res.value = theta;
                res.vector = std::move(x);
                res.residual = breakdown ? 0.0 : resid;
                if (resid <= opts.tol || breakdown) return res;
                throw ConvergenceError("Lanczos did not converge within the matvec cap", best_theta,
                                       best_resid);
            }
            if (j + 1 < m) {
                for (std::size_t i = 0; i < n; ++i) V[j + 1][i] = w[i] / beta;
            }
        }

        // Thick restart: keep the top Ritz vectors and the residual direction.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        std::vector<std::vector<double>> kept(keep, std::vector<double>(n, 0.0));
        for (int c = 0; c < keep; ++c) {
            const int col = m - 1 - c;
            for (int i = 0; i < m; ++i) kernels::axpy(es.eigenvectors()(i, col), V[i], kept[c]);
        }
        H.setZero();
        for (int c = 0; c < keep; ++c) {
            V[c] = std::move(kept[c]);
            H(c, c) = es.eigenvalues()(m - 1 - c);
        }
        for (std::size_t i = 0; i < n; ++i) V[keep][i] = w[i] / beta;
        // Coupling entries H(c, keep) are recomputed exactly by the next orthogonalization.
        k = keep;
    }
}

}  // namespace frachardy::lanczos
