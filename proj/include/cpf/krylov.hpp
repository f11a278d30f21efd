#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "cpf/errors.hpp"

namespace cpf {

struct KrylovOptions {
    double tolerance = 1e-13;
    int max_dim = 40;
};

// psi <- exp(-i H dt) psi by Lanczos, with H Hermitian and given by apply(in, out).
// Returns the Krylov dimension used.
template <class Apply>
int krylov_expm(Apply&& apply, std::vector<std::complex<double>>& psi, double dt, const KrylovOptions& opt = {}) {
    using C = std::complex<double>;
    const std::size_t n = psi.size();
    double beta0 = 0.0;
    for (const auto& x : psi) beta0 += std::norm(x);
    beta0 = std::sqrt(beta0);
    if (beta0 == 0.0) return 0;

    std::vector<std::vector<C>> V;
    V.reserve(opt.max_dim + 1);
    V.emplace_back(n);
    for (std::size_t i = 0; i < n; ++i) V[0][i] = psi[i] / beta0;
    std::vector<double> alpha, beta;
    std::vector<C> w(n);
    Eigen::VectorXcd coeffs;
    int m = 0;
    bool converged = false;
    while (m < opt.max_dim) {
        apply(V[m].data(), w.data());
        double a = 0.0;
        for (std::size_t i = 0; i < n; ++i) a += (std::conj(V[m][i]) * w[i]).real();
        for (std::size_t i = 0; i < n; ++i) w[i] -= a * V[m][i];
        if (m > 0) {
            for (std::size_t i = 0; i < n; ++i) w[i] -= beta[m - 1] * V[m - 1][i];
        }
        // Full reorthogonalisation keeps the small basis numerically orthonormal.
        for (int j = 0; j <= m; ++j) {
            C ov = 0.0;
            for (std::size_t i = 0; i < n; ++i) ov += std::conj(V[j][i]) * w[i];
            for (std::size_t i = 0; i < n; ++i) w[i] -= ov * V[j][i];
        }
        alpha.push_back(a);
        double b = 0.0;
        for (const auto& x : w) b += std::norm(x);
        b = std::sqrt(b);
        ++m;

        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        const Eigen::VectorXcd phase =
            (es.eigenvalues().cast<C>() * C(0.0, -dt)).array().exp().matrix();
        coeffs = es.eigenvectors().cast<C>() * (phase.asDiagonal() * es.eigenvectors().row(0).transpose().cast<C>());
        // Error estimate: weight on the next Lanczos vector.
        const double err = b * std::abs(coeffs(m - 1)) * dt;
        if (b < 1e-14 || err < opt.tolerance) {
            converged = true;
            break;
        }
        beta.push_back(b);
        V.emplace_back(n);
        for (std::size_t i = 0; i < n; ++i) V[m][i] = w[i] / b;
    }
    if (!converged) throw StepSizeError("Krylov exponential did not converge; reduce dt");
    for (std::size_t i = 0; i < n; ++i) {
        C acc = 0.0;
        for (int j = 0; j < m; ++j) acc += coeffs(j) * V[j][i];
        psi[i] = beta0 * acc;
    }
    return m;
}

}  // namespace cpf
