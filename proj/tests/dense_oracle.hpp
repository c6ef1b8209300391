// Test-only dense reference computations, assembled independently of the
// library's sparse code paths.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Packed (a11, a12, a22) at a node of the 2D torus grid (i, j).
using Coef2 = std::function<Eigen::Vector3d(int, int)>;

// Dense -a_ij D_ij on the N x N torus, row-major node (i, j) -> i*N + j.
inline Eigen::MatrixXd torus_operator(const Coef2& a, int N) {
    const double h2 = 1.0 / (static_cast<double>(N) * N);
    const int M = N * N;
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(M, M);
    auto id = [N](int i, int j) { return ((i % N + N) % N) * N + ((j % N + N) % N); };
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const int p = id(i, j);
            const Eigen::Vector3d c = a(i, j);
            L(p, p) += 2 * (c[0] + c[2]) / h2;
            L(p, id(i + 1, j)) -= c[0] / h2;
            L(p, id(i - 1, j)) -= c[0] / h2;
            L(p, id(i, j + 1)) -= c[2] / h2;
            L(p, id(i, j - 1)) -= c[2] / h2;
            for (int si : {1, -1})
                for (int sj : {1, -1}) L(p, id(i + si, j + sj)) -= c[1] * si * sj / (2 * h2);
        }
    return L;
}

// Unit-mass null vector of L^T from the SVD.
inline Eigen::VectorXd null_vector_adjoint(const Eigen::MatrixXd& L) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(L.transpose(), Eigen::ComputeFullV);
    Eigen::VectorXd r = svd.matrixV().col(L.rows() - 1);
    return r * (static_cast<double>(r.size()) / r.sum());
}

// Minimum-norm least-squares solution, shifted to mean zero.
inline Eigen::VectorXd pseudo_inverse_solve(const Eigen::MatrixXd& L, const Eigen::VectorXd& g) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(L);
    cod.setThreshold(1e-10);
    Eigen::VectorXd v = cod.solve(g);
    v.array() -= v.mean();
    return v;
}

// 1D: abar for -a u'' on the torus from the dense null vector.
inline double dense_abar_1d(const std::function<double(double)>& a, int N) {
    const double h2 = 1.0 / (static_cast<double>(N) * N);
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i) {
        const double c = a(static_cast<double>(i) / N) / h2;
        L(i, i) = 2 * c;
        L(i, (i + 1) % N) = -c;
        L(i, (i + N - 1) % N) = -c;
    }
    const Eigen::VectorXd r = null_vector_adjoint(L);
    double abar = 0;
    for (int i = 0; i < N; ++i) abar += a(static_cast<double>(i) / N) * r[i] / N;
    return abar;
}

// Dense 2D Dirichlet solve on [0,1]^2 with K cells; returns (K+1)^2 node values, row-major.
inline Eigen::VectorXd dense_box(const Coef2& a, const std::function<double(double, double)>& f,
                                 const std::function<double(double, double)>& g, int K) {
    const double h = 1.0 / K, h2 = h * h;
    const int n = K + 1;
    Eigen::VectorXd U = Eigen::VectorXd::Zero(n * n);
    std::vector<int> num(static_cast<std::size_t>(n * n), -1);
    int m = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == 0 || j == 0 || i == K || j == K) U[i * n + j] = g(i * h, j * h);
            else num[static_cast<std::size_t>(i * n + j)] = m++;
        }
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd b(m);
    for (int i = 1; i < K; ++i)
        for (int j = 1; j < K; ++j) {
            const int row = num[static_cast<std::size_t>(i * n + j)];
            const Eigen::Vector3d c = a(i, j);
            b[row] = f(i * h, j * h);
            auto put = [&](int p, int q, double w) {
                const int col = num[static_cast<std::size_t>(p * n + q)];
                if (col >= 0) M(row, col) += w;
                else b[row] -= w * U[p * n + q];
            };
            put(i, j, 2 * (c[0] + c[2]) / h2);
            put(i + 1, j, -c[0] / h2);
            put(i - 1, j, -c[0] / h2);
            put(i, j + 1, -c[2] / h2);
            put(i, j - 1, -c[2] / h2);
            for (int si : {1, -1})
                for (int sj : {1, -1}) put(i + si, j + sj, -c[1] * si * sj / (2 * h2));
        }
    const Eigen::VectorXd x = M.fullPivLu().solve(b);
    for (int i = 1; i < K; ++i)
        for (int j = 1; j < K; ++j) U[i * n + j] = x[num[static_cast<std::size_t>(i * n + j)]];
    return U;
}

}  // namespace oracle
