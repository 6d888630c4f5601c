#pragma once

#include "boxbp/core.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <vector>

namespace boxbp::testing {

// Kernel of the 2x4 counterexample matrix.
inline Matrix example_kernel() {
    Matrix K(4, 2);
    K << -1.0, 1.0,
         -1.0, -3.0,
          0.0, 0.5,
          3.0, 1.5;
    return K;
}

// Rows form an orthonormal basis of the orthogonal complement of the kernel.
inline Matrix example_matrix() {
    const Matrix K = example_kernel();
    Eigen::HouseholderQR<Matrix> qr(K);
    const Matrix Q = qr.householderQ() * Matrix::Identity(4, 4);
    return Q.rightCols(2).transpose();
}

inline Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

// Indicator of a 0-based index set.
inline Vector indicator(Eigen::Index n, const std::vector<int>& set) {
    Vector v = Vector::Zero(n);
    for (int i : set) v[i] = 1.0;
    return v;
}

inline Matrix random_orthogonal(Rng& rng, Eigen::Index m) {
    Matrix G = sample_gaussian_matrix(rng, static_cast<int>(m), static_cast<int>(m));
    Eigen::HouseholderQR<Matrix> qr(G);
    return qr.householderQ() * Matrix::Identity(m, m);
}

// Box-constrained LASSO by cyclic coordinate descent:
// min 0.5 ||Ax - b||^2 + lambda ||x||_1 over lo <= x <= hi.
inline Vector box_lasso(const Matrix& A, const Vector& b, double lambda, const Vector& lo,
                        const Vector& hi) {
    const Eigen::Index n = A.cols();
    Vector x = Vector::Zero(n).cwiseMax(lo).cwiseMin(hi);
    Vector r = b - A * x;
    const Vector col2 = A.colwise().squaredNorm().transpose();
    for (int sweep = 0; sweep < 200000; ++sweep) {
        double change = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (col2[j] == 0) continue;
            const double rho = A.col(j).dot(r) + col2[j] * x[j];
            double v = 0.0;
            if (rho > lambda) v = (rho - lambda) / col2[j];
            if (rho < -lambda) v = (rho + lambda) / col2[j];
            v = std::clamp(v, lo[j], hi[j]);
            const double d = v - x[j];
            if (d != 0.0) {
                r -= d * A.col(j);
                x[j] = v;
                change = std::max(change, std::abs(d));
            }
        }
        if (change < 1e-14) break;
    }
    return x;
}

// min ||x||_1 s.t. ||Ax - b|| <= eta over the box, via bisection on the LASSO
// weight until the residual equals eta.  Assumes the ball constraint is active.
inline Vector denoise_by_lasso(const Matrix& A, const Vector& b, double eta, const Vector& lo,
                               const Vector& hi) {
    double a = 0.0, c = (A.transpose() * b).cwiseAbs().maxCoeff() + 1.0;
    Vector x;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + c);
        x = box_lasso(A, b, mid, lo, hi);
        if ((A * x - b).norm() > eta) {
            c = mid;
        } else {
            a = mid;
        }
        if (c - a < 1e-13 * (1.0 + c)) break;
    }
    return box_lasso(A, b, a, lo, hi);
}

}  // namespace boxbp::testing
